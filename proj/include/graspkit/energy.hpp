#pragma once

#include <cstdint>
#include <vector>

#include "graspkit/geometry.hpp"
#include "graspkit/kinematics.hpp"

namespace graspkit {

// Per-object contact point selections; values index into HandSurfacePoints.
struct ContactAssignment {
  std::vector<std::vector<int>> per_object;

  void validate(int surface_count, int object_count) const;
};

struct EnergyWeights {
  // Penetration depths are squared meters, so the weight must be large for
  // millimetre-scale violations to register: 1e4 makes a 1 mm penetration
  // cost 0.01, on par with a noticeable force-closure residual.
  double lambda_p = 1e4;     // penetration
  double lambda_sp = 10.0;   // self penetration
  double lambda_q = 1.0;     // joint limits
  // Same squared-meters scaling: at 100 a contact hovering 30 mm off the
  // surface costs less than the closure residual it fakes, so optimized
  // contact sets drift away from the object instead of touching it.
  double lambda_d = 2500.0;     // contact attraction inside the closure term

  void validate() const;
};

// One evaluation's term values. total is always assembled as
// sum(fc_per_object) + lambda_p*e_p + lambda_sp*e_sp + lambda_q*e_q.
struct EnergyBreakdown {
  std::vector<double> fc_per_object;
  double e_p = 0.0;
  double e_sp = 0.0;
  double e_q = 0.0;
  double total = 0.0;
};

// Squared net wrench of unit inward-normal contact forces plus the weighted
// squared contact-surface distances. degenerate (optional) reports that some
// contact sat on the object's medial axis and a fallback normal was used.
double force_closure_error(const std::vector<int>& contacts, const HandSurfacePoints& surface,
                           const ObjectShape& shape, double lambda_d,
                           bool* degenerate = nullptr);

// Sum of squared penetration depths of hand samples into objects and table.
double penetration_energy(const HandSurfacePoints& surface, const Scene& scene);

// Squared hinge on pairwise link clearance below delta, non-adjacent pairs.
double self_penetration_energy(const HandModel& model, const HandConfiguration& cfg,
                               double delta = 0.002);

// Squared joint-limit violations.
double joint_limit_energy(const HandModel& model, const HandConfiguration& cfg);

EnergyBreakdown total_energy(const HandModel& model, const HandConfiguration& cfg,
                             const Scene& scene, const ContactAssignment& contacts,
                             const EnergyWeights& weights, std::uint64_t seed);

// Gradient of total_energy in the order [position(3), rotation tangent(3),
// joints(dof)]; the rotation tangent w parameterizes R(w) = exp(skew(w)) * R0
// around the configuration's orientation R0.
VecXd energy_gradient(const HandModel& model, const HandConfiguration& cfg, const Scene& scene,
                      const ContactAssignment& contacts, const EnergyWeights& weights,
                      std::uint64_t seed, EnergyBreakdown* breakdown = nullptr);

// Caches the material sample set, link bounding volumes, and object frames
// for repeated evaluations of one (model, scene, weights, seed) tuple.
// Immutable after construction; safe to share across threads.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const HandModel& model, const Scene& scene, const EnergyWeights& weights,
                  std::uint64_t seed);

  EnergyBreakdown evaluate(const HandConfiguration& cfg, const ContactAssignment& contacts) const;
  EnergyBreakdown evaluate_with_gradient(const HandConfiguration& cfg,
                                         const ContactAssignment& contacts, VecXd* grad) const;

  // Force-closure term only, for the contact-resampling Metropolis step.
  std::vector<double> closure_terms(const HandConfiguration& cfg,
                                    const ContactAssignment& contacts) const;

  const HandModel& model() const { return *model_; }
  const Scene& scene() const { return *scene_; }
  const EnergyWeights& weights() const { return weights_; }
  std::uint64_t seed() const { return seed_; }
  const SurfaceSampleSet& local_samples() const { return local_; }
  int surface_count() const { return local_.count(); }
  int parameter_count() const { return 6 + model_->dof; }

  HandSurfacePoints surface(const HandConfiguration& cfg) const;

  // Evaluation in a caller-chosen scalar (double, long double, or a dual
  // type). params = [p(3), w(3), q(dof)] with R(w) = exp(skew(w)) * R0.
  template <class T>
  void evaluate_t(const Mat3d& R0, const T* params, const ContactAssignment& contacts,
                  std::vector<T>* fc, T* e_p, T* e_sp, T* e_q, T* total) const;

 private:
  const HandModel* model_;
  const Scene* scene_;
  EnergyWeights weights_;
  std::uint64_t seed_;
  SurfaceSampleSet local_;

  // Per link: collision primitive centers in the link frame and conservative
  // bounding radii, for the value-space self-penetration prescreen.
  struct PrimBound {
    int link;
    int prim;
    Vec3d center;
    double radius;
  };
  std::vector<std::vector<PrimBound>> link_bounds_;
  std::vector<std::pair<int, int>> sp_pairs_;

  // Object constants.
  std::vector<RigidTransform> obj_inverse_;
  std::vector<Mat3d> obj_rot_;
};

// Conservative margin for the value-space prescreens. Terms whose hinge
// argument clears the boundary by more than this are identically zero on a
// neighborhood, so skipping them is exact for values and derivatives.
inline constexpr double kPrescreenMargin = 1e-5;

}  // namespace graspkit

#pragma once

#include <cstdint>
#include <vector>

#include "graspkit/geometry.hpp"
#include "graspkit/kinematics.hpp"

namespace graspkit {

// Point-contact friction model used by the wrench-space quality metric.
// torque_scale nondimensionalizes torques; 0 means "use the bounding radius
// of whichever object is being evaluated" and must be resolved before
// q1_metric sees it.
struct FrictionModel {
  double mu = 0.5;
  int edges = 8;
  double torque_scale = 0.0;  // meters
  void validate() const;
};

// Acceptance gates applied to sampled grasps.
struct FilterThresholds {
  double max_fc_per_object = 0.05;
  double max_penetration = 0.002;  // meters
  double min_contact_ratio = 1.0;
  double contact_epsilon = 0.003;  // meters, |sdf| band that counts as touching
  int min_contacts = 3;            // per object, for the contact ratio
  void validate() const;
};

struct QualityReport {
  std::vector<double> q1_per_object;
  double q1_min = 0.0;
  double penetration_mm = 0.0;
  double contact_ratio = 0.0;
  bool feasible = false;
};

// Discretized friction-cone wrenches, edges per contact. Forces are unit
// cone-edge directions around the (inward) contact normal; torques are
// (r x f) / torque_scale with r measured from center. A deterministic
// index-keyed jitter of magnitude 1e-6 is folded in so downstream hull
// construction never sees exactly degenerate facets; both the hull route and
// the enumeration oracle therefore consume identical input.
std::vector<Vec6d> friction_wrenches(const std::vector<Vec3d>& points,
                                     const std::vector<Vec3d>& normals, const Vec3d& center,
                                     const FrictionModel& friction);

// Radius of the largest origin-centered ball inside the convex hull of the
// wrench set (0 when the origin is not strictly inside). Incremental
// facet-refinement hull in 6-D.
double q1_from_wrenches(const std::vector<Vec6d>& wrenches);

// Same quantity by exhaustive supporting-plane enumeration over all
// 6-subsets. O(n^6); independent check for small wrench sets.
double q1_support_oracle(const std::vector<Vec6d>& wrenches);

// Convenience: cone wrenches -> hull -> ball radius. Requires at least one
// contact and a resolved (positive) torque_scale.
double q1_metric(const std::vector<Vec3d>& points, const std::vector<Vec3d>& normals,
                 const Vec3d& center, const FrictionModel& friction);

// Lowest world z reached by a posed primitive with the scale already folded
// into dims. Exact support function, not sampled.
double primitive_min_z(PrimitiveKind kind, const Vec3d& scaled_dims, const RigidTransform& frame);

// Deepest interpenetration in millimeters across hand-object, object-object,
// and anything-table. Table terms are exact support functions; body-body
// terms probe surface samples against signed distance fields. 0 when
// contact-free.
double penetration_depth_mm(const HandModel& model, const HandConfiguration& cfg,
                            const Scene& scene, std::uint64_t surface_seed);

// Mean per-joint population variance of joint angles, in squared degrees.
// Needs at least two grasps.
double diversity_deg(const std::vector<HandConfiguration>& grasps);

// Fraction of scene objects touched by at least min_contacts hand surface
// samples within contact_epsilon of their surface.
double contact_ratio(const HandModel& model, const HandConfiguration& cfg, const Scene& scene,
                     double contact_epsilon, int min_contacts, std::uint64_t surface_seed);

// Full quality gate: per-object ball radii from sampled contacts, worst-case
// penetration, contact coverage, and the combined feasible verdict.
QualityReport static_feasibility(const HandModel& model, const HandConfiguration& cfg,
                                 const Scene& scene, const FrictionModel& friction,
                                 const FilterThresholds& thresholds, std::uint64_t surface_seed);

}  // namespace graspkit

#include "graspkit/energy.hpp"

#include <cmath>

#include "graspkit/dual.hpp"

namespace graspkit {

namespace {

constexpr double kSelfClearance = 0.002;

// True when the canonical-frame query point sits on the shape's medial axis,
// where the surface normal is not unique and a fallback direction is used.
bool on_medial_axis(const ObjectShape& shape, const Vec3d& world) {
  const Vec3d local = shape.pose.inverse().apply(world);
  const Vec3d c = local / shape.scale;
  switch (shape.kind) {
    case PrimitiveKind::Sphere:
      return c.norm() < 1e-9;
    case PrimitiveKind::Capsule: {
      const double cz = std::clamp(c.z(), -shape.dims[1], shape.dims[1]);
      return Vec3d(c.x(), c.y(), c.z() - cz).norm() < 1e-9;
    }
    case PrimitiveKind::Cylinder: {
      const double rr = std::hypot(c.x(), c.y());
      const double dr = rr - shape.dims[0];
      const double dz = std::abs(c.z()) - shape.dims[1];
      return rr < 1e-9 && dr <= 0.0 && dz <= 0.0 && dr >= dz;
    }
    case PrimitiveKind::Box:
      return false;  // nearest-face ties resolve deterministically
  }
  return false;
}

double primitive_bounding_radius(const Primitive& p) {
  switch (p.kind) {
    case PrimitiveKind::Sphere:
      return p.dims[0];
    case PrimitiveKind::Box:
      return p.dims.norm();
    case PrimitiveKind::Cylinder:
      return std::hypot(p.dims[0], p.dims[1]);
    case PrimitiveKind::Capsule:
      return p.dims[0] + p.dims[1];
  }
  return 0.0;
}

void check_finite(const EnergyBreakdown& b) {
  for (double v : b.fc_per_object)
    if (!std::isfinite(v)) throw NumericalError("force-closure term is not finite");
  if (!std::isfinite(b.e_p)) throw NumericalError("penetration term is not finite");
  if (!std::isfinite(b.e_sp)) throw NumericalError("self-penetration term is not finite");
  if (!std::isfinite(b.e_q)) throw NumericalError("joint-limit term is not finite");
  if (!std::isfinite(b.total)) throw NumericalError("total energy is not finite");
}

}  // namespace

void ContactAssignment::validate(int surface_count, int object_count) const {
  if (static_cast<int>(per_object.size()) != object_count)
    throw ConfigError("contact assignment must cover every object in the scene");
  for (const auto& list : per_object) {
    if (list.empty()) throw ConfigError("each object needs at least one contact");
    for (int idx : list)
      if (idx < 0 || idx >= surface_count)
        throw ConfigError("contact index out of range of the hand surface set");
  }
}

void EnergyWeights::validate() const {
  if (lambda_p < 0 || lambda_sp < 0 || lambda_q < 0 || lambda_d < 0)
    throw ConfigError("energy weights must be non-negative");
}

double force_closure_error(const std::vector<int>& contacts, const HandSurfacePoints& surface,
                           const ObjectShape& shape, double lambda_d, bool* degenerate) {
  if (contacts.empty()) throw ConfigError("force closure needs at least one contact");
  if (degenerate) *degenerate = false;
  const PoseT<double> inv = to_pose_t<double>(shape.pose.inverse());
  const Mat3d rot = shape.pose.orientation.toRotationMatrix();
  const Vec3d center = shape.pose.position;
  Vec3d force = Vec3d::Zero();
  Vec3d torque = Vec3d::Zero();
  double dsum = 0.0;
  for (int idx : contacts) {
    if (idx < 0 || idx >= surface.count()) throw ConfigError("contact index out of range");
    const Vec3d x = surface.points.row(idx);
    const double sd = object_sdf(shape, inv, x);
    const Vec3d n = -object_sdf_gradient(shape, inv, rot, x);
    if (degenerate && on_medial_axis(shape, x)) *degenerate = true;
    force += n;
    torque += (x - center).cross(n);
    dsum += sd * sd;
  }
  return force.squaredNorm() + torque.squaredNorm() + lambda_d * dsum;
}

double penetration_energy(const HandSurfacePoints& surface, const Scene& scene) {
  std::vector<PoseT<double>> inv(scene.objects.size());
  for (size_t j = 0; j < scene.objects.size(); ++j)
    inv[j] = to_pose_t<double>(scene.objects[j].pose.inverse());
  double e = 0.0;
  for (int i = 0; i < surface.count(); ++i) {
    const Vec3d x = surface.points.row(i);
    const double hz = std::max(0.0, -x.z());
    e += hz * hz;
    for (size_t j = 0; j < scene.objects.size(); ++j) {
      const double h = std::max(0.0, -object_sdf(scene.objects[j], inv[j], x));
      e += h * h;
    }
  }
  return e;
}

double self_penetration_energy(const HandModel& model, const HandConfiguration& cfg,
                               double delta) {
  const auto poses = forward_kinematics(model, cfg);
  std::vector<PoseT<double>> pt(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) pt[i] = to_pose_t<double>(poses[i]);
  double e = 0.0;
  for (const auto& [i, j] : model.self_collision_pairs()) {
    for (const Primitive& pa : model.links[i].collision) {
      for (const Primitive& pb : model.links[j].collision) {
        const double d = primitive_pair_distance(pa, pt[i], pb, pt[j]);
        const double h = std::max(0.0, delta - d);
        e += h * h;
      }
    }
  }
  return e;
}

double joint_limit_energy(const HandModel& model, const HandConfiguration& cfg) {
  if (cfg.q.size() != model.dof) throw ConfigError("joint vector length mismatch");
  double e = 0.0;
  for (size_t i = 0; i < model.links.size(); ++i) {
    if (model.joint_index[i] < 0) continue;
    const Link& l = model.links[i];
    const double q = cfg.q[model.joint_index[i]];
    const double over = std::max(0.0, q - l.hi);
    const double under = std::max(0.0, l.lo - q);
    e += over * over + under * under;
  }
  return e;
}

EnergyEvaluator::EnergyEvaluator(const HandModel& model, const Scene& scene,
                                 const EnergyWeights& weights, std::uint64_t seed)
    : model_(&model), scene_(&scene), weights_(weights), seed_(seed) {
  weights_.validate();
  scene.validate();
  local_ = local_surface_samples(model, seed);
  link_bounds_.resize(model.links.size());
  for (size_t i = 0; i < model.links.size(); ++i) {
    for (size_t p = 0; p < model.links[i].collision.size(); ++p) {
      const Primitive& prim = model.links[i].collision[p];
      link_bounds_[i].push_back({static_cast<int>(i), static_cast<int>(p),
                                 prim.origin.position, primitive_bounding_radius(prim)});
    }
  }
  sp_pairs_ = model.self_collision_pairs();
  obj_inverse_.reserve(scene.objects.size());
  obj_rot_.reserve(scene.objects.size());
  for (const ObjectShape& o : scene.objects) {
    obj_inverse_.push_back(o.pose.inverse());
    obj_rot_.push_back(o.pose.orientation.toRotationMatrix());
  }
}

template <class T>
void EnergyEvaluator::evaluate_t(const Mat3d& R0, const T* params,
                                 const ContactAssignment& contacts, std::vector<T>* fc, T* e_p,
                                 T* e_sp, T* e_q, T* total) const {
  using std::max;
  const HandModel& model = *model_;
  const Scene& scene = *scene_;
  const size_t nlinks = model.links.size();
  const int nobj = scene.object_count();

  PoseT<T> base;
  base.p = Vec3<T>(params[0], params[1], params[2]);
  const Vec3<T> w(params[3], params[4], params[5]);
  base.R = Mat3<T>(exp_so3(w) * R0.cast<T>().eval());

  std::vector<PoseT<T>> poses;
  forward_kinematics_t(model, base, params + 6, poses);

  // Value parts of the link poses drive every prescreen decision.
  std::vector<Mat3d> Rv(nlinks);
  std::vector<Vec3d> pv(nlinks);
  for (size_t i = 0; i < nlinks; ++i) {
    for (int r = 0; r < 3; ++r) {
      pv[i][r] = value_of(poses[i].p[r]);
      for (int c = 0; c < 3; ++c) Rv[i](r, c) = value_of(poses[i].R(r, c));
    }
  }

  // Joint limits.
  T eq(0.0);
  for (size_t i = 0; i < nlinks; ++i) {
    if (model.joint_index[i] < 0) continue;
    const Link& l = model.links[i];
    const T& q = params[6 + model.joint_index[i]];
    const T over = max(q - l.hi, T(0.0));
    const T under = max(l.lo - q, T(0.0));
    eq += over * over + under * under;
  }

  // Self penetration with a bounding-sphere prescreen per primitive pair.
  // For tangent-carrying scalars an exact double-precision distance check
  // runs first: hinges cleared by the margin are identically zero on a
  // neighborhood, so skipping them loses nothing.
  constexpr bool kPlainDouble = std::is_same_v<T, double>;
  std::vector<PoseT<double>> dposes;
  if constexpr (!kPlainDouble) {
    dposes.resize(nlinks);
    for (size_t i = 0; i < nlinks; ++i) {
      dposes[i].R = Rv[i];
      dposes[i].p = pv[i];
    }
  }
  T esp(0.0);
  for (const auto& [i, j] : sp_pairs_) {
    for (const PrimBound& a : link_bounds_[i]) {
      for (const PrimBound& b : link_bounds_[j]) {
        const Vec3d ca = Rv[i] * a.center + pv[i];
        const Vec3d cb = Rv[j] * b.center + pv[j];
        if ((ca - cb).norm() - a.radius - b.radius > kSelfClearance + kPrescreenMargin) continue;
        const Primitive& pa = model.links[i].collision[a.prim];
        const Primitive& pb = model.links[j].collision[b.prim];
        if constexpr (!kPlainDouble) {
          if (primitive_pair_distance(pa, dposes[i], pb, dposes[j]) - kSelfClearance >
              kPrescreenMargin)
            continue;
        }
        const T dist = primitive_pair_distance(pa, poses[i], pb, poses[j]);
        const T hinge = max(T(kSelfClearance) - dist, T(0.0));
        esp += hinge * hinge;
      }
    }
  }

  // Penetration: per sample, a double-precision pass decides which terms can
  // be active; only those get the full-scalar treatment.
  std::vector<PoseT<T>> inv_t(nobj);
  for (int j = 0; j < nobj; ++j) inv_t[j] = to_pose_t<T>(obj_inverse_[j]);
  T ep(0.0);
  std::vector<int> active;
  active.reserve(4);
  for (int s = 0; s < local_.count(); ++s) {
    const int li = local_.link[s];
    const Vec3d lp = local_.points.row(s);
    const Vec3d wv = Rv[li] * lp + pv[li];
    const bool table_active = wv.z() < kPrescreenMargin;
    active.clear();
    for (int j = 0; j < nobj; ++j) {
      const ObjectShape& o = scene.objects[j];
      if ((wv - o.pose.position).norm() - o.bounding_radius() > kPrescreenMargin) continue;
      if (object_sdf(o, wv) >= kPrescreenMargin) continue;
      active.push_back(j);
    }
    if (!table_active && active.empty()) continue;
    const Vec3<T> wp = poses[li].apply(Vec3<T>(T(lp.x()), T(lp.y()), T(lp.z())));
    if (table_active) {
      const T h = max(-wp.z(), T(0.0));
      ep += h * h;
    }
    for (int j : active) {
      const T h = max(-object_sdf(scene.objects[j], inv_t[j], wp), T(0.0));
      ep += h * h;
    }
  }

  // Force closure per object.
  fc->assign(nobj, T(0.0));
  for (int j = 0; j < nobj; ++j) {
    const ObjectShape& o = scene.objects[j];
    const PoseT<T>& inv = inv_t[j];
    const Mat3<T> rot = obj_rot_[j].cast<T>();
    const Vec3<T> center(T(o.pose.position.x()), T(o.pose.position.y()),
                         T(o.pose.position.z()));
    Vec3<T> force(T(0.0), T(0.0), T(0.0));
    Vec3<T> torque(T(0.0), T(0.0), T(0.0));
    T dsum(0.0);
    for (int idx : contacts.per_object[j]) {
      const int li = local_.link[idx];
      const Vec3d lp = local_.points.row(idx);
      const Vec3<T> x = poses[li].apply(Vec3<T>(T(lp.x()), T(lp.y()), T(lp.z())));
      const T sd = object_sdf(o, inv, x);
      const Vec3<T> n = -object_sdf_gradient(o, inv, rot, x);
      force += n;
      torque += Vec3<T>(x - center).cross(n);
      dsum += sd * sd;
    }
    (*fc)[j] = force.squaredNorm() + torque.squaredNorm() + weights_.lambda_d * dsum;
  }

  *e_p = ep;
  *e_sp = esp;
  *e_q = eq;
  T tot(0.0);
  for (const T& f : *fc) tot += f;
  tot += weights_.lambda_p * ep + weights_.lambda_sp * esp + weights_.lambda_q * eq;
  *total = tot;
}

template void EnergyEvaluator::evaluate_t<double>(const Mat3d&, const double*,
                                                  const ContactAssignment&, std::vector<double>*,
                                                  double*, double*, double*, double*) const;
template void EnergyEvaluator::evaluate_t<long double>(const Mat3d&, const long double*,
                                                       const ContactAssignment&,
                                                       std::vector<long double>*, long double*,
                                                       long double*, long double*,
                                                       long double*) const;
template void EnergyEvaluator::evaluate_t<DualG>(const Mat3d&, const DualG*,
                                                 const ContactAssignment&, std::vector<DualG>*,
                                                 DualG*, DualG*, DualG*, DualG*) const;

EnergyBreakdown EnergyEvaluator::evaluate(const HandConfiguration& cfg,
                                          const ContactAssignment& contacts) const {
  if (cfg.q.size() != model_->dof) throw ConfigError("joint vector length mismatch");
  contacts.validate(surface_count(), scene_->object_count());
  const int np = parameter_count();
  std::vector<double> params(np, 0.0);
  params[0] = cfg.base.position.x();
  params[1] = cfg.base.position.y();
  params[2] = cfg.base.position.z();
  for (int i = 0; i < model_->dof; ++i) params[6 + i] = cfg.q[i];
  const Mat3d R0 = cfg.base.orientation.toRotationMatrix();
  EnergyBreakdown out;
  evaluate_t<double>(R0, params.data(), contacts, &out.fc_per_object, &out.e_p, &out.e_sp,
                     &out.e_q, &out.total);
  check_finite(out);
  return out;
}

EnergyBreakdown EnergyEvaluator::evaluate_with_gradient(const HandConfiguration& cfg,
                                                        const ContactAssignment& contacts,
                                                        VecXd* grad) const {
  if (cfg.q.size() != model_->dof) throw ConfigError("joint vector length mismatch");
  contacts.validate(surface_count(), scene_->object_count());
  const int np = parameter_count();
  if (np > kMaxTangent)
    throw ConfigError("model exceeds the tangent width of the gradient path");
  std::vector<DualG> params(np);
  params[0] = DualG::seeded(cfg.base.position.x(), 0);
  params[1] = DualG::seeded(cfg.base.position.y(), 1);
  params[2] = DualG::seeded(cfg.base.position.z(), 2);
  for (int k = 3; k < 6; ++k) params[k] = DualG::seeded(0.0, k);
  for (int i = 0; i < model_->dof; ++i) params[6 + i] = DualG::seeded(cfg.q[i], 6 + i);
  const Mat3d R0 = cfg.base.orientation.toRotationMatrix();
  std::vector<DualG> fc;
  DualG ep, esp, eq, total;
  evaluate_t<DualG>(R0, params.data(), contacts, &fc, &ep, &esp, &eq, &total);
  EnergyBreakdown out;
  out.fc_per_object.resize(fc.size());
  for (size_t j = 0; j < fc.size(); ++j) out.fc_per_object[j] = fc[j].v;
  out.e_p = ep.v;
  out.e_sp = esp.v;
  out.e_q = eq.v;
  out.total = total.v;
  check_finite(out);
  grad->resize(np);
  for (int k = 0; k < np; ++k) {
    (*grad)[k] = total.g[k];
    if (!std::isfinite((*grad)[k])) throw NumericalError("energy gradient is not finite");
  }
  return out;
}

std::vector<double> EnergyEvaluator::closure_terms(const HandConfiguration& cfg,
                                                   const ContactAssignment& contacts) const {
  const HandSurfacePoints surf = surface(cfg);
  std::vector<double> out(scene_->object_count());
  for (int j = 0; j < scene_->object_count(); ++j)
    out[j] = force_closure_error(contacts.per_object[j], surf, scene_->objects[j],
                                 weights_.lambda_d);
  return out;
}

HandSurfacePoints EnergyEvaluator::surface(const HandConfiguration& cfg) const {
  return sample_hand_surface(*model_, cfg, seed_);
}

EnergyBreakdown total_energy(const HandModel& model, const HandConfiguration& cfg,
                             const Scene& scene, const ContactAssignment& contacts,
                             const EnergyWeights& weights, std::uint64_t seed) {
  return EnergyEvaluator(model, scene, weights, seed).evaluate(cfg, contacts);
}

VecXd energy_gradient(const HandModel& model, const HandConfiguration& cfg, const Scene& scene,
                      const ContactAssignment& contacts, const EnergyWeights& weights,
                      std::uint64_t seed, EnergyBreakdown* breakdown) {
  VecXd grad;
  const EnergyBreakdown b =
      EnergyEvaluator(model, scene, weights, seed).evaluate_with_gradient(cfg, contacts, &grad);
  if (breakdown) *breakdown = b;
  return grad;
}

}  // namespace graspkit

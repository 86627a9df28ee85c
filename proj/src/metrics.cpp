#include "graspkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspkit/errors.hpp"
#include "graspkit/rng.hpp"

namespace graspkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
// Cone-edge wrenches of one contact lie in a 2-D affine flat, so raw wrench
// sets are heavily degenerate. The jitter must dominate hull tolerances by
// several orders so every sidedness decision is decisive; the enumeration
// cross-check consumes the same jittered input, so agreement is unaffected.
constexpr double kWrenchJitter = 1e-6;

// Orthonormal tangent frame around n (unit). Deterministic: seeds from the
// axis least aligned with n.
void tangent_basis(const Vec3d& n, Vec3d* t1, Vec3d* t2) {
  int least = 0;
  for (int a = 1; a < 3; ++a)
    if (std::abs(n[a]) < std::abs(n[least])) least = a;
  Vec3d seed = Vec3d::Zero();
  seed[least] = 1.0;
  *t1 = n.cross(seed).normalized();
  *t2 = n.cross(*t1);
}

int touching_samples(const HandSurfacePoints& surf, const ObjectShape& obj, double epsilon) {
  int count = 0;
  for (int i = 0; i < surf.count(); ++i) {
    const Vec3d x = surf.points.row(i).transpose();
    if (std::abs(object_sdf(obj, x)) <= epsilon) ++count;
  }
  return count;
}

}  // namespace

void FrictionModel::validate() const {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw ConfigError("friction coefficient must be positive");
  if (edges < 3) throw ConfigError("friction cone needs at least 3 edges");
  if (!(torque_scale >= 0.0) || !std::isfinite(torque_scale))
    throw ConfigError("torque scale must be a nonnegative length");
}

void FilterThresholds::validate() const {
  if (!(max_fc_per_object >= 0.0) || !std::isfinite(max_fc_per_object))
    throw ConfigError("force-closure threshold must be nonnegative");
  if (!(max_penetration >= 0.0) || !std::isfinite(max_penetration))
    throw ConfigError("penetration threshold must be nonnegative");
  if (!(min_contact_ratio >= 0.0) || !(min_contact_ratio <= 1.0))
    throw ConfigError("contact ratio threshold must lie in [0, 1]");
  // Zero is a legal (vacuous) band: nothing ever counts as touching.
  if (!(contact_epsilon >= 0.0) || !std::isfinite(contact_epsilon))
    throw ConfigError("contact epsilon must be nonnegative");
  if (min_contacts < 1) throw ConfigError("minimum contact count must be at least 1");
}

std::vector<Vec6d> friction_wrenches(const std::vector<Vec3d>& points,
                                     const std::vector<Vec3d>& normals, const Vec3d& center,
                                     const FrictionModel& friction) {
  friction.validate();
  if (points.size() != normals.size()) throw ConfigError("contact point/normal count mismatch");
  if (!(friction.torque_scale > 0.0))
    throw ConfigError("torque scale must be resolved to a positive length");

  std::vector<Vec6d> wrenches;
  wrenches.reserve(points.size() * static_cast<size_t>(friction.edges));
  for (size_t i = 0; i < points.size(); ++i) {
    const double nn = normals[i].norm();
    if (!(nn > 1e-12)) throw NumericalError("contact normal has zero length");
    const Vec3d n = normals[i] / nn;
    Vec3d t1, t2;
    tangent_basis(n, &t1, &t2);
    const Vec3d r = points[i] - center;
    for (int k = 0; k < friction.edges; ++k) {
      const double theta = 2.0 * kPi * k / friction.edges;
      const Vec3d f =
          (n + friction.mu * (std::cos(theta) * t1 + std::sin(theta) * t2)).normalized();
      Vec6d w;
      w.head<3>() = f;
      w.tail<3>() = r.cross(f) / friction.torque_scale;
      Rng jitter(
          derive_stream(0x6a09e667f3bcc908ULL, i * static_cast<size_t>(friction.edges) + k));
      for (int s = 0; s < 6; ++s) w[s] += jitter.uniform(-kWrenchJitter, kWrenchJitter);
      wrenches.push_back(w);
    }
  }
  return wrenches;
}

double q1_metric(const std::vector<Vec3d>& points, const std::vector<Vec3d>& normals,
                 const Vec3d& center, const FrictionModel& friction) {
  if (points.empty()) throw ConfigError("quality metric needs at least one contact");
  return q1_from_wrenches(friction_wrenches(points, normals, center, friction));
}

double primitive_min_z(PrimitiveKind kind, const Vec3d& scaled_dims, const RigidTransform& frame) {
  const Mat3d R = frame.rotation();
  const Vec3d p = frame.position;
  switch (kind) {
    case PrimitiveKind::Sphere:
      return p.z() - scaled_dims[0];
    case PrimitiveKind::Box: {
      double drop = 0.0;
      for (int a = 0; a < 3; ++a) drop += scaled_dims[a] * std::abs(R(2, a));
      return p.z() - drop;
    }
    case PrimitiveKind::Capsule: {
      const Vec3d axis = R.col(2) * scaled_dims[1];
      return std::min((p + axis).z(), (p - axis).z()) - scaled_dims[0];
    }
    case PrimitiveKind::Cylinder: {
      const Vec3d axis = R.col(2) * scaled_dims[1];
      const double az = R(2, 2);
      const double rim = scaled_dims[0] * std::sqrt(std::max(0.0, 1.0 - az * az));
      return std::min((p + axis).z(), (p - axis).z()) - rim;
    }
  }
  throw ConfigError("unknown primitive kind");
}

double penetration_depth_mm(const HandModel& model, const HandConfiguration& cfg,
                            const Scene& scene, std::uint64_t surface_seed) {
  double depth = 0.0;

  const HandSurfacePoints surf = sample_hand_surface(model, cfg, surface_seed);
  for (const ObjectShape& obj : scene.objects) {
    for (int i = 0; i < surf.count(); ++i) {
      const Vec3d x = surf.points.row(i).transpose();
      depth = std::max(depth, -object_sdf(obj, x));
    }
  }

  // Table terms are exact: support function of each body in -z.
  const std::vector<RigidTransform> poses = forward_kinematics(model, cfg);
  for (size_t l = 0; l < model.links.size(); ++l) {
    for (const Primitive& prim : model.links[l].collision) {
      const RigidTransform frame = poses[l] * prim.origin;
      depth = std::max(depth, -primitive_min_z(prim.kind, prim.dims, frame));
    }
  }
  for (const ObjectShape& obj : scene.objects)
    depth = std::max(depth, -primitive_min_z(obj.kind, obj.scaled_dims(), obj.pose));

  // Object-object: each cloud probed against the other body's field, both
  // directions, so the result is symmetric in the pair order.
  const int nobj = scene.object_count();
  for (int i = 0; i < nobj; ++i) {
    const ObjectShape& a = scene.objects[i];
    for (int j = 0; j < nobj; ++j) {
      if (i == j) continue;
      const ObjectShape& b = scene.objects[j];
      const double reach = a.bounding_radius() + b.bounding_radius();
      if ((a.pose.position - b.pose.position).norm() > reach) continue;
      for (int r = 0; r < a.cloud_points.rows(); ++r) {
        const Vec3d x = a.pose.apply(a.cloud_points.row(r).transpose());
        depth = std::max(depth, -object_sdf(b, x));
      }
    }
  }

  return depth * 1000.0;
}

double diversity_deg(const std::vector<HandConfiguration>& grasps) {
  if (grasps.size() < 2) throw ConfigError("diversity needs at least two grasps");
  const Eigen::Index dof = grasps[0].q.size();
  for (const HandConfiguration& g : grasps)
    if (g.q.size() != dof) throw ConfigError("grasps disagree on joint count");
  if (dof == 0) return 0.0;

  const double n = static_cast<double>(grasps.size());
  const double to_deg = 180.0 / kPi;
  double acc = 0.0;
  for (Eigen::Index j = 0; j < dof; ++j) {
    double mean = 0.0;
    for (const HandConfiguration& g : grasps) mean += g.q[j];
    mean /= n;
    double var = 0.0;
    for (const HandConfiguration& g : grasps) {
      const double d = (g.q[j] - mean) * to_deg;
      var += d * d;
    }
    acc += var / n;
  }
  return acc / static_cast<double>(dof);
}

double contact_ratio(const HandModel& model, const HandConfiguration& cfg, const Scene& scene,
                     double contact_epsilon, int min_contacts, std::uint64_t surface_seed) {
  if (!(contact_epsilon > 0.0)) throw ConfigError("contact epsilon must be positive");
  if (min_contacts < 1) throw ConfigError("minimum contact count must be at least 1");
  if (scene.objects.empty()) return 0.0;

  const HandSurfacePoints surf = sample_hand_surface(model, cfg, surface_seed);
  int touched = 0;
  for (const ObjectShape& obj : scene.objects)
    if (touching_samples(surf, obj, contact_epsilon) >= min_contacts) ++touched;
  return static_cast<double>(touched) / static_cast<double>(scene.object_count());
}

QualityReport static_feasibility(const HandModel& model, const HandConfiguration& cfg,
                                 const Scene& scene, const FrictionModel& friction,
                                 const FilterThresholds& thresholds, std::uint64_t surface_seed) {
  friction.validate();
  thresholds.validate();

  QualityReport report;
  const HandSurfacePoints surf = sample_hand_surface(model, cfg, surface_seed);

  // Dense contact bands can hold hundreds of samples; the 6-D hull cost
  // explodes with wrench count, so Q1 uses at most this many contacts,
  // picked by a deterministic farthest-point sweep. A subset hull sits
  // inside the full one, so the reported Q1 only ever errs low.
  constexpr int kMaxQ1Contacts = 12;

  int touched = 0;
  double q1_min = std::numeric_limits<double>::infinity();
  for (const ObjectShape& obj : scene.objects) {
    std::vector<Vec3d> pts;
    std::vector<Vec3d> nrm;
    for (int i = 0; i < surf.count(); ++i) {
      const Vec3d x = surf.points.row(i).transpose();
      if (std::abs(object_sdf(obj, x)) > thresholds.contact_epsilon) continue;
      pts.push_back(x);
      nrm.push_back(-object_sdf_gradient(obj, x));
    }
    if (static_cast<int>(pts.size()) >= thresholds.min_contacts) ++touched;

    if (static_cast<int>(pts.size()) > kMaxQ1Contacts) {
      std::vector<int> keep;
      std::vector<double> dist(pts.size(), std::numeric_limits<double>::infinity());
      int pick = 0;
      for (size_t i = 1; i < pts.size(); ++i)
        if ((pts[i] - obj.pose.position).squaredNorm() >
            (pts[pick] - obj.pose.position).squaredNorm())
          pick = static_cast<int>(i);
      while (static_cast<int>(keep.size()) < kMaxQ1Contacts) {
        keep.push_back(pick);
        int next = -1;
        for (size_t i = 0; i < pts.size(); ++i) {
          dist[i] = std::min(dist[i], (pts[i] - pts[pick]).squaredNorm());
          if (dist[i] > 0.0 && (next < 0 || dist[i] > dist[next])) next = static_cast<int>(i);
        }
        if (next < 0) break;
        pick = next;
      }
      std::sort(keep.begin(), keep.end());
      std::vector<Vec3d> spts, snrm;
      for (int i : keep) {
        spts.push_back(pts[i]);
        snrm.push_back(nrm[i]);
      }
      pts.swap(spts);
      nrm.swap(snrm);
    }

    FrictionModel local = friction;
    if (local.torque_scale == 0.0) local.torque_scale = obj.bounding_radius();
    const double q1 = pts.empty() ? 0.0 : q1_metric(pts, nrm, obj.pose.position, local);
    report.q1_per_object.push_back(q1);
    q1_min = std::min(q1_min, q1);
  }

  report.q1_min = scene.objects.empty() ? 0.0 : q1_min;
  report.contact_ratio =
      scene.objects.empty() ? 0.0 : static_cast<double>(touched) / scene.object_count();
  report.penetration_mm = penetration_depth_mm(model, cfg, scene, surface_seed);
  report.feasible = report.q1_min > 0.0 &&
                    report.penetration_mm <= thresholds.max_penetration * 1000.0 &&
                    report.contact_ratio >= thresholds.min_contact_ratio;
  return report;
}

}  // namespace graspkit

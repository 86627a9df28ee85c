#include "graspkit/kinematics.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "graspkit/dual.hpp"
#include "graspkit/rng.hpp"

namespace graspkit {

std::vector<RigidTransform> forward_kinematics(const HandModel& model,
                                               const HandConfiguration& cfg) {
  if (cfg.q.size() != model.dof) throw ConfigError("configuration joint count mismatch");
  std::vector<PoseT<double>> poses;
  forward_kinematics_t<double>(model, to_pose_t<double>(cfg.base), cfg.q.data(), poses);
  std::vector<RigidTransform> out(poses.size());
  for (size_t i = 0; i < poses.size(); ++i) out[i] = from_pose(poses[i]);
  return out;
}

PointMatrix keypoints(const HandModel& model, const HandConfiguration& cfg) {
  if (model.keypoints.empty()) throw ConfigError("hand model declares no keypoints");
  std::vector<PoseT<double>> poses;
  forward_kinematics_t<double>(model, to_pose_t<double>(cfg.base), cfg.q.data(), poses);
  PointMatrix out(model.keypoints.size(), 3);
  for (size_t k = 0; k < model.keypoints.size(); ++k) {
    const KeypointSpec& kp = model.keypoints[k];
    out.row(k) = poses[kp.link].apply(kp.offset).transpose();
  }
  return out;
}

SurfaceSampleSet local_surface_samples(const HandModel& model, std::uint64_t seed) {
  SurfaceSampleSet set;
  int total = 0;
  for (const Link& l : model.links) total += l.surface_samples;
  set.points.resize(total, 3);
  set.normals.resize(total, 3);
  set.link.resize(total);
  int row = 0;
  for (size_t li = 0; li < model.links.size(); ++li) {
    const Link& link = model.links[li];
    if (link.surface_samples == 0) continue;
    Rng rng(derive_stream(seed, li));

    // Split the link budget across its primitives by area, largest remainder.
    std::vector<double> areas;
    double total_area = 0.0;
    for (const Primitive& p : link.collision) {
      areas.push_back(primitive_surface_area(p.kind, p.dims));
      total_area += areas.back();
    }
    std::vector<int> alloc(areas.size(), 0);
    int assigned = 0;
    std::vector<std::pair<double, size_t>> rema;
    for (size_t pi = 0; pi < areas.size(); ++pi) {
      const double exact = link.surface_samples * areas[pi] / total_area;
      alloc[pi] = static_cast<int>(exact);
      assigned += alloc[pi];
      rema.emplace_back(exact - alloc[pi], pi);
    }
    std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (int k = 0; assigned < link.surface_samples; ++k, ++assigned)
      alloc[rema[k % rema.size()].second] += 1;

    for (size_t pi = 0; pi < link.collision.size(); ++pi) {
      if (alloc[pi] == 0) continue;
      const Primitive& prim = link.collision[pi];
      PointMatrix pts, nrm;
      sample_primitive_surface(prim.kind, prim.dims, alloc[pi], rng, &pts, &nrm);
      for (int r = 0; r < pts.rows(); ++r, ++row) {
        set.points.row(row) = prim.origin.apply(pts.row(r).transpose()).transpose();
        set.normals.row(row) = prim.origin.rotate(nrm.row(r).transpose()).transpose();
        set.link[row] = static_cast<int>(li);
      }
    }
  }
  return set;
}

HandSurfacePoints sample_hand_surface(const HandModel& model, const HandConfiguration& cfg,
                                      std::uint64_t seed) {
  HandSurfacePoints out;
  out.local = local_surface_samples(model, seed);
  const int n = out.local.count();
  out.points.resize(n, 3);
  out.normals.resize(n, 3);
  out.link = out.local.link;
  std::vector<PoseT<double>> poses;
  forward_kinematics_t<double>(model, to_pose_t<double>(cfg.base), cfg.q.data(), poses);
  for (int i = 0; i < n; ++i) {
    const PoseT<double>& pose = poses[out.local.link[i]];
    out.points.row(i) = pose.apply(out.local.points.row(i).transpose()).transpose();
    out.normals.row(i) = pose.rotate(out.local.normals.row(i).transpose()).transpose();
  }
  return out;
}

IkResult solve_ik(const HandModel& model, const PointMatrix& targets,
                  const HandConfiguration& initial) {
  if (targets.rows() != static_cast<Eigen::Index>(model.keypoints.size()))
    throw ConfigError("target count does not match keypoint count");
  if (!targets.allFinite()) throw ConfigError("ik targets must be finite");
  if (initial.q.size() != model.dof) throw ConfigError("configuration joint count mismatch");

  const int kp_count = static_cast<int>(model.keypoints.size());
  const int dims = 6 + model.dof;
  if (dims > kMaxTangent)
    throw ConfigError("hand has more degrees of freedom than the ik tangent budget");

  HandConfiguration cfg = initial;
  cfg.q = clamp_joints(model, cfg.q);

  const auto residual_of = [&](const HandConfiguration& c) {
    const PointMatrix kp = keypoints(model, c);
    return std::sqrt((kp - targets).rowwise().squaredNorm().mean());
  };

  double lambda = 1e-3;
  int iterations = 0;
  for (int it = 0; it < 200; ++it) {
    iterations = it + 1;
    // One dual pass gives all keypoints and the full Jacobian.
    PoseT<DualG> base;
    const Mat3d r0 = cfg.base.rotation();
    Vec3<DualG> omega;
    for (int i = 0; i < 3; ++i) {
      base.p[i] = DualG::seeded(cfg.base.position[i], i);
      omega[i] = DualG::seeded(0.0, 3 + i);
    }
    base.R = Mat3<DualG>(exp_so3(omega) * r0.cast<DualG>());
    std::vector<DualG> q(model.dof);
    for (int i = 0; i < model.dof; ++i) q[i] = DualG::seeded(cfg.q[i], 6 + i);

    std::vector<PoseT<DualG>> poses;
    forward_kinematics_t<DualG>(model, base, q.data(), poses);

    Eigen::MatrixXd jac(3 * kp_count, dims);
    VecXd res(3 * kp_count);
    for (int k = 0; k < kp_count; ++k) {
      const KeypointSpec& spec = model.keypoints[k];
      const Vec3<DualG> world = poses[spec.link].apply(spec.offset.cast<DualG>());
      for (int c = 0; c < 3; ++c) {
        res[3 * k + c] = world[c].v - targets(k, c);
        jac.row(3 * k + c) = world[c].g.head(dims).transpose();
      }
    }

    const double err_before = res.squaredNorm();
    bool stepped = false;
    for (int attempt = 0; attempt < 8 && !stepped; ++attempt) {
      Eigen::MatrixXd h = jac.transpose() * jac;
      h.diagonal().array() += lambda;
      const VecXd delta = h.ldlt().solve(-jac.transpose() * res);
      if (!delta.allFinite()) {
        lambda *= 4.0;
        continue;
      }
      HandConfiguration trial = cfg;
      trial.base.position += delta.head<3>();
      const Vec3d w = delta.segment<3>(3);
      trial.base.orientation =
          (Eigen::Quaterniond(Eigen::AngleAxisd(w.norm(), w.norm() > 1e-16 ? Vec3d(w / w.norm())
                                                                           : Vec3d::UnitZ())) *
           cfg.base.orientation)
              .normalized();
      trial.q = clamp_joints(model, cfg.q + delta.tail(model.dof));

      const PointMatrix kp_trial = keypoints(model, trial);
      const double err_after = (kp_trial - targets).squaredNorm();
      if (err_after <= err_before) {
        cfg = trial;
        lambda = std::max(1e-9, lambda * 0.5);
        stepped = true;
        if (delta.norm() < 1e-8) return {cfg, residual_of(cfg), iterations};
      } else {
        lambda *= 4.0;
      }
    }
    if (!stepped) break;  // damping saturated; accept the local minimizer
  }
  return {cfg, residual_of(cfg), iterations};
}

}  // namespace graspkit

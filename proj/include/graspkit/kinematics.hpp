#pragma once

#include <cstdint>
#include <vector>

#include "graspkit/errors.hpp"
#include "graspkit/hand_model.hpp"
#include "graspkit/so3.hpp"

namespace graspkit {

// World poses of every link, templated so dual scalars flow through. q must
// hold model.dof entries.
template <class T>
void forward_kinematics_t(const HandModel& model, const PoseT<T>& base, const T* q,
                          std::vector<PoseT<T>>& out) {
  const size_t n = model.links.size();
  out.resize(n);
  for (size_t i = 0; i < n; ++i) {
    const Link& link = model.links[i];
    PoseT<T> local = to_pose_t<T>(link.origin);
    if (link.joint == JointKind::Revolute) {
      local.R = Mat3<T>(local.R * axis_angle_rotation(link.axis, q[model.joint_index[i]]));
    }
    out[i] = (link.parent < 0 ? base : out[link.parent]) * local;
  }
}

std::vector<RigidTransform> forward_kinematics(const HandModel& model,
                                               const HandConfiguration& cfg);

PointMatrix keypoints(const HandModel& model, const HandConfiguration& cfg);

// Material surface points in link-local frames. Fixed for a given
// (model, seed); world positions under any configuration come from FK.
struct SurfaceSampleSet {
  std::vector<int> link;  // per sample
  PointMatrix points;     // link frame
  PointMatrix normals;    // link frame, outward
  int count() const { return static_cast<int>(points.rows()); }
};

SurfaceSampleSet local_surface_samples(const HandModel& model, std::uint64_t seed);

// World-frame snapshot of the sample set under one configuration.
struct HandSurfacePoints {
  PointMatrix points;   // world
  PointMatrix normals;  // world, outward
  std::vector<int> link;
  SurfaceSampleSet local;
  int count() const { return static_cast<int>(points.rows()); }
};

HandSurfacePoints sample_hand_surface(const HandModel& model, const HandConfiguration& cfg,
                                      std::uint64_t seed);

struct IkResult {
  HandConfiguration cfg;
  double rms_residual = 0.0;  // meters, over keypoints
  int iterations = 0;
};

// Damped least-squares IK over (base pose, joints) minimizing mean squared
// keypoint distance; joints are clamped to limits every step. Unreachable
// targets converge to the clamped local minimizer and report the residual.
IkResult solve_ik(const HandModel& model, const PointMatrix& targets,
                  const HandConfiguration& initial);

}  // namespace graspkit

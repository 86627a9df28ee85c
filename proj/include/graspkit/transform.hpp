#pragma once

#include <Eigen/Geometry>

#include "graspkit/so3.hpp"
#include "graspkit/types.hpp"

namespace graspkit {

// Rigid body pose, quaternion-backed. This is the serialized representation;
// templated pipelines convert to PoseT once and work with rotation matrices.
struct RigidTransform {
  Vec3d position = Vec3d::Zero();
  Eigen::Quaterniond orientation = Eigen::Quaterniond::Identity();

  static RigidTransform identity() { return {}; }

  Vec3d apply(const Vec3d& p) const { return orientation * p + position; }
  Vec3d rotate(const Vec3d& v) const { return orientation * v; }
  Mat3d rotation() const { return orientation.toRotationMatrix(); }

  RigidTransform operator*(const RigidTransform& o) const {
    RigidTransform r;
    r.orientation = orientation * o.orientation;
    r.position = orientation * o.position + position;
    return r;
  }

  RigidTransform inverse() const {
    RigidTransform r;
    r.orientation = orientation.conjugate();
    r.position = -(r.orientation * position);
    return r;
  }

  void normalize() { orientation.normalize(); }
};

inline RigidTransform make_transform(const Vec3d& p, const Eigen::Quaterniond& q) {
  RigidTransform t;
  t.position = p;
  t.orientation = q.normalized();
  return t;
}

// Matrix-form pose over an arbitrary scalar, used throughout the
// differentiable pipeline.
template <class T>
struct PoseT {
  Mat3<T> R = Mat3<T>::Identity();
  Vec3<T> p = Vec3<T>::Zero();

  Vec3<T> apply(const Vec3<T>& x) const { return R * x + p; }
  Vec3<T> rotate(const Vec3<T>& v) const { return R * v; }
  Vec3<T> untransform(const Vec3<T>& x) const { return R.transpose() * (x - p); }

  PoseT operator*(const PoseT& o) const {
    PoseT r;
    r.R = R * o.R;
    r.p = R * o.p + p;
    return r;
  }
};

template <class T>
inline PoseT<T> to_pose_t(const RigidTransform& t) {
  PoseT<T> out;
  const Mat3d r = t.rotation();
  for (int i = 0; i < 3; ++i) {
    out.p[i] = T(t.position[i]);
    for (int j = 0; j < 3; ++j) out.R(i, j) = T(r(i, j));
  }
  return out;
}

inline RigidTransform from_pose(const PoseT<double>& p) {
  RigidTransform t;
  t.position = p.p;
  t.orientation = Eigen::Quaterniond(p.R).normalized();
  return t;
}

}  // namespace graspkit

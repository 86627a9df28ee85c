#pragma once

#include <cmath>

#include "graspkit/dual.hpp"
#include "graspkit/types.hpp"

namespace graspkit {

template <class T>
inline Mat3<T> skew(const Vec3<T>& w) {
  Mat3<T> k;
  k << T(0.0), -w.z(), w.y(), w.z(), T(0.0), -w.x(), -w.y(), w.x(), T(0.0);
  return k;
}

// Rotation about a fixed unit axis (model data, plain doubles) by a possibly
// dual angle. Written elementwise so mixed scalar products stay cheap.
template <class T>
inline Mat3<T> axis_angle_rotation(const Vec3d& axis, const T& angle) {
  using std::cos;
  using std::sin;
  const T s = sin(angle);
  const T c = cos(angle);
  const T one_c = T(1.0) - c;
  const double x = axis.x(), y = axis.y(), z = axis.z();
  Mat3<T> r;
  r(0, 0) = c + one_c * (x * x);
  r(0, 1) = one_c * (x * y) - s * z;
  r(0, 2) = one_c * (x * z) + s * y;
  r(1, 0) = one_c * (y * x) + s * z;
  r(1, 1) = c + one_c * (y * y);
  r(1, 2) = one_c * (y * z) - s * x;
  r(2, 0) = one_c * (z * x) - s * y;
  r(2, 1) = one_c * (z * y) + s * x;
  r(2, 2) = c + one_c * (z * z);
  return r;
}

// Matrix exponential on SO(3). Series branch keeps derivatives exact through
// theta = 0 when T is a dual type.
template <class T>
inline Mat3<T> exp_so3(const Vec3<T>& w) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const T theta_sq = w.squaredNorm();
  T a, b;  // sin(t)/t and (1-cos(t))/t^2
  if (value_of(theta_sq) < 1e-12) {
    a = T(1.0) - theta_sq / 6.0 + theta_sq * theta_sq / 120.0;
    b = T(0.5) - theta_sq / 24.0 + theta_sq * theta_sq / 720.0;
  } else {
    const T theta = sqrt(theta_sq);
    a = sin(theta) / theta;
    b = (T(1.0) - cos(theta)) / theta_sq;
  }
  const Mat3<T> k = skew(w);
  return Mat3<T>(Mat3<T>::Identity() + a * k + b * (k * k));
}

// Log map on SO(3), principal branch with |w| <= pi. The angle comes from
// whichever of asin/acos is well conditioned in the regime, and the scale
// factor uses the skew norm directly so no precision is lost dividing by a
// reconstructed sine. The near-pi branch recovers the axis from the diagonal.
inline Vec3d log_so3(const Mat3d& r) {
  Vec3d ats(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  const double n = ats.norm();  // 2 sin(theta)
  const double ct = std::min(1.0, std::max(-1.0, (r.trace() - 1.0) * 0.5));
  if (ct >= 0.0) {
    // theta in [0, pi/2]
    if (n < 1e-12) return 0.5 * ats;
    const double theta = std::asin(std::min(1.0, 0.5 * n));
    return (theta / n) * ats;
  }
  if (ct > -1.0 + 1e-9) {
    // theta in (pi/2, pi - ~4.5e-5); sin(theta) is comfortably nonzero
    const double theta = std::acos(ct);
    return (theta / n) * ats;
  }
  // Near pi the skew part vanishes; take the axis from the symmetric part.
  const double theta = M_PI - std::asin(std::min(1.0, 0.5 * n));
  Vec3d sq = ((r.diagonal().array() + 1.0) * 0.5).max(0.0).sqrt().matrix();
  int k;
  sq.maxCoeff(&k);
  Vec3d axis = sq;
  const int i = (k + 1) % 3, j = (k + 2) % 3;
  axis[i] = (r(k, i) + r(i, k)) / (4.0 * sq[k]);
  axis[j] = (r(k, j) + r(j, k)) / (4.0 * sq[k]);
  // Orient so that the (tiny) skew part agrees; at exactly pi either sign
  // names the same rotation.
  if (axis.dot(ats) < 0.0) axis = -axis;
  return theta * axis.normalized();
}

}  // namespace graspkit

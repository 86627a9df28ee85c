#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "graspkit/errors.hpp"
#include "graspkit/rng.hpp"
#include "graspkit/transform.hpp"
#include "graspkit/types.hpp"

namespace graspkit {

enum class PrimitiveKind { Sphere, Box, Cylinder, Capsule };

const char* primitive_kind_name(PrimitiveKind k);
PrimitiveKind primitive_kind_from_name(const std::string& name);

// Convex solid in a canonical frame (axis of symmetry = z).
// dims convention:
//   sphere:   dims[0] = radius
//   box:      dims = half extents (hx, hy, hz)
//   cylinder: dims[0] = radius, dims[1] = half height
//   capsule:  dims[0] = radius, dims[1] = half length of the core segment
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Sphere;
  Vec3d dims = Vec3d::Zero();
  RigidTransform origin;  // canonical frame expressed in the parent frame

  void validate() const;
};

template <class T>
inline T clamp_value(const T& x, double lo, double hi) {
  if (x < lo) return T(lo);
  if (x > hi) return T(hi);
  return x;
}

namespace detail {

template <class T>
inline T hypot3(const T& x, const T& y, const T& z) {
  using std::sqrt;
  return sqrt(x * x + y * y + z * z);
}

}  // namespace detail

// Exact signed distance in the canonical frame. Negative inside. The
// expressions below are the standard closed forms for each solid; every
// branch is on scalar values, so dual inputs get the a.e.-correct derivative.
template <class T>
T primitive_sdf(PrimitiveKind kind, const Vec3d& dims, const Vec3<T>& p) {
  using std::sqrt;
  switch (kind) {
    case PrimitiveKind::Sphere: {
      return detail::hypot3(p.x(), p.y(), p.z()) - dims[0];
    }
    case PrimitiveKind::Box: {
      using std::abs;
      const T qx = abs(p.x()) - dims[0];
      const T qy = abs(p.y()) - dims[1];
      const T qz = abs(p.z()) - dims[2];
      using std::max;
      using std::min;
      const T inside = min(max(qx, max(qy, qz)), T(0.0));
      // Interior points: the clamped outside vector is identically zero on a
      // neighborhood, and differentiating hypot3 at the origin would poison
      // dual tangents with 0/0.
      if (value_of(qx) <= 0.0 && value_of(qy) <= 0.0 && value_of(qz) <= 0.0) return inside;
      const T ox = max(qx, T(0.0));
      const T oy = max(qy, T(0.0));
      const T oz = max(qz, T(0.0));
      return detail::hypot3(ox, oy, oz) + inside;
    }
    case PrimitiveKind::Cylinder: {
      using std::abs;
      using std::max;
      using std::min;
      const T dr = sqrt(p.x() * p.x() + p.y() * p.y()) - dims[0];
      const T dz = abs(p.z()) - dims[1];
      const T core = min(max(dr, dz), T(0.0));
      // Same interior guard as the box above.
      if (value_of(dr) <= 0.0 && value_of(dz) <= 0.0) return core;
      const T orr = max(dr, T(0.0));
      const T oz = max(dz, T(0.0));
      return core + sqrt(orr * orr + oz * oz);
    }
    case PrimitiveKind::Capsule: {
      const T cz = clamp_value(p.z(), -dims[1], dims[1]);
      return detail::hypot3(p.x(), p.y(), p.z() - cz) - dims[0];
    }
  }
  throw NumericalError("unknown primitive kind");
}

// Outward unit gradient of the canonical SDF. Exact away from the medial
// axis; on the axis itself a fixed fallback direction is returned. With a
// dual scalar the returned vector also carries the curvature information
// (the derivative of the normal with respect to the query point).
template <class T>
Vec3<T> primitive_sdf_gradient(PrimitiveKind kind, const Vec3d& dims, const Vec3<T>& p) {
  using std::sqrt;
  const Vec3<T> fallback(T(0.0), T(0.0), T(1.0));
  switch (kind) {
    case PrimitiveKind::Sphere: {
      const T n = detail::hypot3(p.x(), p.y(), p.z());
      if (value_of(n) < 1e-12) return fallback;
      return Vec3<T>(p.x() / n, p.y() / n, p.z() / n);
    }
    case PrimitiveKind::Box: {
      using std::abs;
      using std::max;
      const T qx = abs(p.x()) - dims[0];
      const T qy = abs(p.y()) - dims[1];
      const T qz = abs(p.z()) - dims[2];
      const double sx = value_of(p.x()) < 0.0 ? -1.0 : 1.0;
      const double sy = value_of(p.y()) < 0.0 ? -1.0 : 1.0;
      const double sz = value_of(p.z()) < 0.0 ? -1.0 : 1.0;
      if (value_of(qx) <= 0.0 && value_of(qy) <= 0.0 && value_of(qz) <= 0.0) {
        // Inside: gradient is the face normal of the nearest face (constant).
        if (value_of(qx) >= value_of(qy) && value_of(qx) >= value_of(qz))
          return Vec3<T>(T(sx), T(0.0), T(0.0));
        if (value_of(qy) >= value_of(qz)) return Vec3<T>(T(0.0), T(sy), T(0.0));
        return Vec3<T>(T(0.0), T(0.0), T(sz));
      }
      const T ox = max(qx, T(0.0));
      const T oy = max(qy, T(0.0));
      const T oz = max(qz, T(0.0));
      const T n = detail::hypot3(ox, oy, oz);
      return Vec3<T>(sx * ox / n, sy * oy / n, sz * oz / n);
    }
    case PrimitiveKind::Cylinder: {
      using std::abs;
      const T rr = sqrt(p.x() * p.x() + p.y() * p.y());
      const T dr = rr - dims[0];
      const T dz = abs(p.z()) - dims[1];
      const double sz = value_of(p.z()) < 0.0 ? -1.0 : 1.0;
      const bool radial_dir_ok = value_of(rr) > 1e-12;
      Vec3<T> radial = radial_dir_ok ? Vec3<T>(p.x() / rr, p.y() / rr, T(0.0))
                                     : Vec3<T>(T(1.0), T(0.0), T(0.0));
      if (value_of(dr) <= 0.0 && value_of(dz) <= 0.0) {
        // Inside: nearest face is either the wall or a cap.
        if (value_of(dr) >= value_of(dz)) return radial;
        return Vec3<T>(T(0.0), T(0.0), T(sz));
      }
      if (value_of(dr) <= 0.0) return Vec3<T>(T(0.0), T(0.0), T(sz));
      if (value_of(dz) <= 0.0) return radial;
      // Rim region: combine the two outward components.
      const T n = sqrt(dr * dr + dz * dz);
      const T wr = dr / n;
      const T wz = dz / n;
      return Vec3<T>(wr * radial.x(), wr * radial.y(), sz * wz);
    }
    case PrimitiveKind::Capsule: {
      const T cz = clamp_value(p.z(), -dims[1], dims[1]);
      const T ux = p.x();
      const T uy = p.y();
      const T uz = p.z() - cz;
      const T n = detail::hypot3(ux, uy, uz);
      if (value_of(n) < 1e-12) return fallback;
      return Vec3<T>(ux / n, uy / n, uz / n);
    }
  }
  throw NumericalError("unknown primitive kind");
}

double primitive_surface_area(PrimitiveKind kind, const Vec3d& dims);

// Area-stratified surface samples in the canonical frame. Sub-surfaces (box
// faces, cylinder wall/caps, capsule wall/end caps) get counts proportional
// to area; points and outward normals come back row-per-sample.
void sample_primitive_surface(PrimitiveKind kind, const Vec3d& dims, int count, Rng& rng,
                              PointMatrix* points, PointMatrix* normals);

// Closest-point parameters between two segments, branch structure after
// Ericson. Returns (s, t) in [0,1]^2; works for degenerate (point) segments.
template <class T>
void segment_segment_closest(const Vec3<T>& p1, const Vec3<T>& q1, const Vec3<T>& p2,
                             const Vec3<T>& q2, T* s_out, T* t_out) {
  const Vec3<T> d1 = q1 - p1;
  const Vec3<T> d2 = q2 - p2;
  const Vec3<T> r = p1 - p2;
  const T a = d1.squaredNorm();
  const T e = d2.squaredNorm();
  const T f = d2.dot(r);
  const double tiny = 1e-18;
  T s(0.0), t(0.0);
  if (value_of(a) <= tiny && value_of(e) <= tiny) {
    // both degenerate
  } else if (value_of(a) <= tiny) {
    t = clamp_value(f / e, 0.0, 1.0);
  } else {
    const T c = d1.dot(r);
    if (value_of(e) <= tiny) {
      s = clamp_value(-c / a, 0.0, 1.0);
    } else {
      const T b = d1.dot(d2);
      const T denom = a * e - b * b;
      if (value_of(denom) > tiny) {
        s = clamp_value((b * f - c * e) / denom, 0.0, 1.0);
      }
      t = (b * s + f) / e;
      if (value_of(t) < 0.0) {
        t = T(0.0);
        s = clamp_value(-c / a, 0.0, 1.0);
      } else if (value_of(t) > 1.0) {
        t = T(1.0);
        s = clamp_value((b - c) / a, 0.0, 1.0);
      }
    }
  }
  *s_out = s;
  *t_out = t;
}

namespace detail {

// Capsule (or sphere as a zero-length capsule) axis segment in parent frame.
template <class T>
inline void axis_segment(const Primitive& prim, const PoseT<T>& pose, Vec3<T>* a, Vec3<T>* b) {
  const PoseT<T> frame = pose * to_pose_t<T>(prim.origin);
  const double hh = prim.kind == PrimitiveKind::Sphere ? 0.0 : prim.dims[1];
  *a = frame.apply(Vec3<T>(T(0.0), T(0.0), T(-hh)));
  *b = frame.apply(Vec3<T>(T(0.0), T(0.0), T(hh)));
}

template <class T>
inline T capsule_capsule_distance(const Primitive& pa, const PoseT<T>& ta, const Primitive& pb,
                                  const PoseT<T>& tb) {
  Vec3<T> a0, a1, b0, b1;
  axis_segment(pa, ta, &a0, &a1);
  axis_segment(pb, tb, &b0, &b1);
  T s, t;
  segment_segment_closest(a0, a1, b0, b1, &s, &t);
  const Vec3<T> ca = a0 + s * (a1 - a0);
  const Vec3<T> cb = b0 + t * (b1 - b0);
  return hypot3((ca - cb).x(), (ca - cb).y(), (ca - cb).z()) - pa.dims[0] - pb.dims[0];
}

// Minimum of a convex solid's SDF along the capsule axis by ternary search;
// outside the solid the SDF is convex, so its restriction to a segment is
// convex in t. Interval endpoints are constants, so the converged t is
// effectively frozen and the returned value differentiates by the envelope
// rule. Valid for box and cylinder partners (the round-round pairs have a
// cheaper closed form).
template <class T>
inline T capsule_convex_distance(const Primitive& cap, const PoseT<T>& tcap,
                                 const Primitive& solid, const PoseT<T>& tsolid) {
  Vec3<T> a, b;
  axis_segment(cap, tcap, &a, &b);
  const PoseT<T> frame = tsolid * to_pose_t<T>(solid.origin);
  const Vec3<T> la = frame.untransform(a);
  const Vec3<T> lb = frame.untransform(b);
  // The minimizer is located on values alone; only the final evaluation at
  // the frozen parameter needs tangent arithmetic.
  const Vec3d lav(value_of(la.x()), value_of(la.y()), value_of(la.z()));
  const Vec3d lbv(value_of(lb.x()), value_of(lb.y()), value_of(lb.z()));
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 80; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const Vec3d x1 = lav + m1 * (lbv - lav);
    const Vec3d x2 = lav + m2 * (lbv - lav);
    if (primitive_sdf(solid.kind, solid.dims, x1) <= primitive_sdf(solid.kind, solid.dims, x2))
      hi = m2;
    else
      lo = m1;
  }
  const double tm = 0.5 * (lo + hi);
  const Vec3<T> xm = la + T(tm) * (lb - la);
  return primitive_sdf(solid.kind, solid.dims, xm) - cap.dims[0];
}

}  // namespace detail

// Fixed local surface grid used by the sampled pair-distance fallback.
const PointMatrix& fallback_surface_grid(const Primitive& prim);

// Signed clearance between two posed primitives. Exact for disjoint pairs
// whenever at least one side is a sphere or capsule (closed form against the
// other round shape, convex 1-D search against box/cylinder); box-box,
// box-cylinder, and cylinder-cylinder use a sampled fallback (min over one
// surface of the other's SDF, both directions) and are approximate at the
// sampling resolution. Negative means overlap.
template <class T>
T primitive_pair_distance(const Primitive& a, const PoseT<T>& ta, const Primitive& b,
                          const PoseT<T>& tb) {
  const auto is_round = [](PrimitiveKind k) {
    return k == PrimitiveKind::Sphere || k == PrimitiveKind::Capsule;
  };
  if (is_round(a.kind) && is_round(b.kind)) {
    return detail::capsule_capsule_distance(a, ta, b, tb);
  }
  if (is_round(a.kind)) {
    return detail::capsule_convex_distance(a, ta, b, tb);
  }
  if (is_round(b.kind)) {
    return detail::capsule_convex_distance(b, tb, a, ta);
  }
  // Sampled fallback: evaluate each primitive's SDF at the other's surface
  // grid and keep the smallest value seen.
  using std::min;
  T best(1e30);
  const PointMatrix& ga = fallback_surface_grid(a);
  const PoseT<T> fa = ta * to_pose_t<T>(a.origin);
  const PoseT<T> fb = tb * to_pose_t<T>(b.origin);
  for (int i = 0; i < ga.rows(); ++i) {
    const Vec3<T> world = fa.apply(Vec3<T>(T(ga(i, 0)), T(ga(i, 1)), T(ga(i, 2))));
    best = min(best, primitive_sdf(b.kind, b.dims, fb.untransform(world)));
  }
  const PointMatrix& gb = fallback_surface_grid(b);
  for (int i = 0; i < gb.rows(); ++i) {
    const Vec3<T> world = fb.apply(Vec3<T>(T(gb(i, 0)), T(gb(i, 1)), T(gb(i, 2))));
    best = min(best, primitive_sdf(a.kind, a.dims, fa.untransform(world)));
  }
  return best;
}

}  // namespace graspkit

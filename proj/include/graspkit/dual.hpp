#pragma once

#include <Eigen/Core>
#include <cmath>
#include <ostream>

namespace graspkit {

// Tag for constructing a Dual whose tangent storage is left unset. Every
// arithmetic operator assigns both members before returning its result, so
// the default zero-fill there would be pure waste on the hot path.
struct DualUninit {};

// Forward-mode scalar carrying a value and a fixed-capacity tangent vector.
// The energy pipeline is templated on the scalar type; instantiating it with
// Dual<N> yields exact first derivatives with respect to up to N seeded
// inputs in a single evaluation. Unused tangent slots stay zero.
template <int N>
struct Dual {
  using Tangent = Eigen::Matrix<double, N, 1>;

  double v = 0.0;
  Tangent g = Tangent::Zero();

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: implicit so constants mix freely
  explicit Dual(DualUninit) : g() {}

  static Dual seeded(double value, int slot) {
    Dual d(value);
    d.g[slot] = 1.0;
    return d;
  }

  Dual operator-() const {
    Dual r{DualUninit{}};
    r.v = -v;
    r.g = -g;
    return r;
  }

  Dual& operator+=(const Dual& o) {
    v += o.v;
    g += o.g;
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    g -= o.g;
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    g = g * o.v + o.g * v;
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    const double inv = 1.0 / o.v;
    v *= inv;
    g = (g - o.g * v) * inv;
    return *this;
  }
  Dual& operator+=(double s) {
    v += s;
    return *this;
  }
  Dual& operator-=(double s) {
    v -= s;
    return *this;
  }
  Dual& operator*=(double s) {
    v *= s;
    g *= s;
    return *this;
  }
  Dual& operator/=(double s) {
    v /= s;
    g /= s;
    return *this;
  }
};

template <int N>
inline Dual<N> operator+(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r{DualUninit{}};
  r.v = a.v + b.v;
  r.g = a.g + b.g;
  return r;
}
template <int N>
inline Dual<N> operator+(const Dual<N>& a, double b) {
  Dual<N> r = a;
  r.v += b;
  return r;
}
template <int N>
inline Dual<N> operator+(double a, const Dual<N>& b) {
  return b + a;
}

template <int N>
inline Dual<N> operator-(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r{DualUninit{}};
  r.v = a.v - b.v;
  r.g = a.g - b.g;
  return r;
}
template <int N>
inline Dual<N> operator-(const Dual<N>& a, double b) {
  Dual<N> r = a;
  r.v -= b;
  return r;
}
template <int N>
inline Dual<N> operator-(double a, const Dual<N>& b) {
  Dual<N> r{DualUninit{}};
  r.v = a - b.v;
  r.g = -b.g;
  return r;
}

template <int N>
inline Dual<N> operator*(const Dual<N>& a, const Dual<N>& b) {
  Dual<N> r{DualUninit{}};
  r.v = a.v * b.v;
  r.g = a.g * b.v + b.g * a.v;
  return r;
}
template <int N>
inline Dual<N> operator*(const Dual<N>& a, double b) {
  Dual<N> r{DualUninit{}};
  r.v = a.v * b;
  r.g = a.g * b;
  return r;
}
template <int N>
inline Dual<N> operator*(double a, const Dual<N>& b) {
  return b * a;
}

template <int N>
inline Dual<N> operator/(const Dual<N>& a, const Dual<N>& b) {
  const double inv = 1.0 / b.v;
  Dual<N> r{DualUninit{}};
  r.v = a.v * inv;
  r.g = (a.g - b.g * r.v) * inv;
  return r;
}
template <int N>
inline Dual<N> operator/(const Dual<N>& a, double b) {
  return a * (1.0 / b);
}
template <int N>
inline Dual<N> operator/(double a, const Dual<N>& b) {
  const double inv = 1.0 / b.v;
  Dual<N> r{DualUninit{}};
  r.v = a * inv;
  r.g = b.g * (-r.v * inv);
  return r;
}

// Comparisons look only at values; derivative kinks at branch points have
// measure zero and downstream code treats them as such.
template <int N>
inline bool operator<(const Dual<N>& a, const Dual<N>& b) {
  return a.v < b.v;
}
template <int N>
inline bool operator<(const Dual<N>& a, double b) {
  return a.v < b;
}
template <int N>
inline bool operator<(double a, const Dual<N>& b) {
  return a < b.v;
}
template <int N>
inline bool operator>(const Dual<N>& a, const Dual<N>& b) {
  return a.v > b.v;
}
template <int N>
inline bool operator>(const Dual<N>& a, double b) {
  return a.v > b;
}
template <int N>
inline bool operator>(double a, const Dual<N>& b) {
  return a > b.v;
}
template <int N>
inline bool operator<=(const Dual<N>& a, const Dual<N>& b) {
  return a.v <= b.v;
}
template <int N>
inline bool operator<=(const Dual<N>& a, double b) {
  return a.v <= b;
}
template <int N>
inline bool operator<=(double a, const Dual<N>& b) {
  return a <= b.v;
}
template <int N>
inline bool operator>=(const Dual<N>& a, const Dual<N>& b) {
  return a.v >= b.v;
}
template <int N>
inline bool operator>=(const Dual<N>& a, double b) {
  return a.v >= b;
}
template <int N>
inline bool operator>=(double a, const Dual<N>& b) {
  return a >= b.v;
}
template <int N>
inline bool operator==(const Dual<N>& a, const Dual<N>& b) {
  return a.v == b.v;
}
template <int N>
inline bool operator!=(const Dual<N>& a, const Dual<N>& b) {
  return a.v != b.v;
}

template <int N>
inline Dual<N> sqrt(const Dual<N>& a) {
  Dual<N> r{DualUninit{}};
  r.v = std::sqrt(a.v);
  r.g = a.g * (0.5 / r.v);
  return r;
}
template <int N>
inline Dual<N> abs(const Dual<N>& a) {
  return a.v < 0.0 ? -a : a;
}
template <int N>
inline Dual<N> sin(const Dual<N>& a) {
  Dual<N> r{DualUninit{}};
  r.v = std::sin(a.v);
  r.g = a.g * std::cos(a.v);
  return r;
}
template <int N>
inline Dual<N> cos(const Dual<N>& a) {
  Dual<N> r{DualUninit{}};
  r.v = std::cos(a.v);
  r.g = a.g * (-std::sin(a.v));
  return r;
}
template <int N>
inline Dual<N> exp(const Dual<N>& a) {
  Dual<N> r{DualUninit{}};
  r.v = std::exp(a.v);
  r.g = a.g * r.v;
  return r;
}
template <int N>
inline Dual<N> log(const Dual<N>& a) {
  Dual<N> r{DualUninit{}};
  r.v = std::log(a.v);
  r.g = a.g / a.v;
  return r;
}
template <int N>
inline Dual<N> atan2(const Dual<N>& y, const Dual<N>& x) {
  Dual<N> r{DualUninit{}};
  r.v = std::atan2(y.v, x.v);
  const double denom = x.v * x.v + y.v * y.v;
  r.g = (y.g * x.v - x.g * y.v) / denom;
  return r;
}
template <int N>
inline const Dual<N>& min(const Dual<N>& a, const Dual<N>& b) {
  return b.v < a.v ? b : a;
}
template <int N>
inline const Dual<N>& max(const Dual<N>& a, const Dual<N>& b) {
  return a.v < b.v ? b : a;
}
template <int N>
inline bool isfinite(const Dual<N>& a) {
  return std::isfinite(a.v) && a.g.allFinite();
}
template <int N>
inline std::ostream& operator<<(std::ostream& os, const Dual<N>& a) {
  return os << a.v;
}

// Plain-double overloads so templated code can call these unqualified on any
// supported scalar.
inline double value_of(double x) { return x; }
template <int N>
inline double value_of(const Dual<N>& x) {
  return x.v;
}
inline long double value_of(long double x) { return static_cast<double>(x); }

// Tangent capacity used by the energy pipeline: 6 base pose + joint count.
inline constexpr int kMaxTangent = 32;
using DualG = Dual<kMaxTangent>;

}  // namespace graspkit

namespace Eigen {

template <int N>
struct NumTraits<graspkit::Dual<N>> : NumTraits<double> {
  using Real = graspkit::Dual<N>;
  using NonInteger = graspkit::Dual<N>;
  using Nested = graspkit::Dual<N>;
  using Literal = double;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1 + N,
    AddCost = 1 + N,
    MulCost = 3 + 2 * N,
  };
  static inline Real epsilon() { return Real(NumTraits<double>::epsilon()); }
  static inline Real dummy_precision() { return Real(NumTraits<double>::dummy_precision()); }
  static inline Real highest() { return Real(NumTraits<double>::highest()); }
  static inline Real lowest() { return Real(NumTraits<double>::lowest()); }
  static inline int digits10() { return NumTraits<double>::digits10(); }
};

template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<graspkit::Dual<N>, double, BinaryOp> {
  using ReturnType = graspkit::Dual<N>;
};
template <int N, typename BinaryOp>
struct ScalarBinaryOpTraits<double, graspkit::Dual<N>, BinaryOp> {
  using ReturnType = graspkit::Dual<N>;
};

}  // namespace Eigen

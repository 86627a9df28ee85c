#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "graspkit/errors.hpp"
#include "graspkit/metrics.hpp"
#include "graspkit/rng.hpp"

namespace graspkit {

namespace {

constexpr double kVisibleTol = 1e-9;

struct Facet {
  std::array<int, 6> v{};
  Vec6d n = Vec6d::Zero();
  double off = 0.0;
  bool alive = true;
};

// Hyperplane through six points, oriented away from `interior`. Fails when
// the points are affinely degenerate or the reference sits on the plane.
bool facet_plane(const std::vector<Vec6d>& pts, const std::array<int, 6>& vs,
                 const Vec6d& interior, Vec6d* n, double* off) {
  Eigen::Matrix<double, 5, 6> edges;
  for (int k = 1; k < 6; ++k) edges.row(k - 1) = (pts[vs[k]] - pts[vs[0]]).transpose();
  Eigen::FullPivLU<Eigen::Matrix<double, 5, 6>> lu(edges);
  lu.setThreshold(1e-10);
  if (lu.dimensionOfKernel() != 1) return false;
  Vec6d normal = lu.kernel().col(0);
  normal.normalize();
  double offset = normal.dot(pts[vs[0]]);
  const double side = normal.dot(interior) - offset;
  if (std::abs(side) < 1e-12) return false;
  if (side > 0.0) {
    normal = -normal;
    offset = -offset;
  }
  *n = normal;
  *off = offset;
  return true;
}

// Beneath-beyond hull in 6-D over simplicial facets. Returns the smallest
// facet offset (distance of the origin-nearest supporting plane) clamped at
// zero. Throws NumericalError on a degenerate facet so the caller can retry
// on perturbed input.
double hull_ball_radius(const std::vector<Vec6d>& w) {
  const int n = static_cast<int>(w.size());
  if (n < 7) return 0.0;

  // Greedy affinely independent 7-point seed simplex. The residual floor
  // sits above the input jitter scale so sets that are flat up to jitter
  // (single contacts, antipodal pairs) report a zero-volume hull.
  std::array<int, 7> seed{};
  std::vector<char> used(n, 0);
  seed[0] = 0;
  used[0] = 1;
  Eigen::Matrix<double, 6, 6> basis;
  int rank = 0;
  for (int k = 1; k < 7; ++k) {
    int best = -1;
    double best_res = 1e-5;
    Vec6d best_dir = Vec6d::Zero();
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      Vec6d d = w[i] - w[seed[0]];
      for (int c = 0; c < rank; ++c) d -= basis.col(c).dot(d) * basis.col(c);
      const double res = d.norm();
      if (res > best_res) {
        best_res = res;
        best = i;
        best_dir = d;
      }
    }
    if (best < 0) return 0.0;  // wrench set is affinely flat: zero-volume hull
    seed[k] = best;
    used[best] = 1;
    basis.col(rank++) = best_dir / best_res;
  }

  Vec6d interior = Vec6d::Zero();
  for (int k = 0; k < 7; ++k) interior += w[seed[k]];
  interior /= 7.0;

  std::vector<Facet> facets;
  facets.reserve(256);
  auto add_facet = [&](const std::array<int, 6>& vs) {
    Facet f;
    f.v = vs;
    if (!facet_plane(w, vs, interior, &f.n, &f.off))
      throw NumericalError("degenerate hull facet");
    facets.push_back(f);
  };
  for (int drop = 0; drop < 7; ++drop) {
    std::array<int, 6> vs{};
    int m = 0;
    for (int k = 0; k < 7; ++k)
      if (k != drop) vs[m++] = seed[k];
    add_facet(vs);
  }

  for (int i = 0; i < n; ++i) {
    if (used[i]) continue;
    std::vector<int> visible;
    const int facet_count = static_cast<int>(facets.size());
    for (int f = 0; f < facet_count; ++f)
      if (facets[f].alive && facets[f].n.dot(w[i]) > facets[f].off + kVisibleTol)
        visible.push_back(f);
    if (visible.empty()) continue;

    // A ridge (sorted 5-subset) incident to exactly one visible facet lies on
    // the horizon; every ridge of a closed hull has exactly two facets.
    std::map<std::array<int, 5>, int> ridge_count;
    for (int f : visible) {
      for (int drop = 0; drop < 6; ++drop) {
        std::array<int, 5> r{};
        int m = 0;
        for (int k = 0; k < 6; ++k)
          if (k != drop) r[m++] = facets[f].v[k];
        std::sort(r.begin(), r.end());
        ++ridge_count[r];
      }
    }
    for (int f : visible) facets[f].alive = false;
    for (const auto& [ridge, cnt] : ridge_count) {
      if (cnt != 1) continue;
      std::array<int, 6> vs{};
      std::copy(ridge.begin(), ridge.end(), vs.begin());
      vs[5] = i;
      add_facet(vs);
    }
  }

  // Verification: the facet complex must be watertight (every ridge shared
  // by exactly two live facets) and must enclose every input point. Either
  // failure means degeneracy broke an insertion; the caller retries on
  // perturbed input rather than trusting a mangled hull.
  std::map<std::array<int, 5>, int> closure;
  for (const Facet& f : facets) {
    if (!f.alive) continue;
    for (int drop = 0; drop < 6; ++drop) {
      std::array<int, 5> r{};
      int m = 0;
      for (int k = 0; k < 6; ++k)
        if (k != drop) r[m++] = f.v[k];
      std::sort(r.begin(), r.end());
      ++closure[r];
    }
  }
  for (const auto& [ridge, cnt] : closure)
    if (cnt != 2) throw NumericalError("hull is not watertight");
  for (const Facet& f : facets) {
    if (!f.alive) continue;
    for (int i = 0; i < n; ++i)
      if (f.n.dot(w[i]) > f.off + 5e-8) throw NumericalError("hull does not enclose its input");
  }

  double radius = std::numeric_limits<double>::infinity();
  for (const Facet& f : facets)
    if (f.alive) radius = std::min(radius, f.off);
  return radius > 0.0 ? radius : 0.0;
}

}  // namespace

double q1_from_wrenches(const std::vector<Vec6d>& wrenches) {
  // Symmetric or structured inputs can defeat the simplicial hull (seven
  // cohyperplanar points, sliver facets). Retry on progressively joggled
  // copies; the answer moves by no more than the joggle magnitude, which
  // stays below the cross-check tolerance of the enumeration oracle.
  const double joggles[] = {0.0, 1e-6, 1e-5};
  for (size_t attempt = 0; attempt < std::size(joggles); ++attempt) {
    try {
      if (attempt == 0) return hull_ball_radius(wrenches);
      std::vector<Vec6d> nudged = wrenches;
      for (size_t i = 0; i < nudged.size(); ++i) {
        Rng r(derive_stream(0x9e3779b97f4a7c15ULL, i * std::size(joggles) + attempt));
        for (int s = 0; s < 6; ++s) nudged[i][s] += r.uniform(-joggles[attempt], joggles[attempt]);
      }
      return hull_ball_radius(nudged);
    } catch (const NumericalError&) {
      if (attempt + 1 == std::size(joggles)) throw;
    }
  }
  return 0.0;  // unreachable
}

}  // namespace graspkit

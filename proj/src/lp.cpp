#include <algorithm>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "graspkit/metrics.hpp"

namespace graspkit {

// Exhaustive check of every plane <u, x> = 1 spanned by six wrenches. The
// origin evaluates to 0 < 1, so a plane with all points on the <= side is
// supporting with the origin inside (candidate radius 1/|u|), and one with
// all points on the >= side separates the origin from the hull entirely.
// O(n^6): an oracle for small sets, not a production path.
double q1_support_oracle(const std::vector<Vec6d>& w) {
  constexpr double kPlaneTol = 1e-9;
  const int n = static_cast<int>(w.size());
  if (n < 7) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  Eigen::Matrix<double, 6, 6> m;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d)
          for (int e = d + 1; e < n; ++e)
            for (int f = e + 1; f < n; ++f) {
              m.row(0) = w[a].transpose();
              m.row(1) = w[b].transpose();
              m.row(2) = w[c].transpose();
              m.row(3) = w[d].transpose();
              m.row(4) = w[e].transpose();
              m.row(5) = w[f].transpose();
              Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(m);
              lu.setThreshold(1e-10);
              if (!lu.isInvertible()) continue;
              const Vec6d u = lu.solve(Vec6d::Ones());
              double lo = std::numeric_limits<double>::infinity();
              double hi = -std::numeric_limits<double>::infinity();
              for (int k = 0; k < n; ++k) {
                const double s = u.dot(w[k]);
                lo = std::min(lo, s);
                hi = std::max(hi, s);
              }
              if (hi <= 1.0 + kPlaneTol) {
                best = std::min(best, 1.0 / u.norm());
                found = true;
              } else if (lo >= 1.0 - kPlaneTol) {
                return 0.0;  // separating plane: origin outside the hull
              }
            }
  return found ? best : 0.0;
}

}  // namespace graspkit

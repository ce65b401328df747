#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace climb {

struct NelderMeadOptions {
  int max_iterations = 2000;
  double tolerance = 1e-8;   // stop when the simplex cost spread falls below this
  double step = 0.01;        // initial simplex edge
};

template <typename Scalar, int Dim>
struct NelderMeadResult {
  Eigen::Matrix<Scalar, Dim, 1> x;
  Scalar cost = std::numeric_limits<Scalar>::infinity();
  int iterations = 0;
  int evaluations = 0;
  std::vector<Scalar> history;   // best cost after each iteration
};

/// Derivative-free simplex minimization. Infinite costs are allowed and simply
/// rank worst, so infeasible regions act as barriers.
template <typename Scalar, int Dim, typename Cost>
NelderMeadResult<Scalar, Dim> nelder_mead(Cost&& cost, const Eigen::Matrix<Scalar, Dim, 1>& x0,
                                          const NelderMeadOptions& opt = {}) {
  using Point = Eigen::Matrix<Scalar, Dim, 1>;
  constexpr int n = Dim;
  std::array<Point, n + 1> pts;
  std::array<Scalar, n + 1> val;
  NelderMeadResult<Scalar, Dim> res;

  auto eval = [&](const Point& p) {
    ++res.evaluations;
    return cost(p);
  };

  pts[0] = x0;
  val[0] = eval(x0);
  for (int i = 0; i < n; ++i) {
    pts[i + 1] = x0;
    pts[i + 1][i] += Scalar(opt.step);
    val[i + 1] = eval(pts[i + 1]);
  }

  std::array<int, n + 1> idx;
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return val[a] < val[b]; });
    const int best = idx[0], worst = idx[n], second = idx[n - 1];
    res.history.push_back(val[best]);
    if (std::isfinite(val[worst]) && val[worst] - val[best] <= Scalar(opt.tolerance)) break;

    Point centroid = Point::Zero();
    for (int i = 0; i < n; ++i) centroid += pts[idx[i]];
    centroid /= Scalar(n);

    const Point reflected = centroid + (centroid - pts[worst]);
    const Scalar fr = eval(reflected);
    if (fr < val[best]) {
      const Point expanded = centroid + Scalar(2) * (centroid - pts[worst]);
      const Scalar fe = eval(expanded);
      if (fe < fr) {
        pts[worst] = expanded;
        val[worst] = fe;
      } else {
        pts[worst] = reflected;
        val[worst] = fr;
      }
      continue;
    }
    if (fr < val[second]) {
      pts[worst] = reflected;
      val[worst] = fr;
      continue;
    }
    const bool outside = fr < val[worst];
    const Point contracted = outside ? Point(centroid + Scalar(0.5) * (reflected - centroid))
                                     : Point(centroid + Scalar(0.5) * (pts[worst] - centroid));
    const Scalar fc = eval(contracted);
    if (fc < (outside ? fr : val[worst])) {
      pts[worst] = contracted;
      val[worst] = fc;
      continue;
    }
    for (int i = 1; i <= n; ++i) {
      const int j = idx[i];
      pts[j] = pts[best] + Scalar(0.5) * (pts[j] - pts[best]);
      val[j] = eval(pts[j]);
    }
  }

  const int best = static_cast<int>(std::min_element(val.begin(), val.end()) - val.begin());
  res.x = pts[best];
  res.cost = val[best];
  return res;
}

}  // namespace climb

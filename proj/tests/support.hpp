#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dfpp/model.hpp"

namespace dfpp::test {

inline std::vector<Vector> random_points(std::mt19937_64& rng, Eigen::Index n, std::size_t count,
                                         const Vector& centre, double scale) {
  std::normal_distribution<double> normal;
  std::vector<Vector> pts{centre};
  while (pts.size() < count) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
    pts.push_back(centre + scale * v / std::max(1.0, v.norm()));
  }
  return pts;
}

inline Vector values_of(const SampleSet& Y, const std::function<double(const Vector&)>& f) {
  Vector out(static_cast<Eigen::Index>(Y.size()));
  for (std::size_t i = 0; i < Y.size(); ++i) out(static_cast<Eigen::Index>(i)) = f(Y[i]);
  return out;
}

inline double max_residual(const QuadraticModel& q, const SampleSet& Y, const Vector& f) {
  double worst = 0.0;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    const double fi = f(static_cast<Eigen::Index>(i));
    worst = std::max(worst, std::abs(q.evaluate(Y[i]) - fi) / std::max(1.0, std::abs(fi)));
  }
  return worst;
}

struct RandomQuadratic {
  double a;
  Vector g;
  Matrix H;
  double operator()(const Vector& x) const { return a + g.dot(x) + 0.5 * x.dot(H * x); }
};

inline RandomQuadratic random_quadratic(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  RandomQuadratic q{u(rng), Vector(n), Matrix(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) q.g(i) = u(rng);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) q.H(i, j) = q.H(j, i) = u(rng);
  }
  return q;
}

/// Least-squares slope of log(err) against log(h).
inline double loglog_slope(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t k = h.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log10(h[i]);
    const double y = std::log10(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

}  // namespace dfpp::test

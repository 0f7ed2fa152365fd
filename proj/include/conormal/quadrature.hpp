#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace conormal {

// Gauss-Legendre nodes and weights on [0, 1], by Newton iteration on the
// Legendre recurrence.  Deterministic to the last bit for fixed n.
inline std::vector<std::pair<double, double>> gauss_legendre_01(int n) {
  std::vector<std::pair<double, double>> out(n);
  for (int i = 0; i < n; ++i) {
    // initial guess on [-1, 1]
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double p1 = 0.0;
    for (int it = 0; it < 100; ++it) {
      p1 = 1.0;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
      }
      const double dp = n * (x * p1 - p2) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        p1 = 1.0;
        p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
        }
        break;
      }
    }
    double p2 = 0.0, q = 1.0;
    {
      q = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = q;
        q = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
      }
    }
    const double dp = n * (x * q - p2) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    out[i] = {0.5 * (x + 1.0), 0.5 * w};  // mapped to [0, 1]
  }
  return out;
}

// (gamma^2 + q)^{m/2} with fast paths for the orders the calculus uses.
struct WeightPow {
  double half_m = 0.0;
  explicit WeightPow(double m) : half_m(0.5 * m) {}
  double operator()(double base) const {
    if (half_m == 0.0) return 1.0;
    if (half_m == -0.5) return 1.0 / std::sqrt(base);
    if (half_m == 0.5) return std::sqrt(base);
    if (half_m == -1.0) return 1.0 / base;
    if (half_m == 1.0) return base;
    if (half_m == -1.5) return 1.0 / (base * std::sqrt(base));
    return std::pow(base, half_m);
  }
};

}  // namespace conormal

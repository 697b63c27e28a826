#pragma once

// Reference computations used only by the tests. They share no code with the
// library's solvers.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace uoterrant::oracles {

/// Minimizes a unimodal function on [lo, hi] by golden-section search.
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol * (1.0 + std::abs(lo) + std::abs(hi))) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    }
  }
  return (lo + hi) / 2.0;
}

inline double xlogx_over(double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; }

/// Entropic UOT objective written out term by term.
inline double uot_objective(const std::vector<std::vector<double>>& T, const std::vector<double>& a,
                            const std::vector<double>& b, const std::vector<std::vector<double>>& C, double eps,
                            double l1, double l2) {
  double total = 0.0;
  std::vector<double> r(a.size(), 0.0), s(b.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double t = T[i][j];
      total += C[i][j] * t;
      if (t > 0.0) total += eps * (t * std::log(t) - t);
      r[i] += t;
      s[j] += t;
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) total += l1 * (xlogx_over(r[i], a[i]) - r[i] + a[i]);
  for (std::size_t j = 0; j < b.size(); ++j) total += l2 * (xlogx_over(s[j], b[j]) - s[j] + b[j]);
  return total;
}

/// Exact coordinate descent on the entropic UOT objective. Each cell update
/// solves its one-dimensional stationarity condition in log space.
inline std::vector<std::vector<double>> uot_coordinate_descent(const std::vector<double>& a,
                                                               const std::vector<double>& b,
                                                               const std::vector<std::vector<double>>& C, double eps,
                                                               double l1, double l2, int max_sweeps = 200000,
                                                               double tol = 1e-14) {
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<double>> T(n, std::vector<double>(m));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) T[i][j] = std::sqrt(a[i] * b[j]) / static_cast<double>(n * m);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double row_rest = 0.0, col_rest = 0.0;
        for (std::size_t k = 0; k < m; ++k) row_rest += k == j ? 0.0 : T[i][k];
        for (std::size_t k = 0; k < n; ++k) col_rest += k == i ? 0.0 : T[k][j];
        // g(u) = C + eps*u + l1*log((R+e^u)/a) + l2*log((S+e^u)/b) is increasing in u.
        auto g = [&](double u) {
          const double t = std::exp(u);
          return C[i][j] + eps * u + l1 * std::log((row_rest + t) / a[i]) + l2 * std::log((col_rest + t) / b[j]);
        };
        double lo = -700.0, hi = 50.0;
        double u = std::log(T[i][j]);
        for (int it = 0; it < 200; ++it) {
          const double gu = g(u);
          if (gu > 0.0) hi = u;
          else lo = u;
          const double t = std::exp(u);
          const double slope = eps + l1 * t / (row_rest + t) + l2 * t / (col_rest + t);
          double next = u - gu / slope;
          if (!(next > lo && next < hi)) next = (lo + hi) / 2.0;
          if (std::abs(next - u) < 1e-15 * (1.0 + std::abs(u))) {
            u = next;
            break;
          }
          u = next;
        }
        const double t = std::exp(u);
        change = std::max(change, std::abs(t - T[i][j]) / std::max(t, 1e-300));
        T[i][j] = t;
      }
    }
    if (change < tol) break;
  }
  return T;
}

}  // namespace uoterrant::oracles

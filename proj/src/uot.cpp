#include "uoterrant/uot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "uoterrant/errors.hpp"

namespace uoterrant {

namespace {

double xlogx_over(double x, double y) { return x > 0.0 ? x * std::log(x / y) : 0.0; }

double kl(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += xlogx_over(x[i], y[i]) - x[i] + y[i];
  return s;
}

void check_inputs(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C) {
  if (C.rows() != a.size() || C.cols() != b.size()) {
    throw ShapeMismatch("cost matrix is " + std::to_string(C.rows()) + "x" + std::to_string(C.cols()) +
                        " but masses are " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  for (double x : a)
    if (!(x > 0.0) || !std::isfinite(x)) throw NumericalError("hypothesis masses must be positive and finite");
  for (double x : b)
    if (!(x > 0.0) || !std::isfinite(x)) throw NumericalError("reference masses must be positive and finite");
  for (double x : C.data())
    if (!std::isfinite(x)) throw NumericalError("cost matrix holds a non-finite entry");
}

// Generalized Sinkhorn scaling in the absorbed-potential form:
//   plan_ij = u_i * exp((alpha_i + beta_j - C_ij) / eps) * v_j
//   u <- (a / K~v)^f1 * exp(alpha * (f1 - 1) / eps), and symmetrically for v.
// f = 1 gives balanced Sinkhorn; f = lambda / (lambda + eps) the KL-relaxed one.
class ScalingSolver {
 public:
  ScalingSolver(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C, double eps,
                double f1, double f2, double absorb_threshold)
      : a_(a), b_(b), C_(C), eps_(eps), f1_(f1), f2_(f2), log_threshold_(std::log(absorb_threshold)),
        alpha_(a.size(), 0.0), beta_(b.size(), 0.0), log_u_(a.size(), 0.0), log_v_(b.size(), 0.0),
        u_(a.size(), 1.0), v_(b.size(), 1.0), kernel_(C.rows(), C.cols()) {
    rebuild_kernel();
  }

  void update_u() {
    const std::size_t n = a_.size(), m = b_.size();
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < m; ++j) s += kernel_(i, j) * v_[j];
      double log_s;
      if (s > std::numeric_limits<double>::min() && std::isfinite(s)) {
        log_s = std::log(s);
      } else {
        log_s = log_sum_exp_row(i);
      }
      log_u_[i] = f1_ * (std::log(a_[i]) - log_s) + alpha_[i] * (f1_ - 1.0) / eps_;
      u_[i] = std::exp(log_u_[i]);
    }
    maybe_absorb();
  }

  void update_v() {
    const std::size_t n = a_.size(), m = b_.size();
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += kernel_(i, j) * u_[i];
      double log_s;
      if (s > std::numeric_limits<double>::min() && std::isfinite(s)) {
        log_s = std::log(s);
      } else {
        log_s = log_sum_exp_col(j);
      }
      log_v_[j] = f2_ * (std::log(b_[j]) - log_s) + beta_[j] * (f2_ - 1.0) / eps_;
      v_[j] = std::exp(log_v_[j]);
    }
    maybe_absorb();
  }

  Matrix plan() const {
    Matrix T(a_.size(), b_.size());
    for (std::size_t i = 0; i < a_.size(); ++i)
      for (std::size_t j = 0; j < b_.size(); ++j) {
        double log_t = log_u_[i] + (alpha_[i] + beta_[j] - C_(i, j)) / eps_ + log_v_[j];
        T(i, j) = std::exp(log_t);
      }
    return T;
  }

  bool finite() const {
    auto ok = [](const std::vector<double>& xs) {
      return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
    };
    return ok(alpha_) && ok(beta_) && ok(log_u_) && ok(log_v_);
  }

 private:
  double log_kernel(std::size_t i, std::size_t j) const { return (alpha_[i] + beta_[j] - C_(i, j)) / eps_; }

  double log_sum_exp_row(std::size_t i) const {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b_.size(); ++j) hi = std::max(hi, log_kernel(i, j) + log_v_[j]);
    double s = 0.0;
    for (std::size_t j = 0; j < b_.size(); ++j) s += std::exp(log_kernel(i, j) + log_v_[j] - hi);
    return hi + std::log(s);
  }

  double log_sum_exp_col(std::size_t j) const {
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a_.size(); ++i) hi = std::max(hi, log_kernel(i, j) + log_u_[i]);
    double s = 0.0;
    for (std::size_t i = 0; i < a_.size(); ++i) s += std::exp(log_kernel(i, j) + log_u_[i] - hi);
    return hi + std::log(s);
  }

  void maybe_absorb() {
    auto big = [this](double log_x) { return std::abs(log_x) > log_threshold_; };
    if (std::none_of(log_u_.begin(), log_u_.end(), big) && std::none_of(log_v_.begin(), log_v_.end(), big)) return;
    for (std::size_t i = 0; i < a_.size(); ++i) {
      alpha_[i] += eps_ * log_u_[i];
      log_u_[i] = 0.0;
      u_[i] = 1.0;
    }
    for (std::size_t j = 0; j < b_.size(); ++j) {
      beta_[j] += eps_ * log_v_[j];
      log_v_[j] = 0.0;
      v_[j] = 1.0;
    }
    if (!finite()) throw NumericalError("dual potentials became non-finite");
    rebuild_kernel();
  }

  void rebuild_kernel() {
    for (std::size_t i = 0; i < a_.size(); ++i)
      for (std::size_t j = 0; j < b_.size(); ++j) kernel_(i, j) = std::exp(log_kernel(i, j));
  }

  const std::vector<double>& a_;
  const std::vector<double>& b_;
  const CostMatrix& C_;
  double eps_, f1_, f2_, log_threshold_;
  std::vector<double> alpha_, beta_, log_u_, log_v_, u_, v_;
  Matrix kernel_;
};

std::vector<double> row_sums_of(const Matrix& T) {
  std::vector<double> r(T.rows(), 0.0);
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (std::size_t j = 0; j < T.cols(); ++j) r[i] += T(i, j);
  return r;
}

std::vector<double> col_sums_of(const Matrix& T) {
  std::vector<double> c(T.cols(), 0.0);
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (std::size_t j = 0; j < T.cols(); ++j) c[j] += T(i, j);
  return c;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

void check_plan_finite(const Matrix& T) {
  for (double x : T.data())
    if (!std::isfinite(x) || x < 0.0) throw NumericalError("transport plan holds a non-finite entry");
}

}  // namespace

void UotConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw Error("lambda1 and lambda2 must be positive");
  if (max_iters < 1) throw Error("max_iters must be at least 1");
  if (!(tol > 0.0)) throw Error("tol must be positive");
  if (!(absorb_threshold > 1.0)) throw Error("absorb_threshold must exceed 1");
}

std::vector<double> TransportPlan::row_sums() const { return row_sums_of(T); }
std::vector<double> TransportPlan::col_sums() const { return col_sums_of(T); }
double TransportPlan::total() const { return std::accumulate(T.data().begin(), T.data().end(), 0.0); }

double objective(const Matrix& T, const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                 const UotConfig& cfg) {
  if (T.rows() != a.size() || T.cols() != b.size() || C.rows() != a.size() || C.cols() != b.size()) {
    throw ShapeMismatch("plan, cost and masses disagree in shape");
  }
  double transport = 0.0, entropy = 0.0;
  for (std::size_t i = 0; i < T.rows(); ++i)
    for (std::size_t j = 0; j < T.cols(); ++j) {
      const double t = T(i, j);
      transport += C(i, j) * t;
      if (t > 0.0) entropy += t * (std::log(t) - 1.0);
    }
  return transport + cfg.epsilon * entropy + cfg.lambda1 * kl(row_sums_of(T), a) + cfg.lambda2 * kl(col_sums_of(T), b);
}

TransportPlan solve_uot(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                        const UotConfig& cfg) {
  cfg.validate();
  check_inputs(a, b, C);
  TransportPlan out;
  out.T = Matrix(a.size(), b.size());
  if (a.empty() || b.empty()) {
    out.objective = objective(out.T, a, b, C, cfg);
    return out;
  }
  const double f1 = cfg.lambda1 / (cfg.lambda1 + cfg.epsilon);
  const double f2 = cfg.lambda2 / (cfg.lambda2 + cfg.epsilon);
  ScalingSolver solver(a, b, C, cfg.epsilon, f1, f2, cfg.absorb_threshold);

  std::vector<double> prev_rows(a.size(), std::numeric_limits<double>::infinity());
  std::vector<double> prev_cols(b.size(), std::numeric_limits<double>::infinity());
  out.converged = false;
  for (int it = 1; it <= cfg.max_iters; ++it) {
    solver.update_u();
    solver.update_v();
    if (!solver.finite()) throw NumericalError("Sinkhorn scalings became non-finite");
    out.T = solver.plan();
    out.iterations = it;
    auto rows = row_sums_of(out.T);
    auto cols = col_sums_of(out.T);
    const double change = std::max(max_abs_diff(rows, prev_rows), max_abs_diff(cols, prev_cols));
    prev_rows = std::move(rows);
    prev_cols = std::move(cols);
    if (change < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  check_plan_finite(out.T);
  out.objective = objective(out.T, a, b, C, cfg);
  return out;
}

TransportPlan solve_bot(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                        double epsilon, const BotOptions& options) {
  if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
  check_inputs(a, b, C);
  const double sa = std::accumulate(a.begin(), a.end(), 0.0);
  const double sb = std::accumulate(b.begin(), b.end(), 0.0);
  if (std::abs(sa - sb) > 1e-9 * std::max(1.0, std::max(sa, sb))) {
    throw MassMismatch("balanced transport needs equal totals, got " + std::to_string(sa) + " and " + std::to_string(sb));
  }
  TransportPlan out;
  out.T = Matrix(a.size(), b.size());
  if (a.empty() || b.empty()) return out;

  ScalingSolver solver(a, b, C, epsilon, 1.0, 1.0, options.absorb_threshold);
  out.converged = false;
  for (int it = 1; it <= options.max_iters; ++it) {
    solver.update_u();
    solver.update_v();
    if (!solver.finite()) throw NumericalError("Sinkhorn scalings became non-finite");
    out.T = solver.plan();
    out.iterations = it;
    // Columns are exact after the v step; rows carry the residual.
    if (std::max(max_abs_diff(row_sums_of(out.T), a), max_abs_diff(col_sums_of(out.T), b)) < options.tol) {
      out.converged = true;
      break;
    }
  }
  check_plan_finite(out.T);
  double transport = 0.0, entropy = 0.0;
  for (std::size_t i = 0; i < out.T.rows(); ++i)
    for (std::size_t j = 0; j < out.T.cols(); ++j) {
      transport += C(i, j) * out.T(i, j);
      if (out.T(i, j) > 0.0) entropy += out.T(i, j) * (std::log(out.T(i, j)) - 1.0);
    }
  out.objective = transport + epsilon * entropy;
  return out;
}

TransportPlan brute_force_uot(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                              const UotConfig& cfg, int grid_steps) {
  cfg.validate();
  if (C.rows() != a.size() || C.cols() != b.size()) throw ShapeMismatch("cost matrix and masses disagree in shape");
  const std::size_t n = a.size(), m = b.size(), cells = n * m;
  if (cells > 4) throw TooLarge("brute force handles at most 4 cells, got " + std::to_string(cells));
  if (grid_steps < 2) throw Error("grid_steps must be at least 2");

  TransportPlan best;
  best.T = Matrix(n, m);
  best.objective = objective(best.T, a, b, C, cfg);
  if (cells == 0) return best;

  const double hi = 1.5 * std::max(std::accumulate(a.begin(), a.end(), 0.0), std::accumulate(b.begin(), b.end(), 0.0));
  const double step = hi / (grid_steps - 1);

  // Odometer over grid_steps^cells points.
  std::vector<int> idx(cells, 0);
  Matrix T(n, m);
  while (true) {
    for (std::size_t k = 0; k < cells; ++k) T(k / m, k % m) = idx[k] * step;
    double f = objective(T, a, b, C, cfg);
    if (f < best.objective) {
      best.objective = f;
      best.T = T;
    }
    std::size_t k = 0;
    while (k < cells && ++idx[k] == grid_steps) idx[k++] = 0;
    if (k == cells) break;
  }

  // The objective is strictly convex, so exact coordinate minimization
  // converges to the global minimizer. Each 1-D problem is solved by
  // bisection on the (increasing) partial derivative.
  T = best.T;
  auto partial = [&](std::size_t i, std::size_t j, double t) {
    double row = t, col = t;
    for (std::size_t jj = 0; jj < m; ++jj)
      if (jj != j) row += T(i, jj);
    for (std::size_t ii = 0; ii < n; ++ii)
      if (ii != i) col += T(ii, j);
    return C(i, j) + cfg.epsilon * std::log(t) + cfg.lambda1 * std::log(row / a[i]) +
           cfg.lambda2 * std::log(col / b[j]);
  };
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        double lo = 0.0, up = std::max(hi, 1.0);
        while (partial(i, j, up) < 0.0) up *= 2.0;
        for (int it = 0; it < 200; ++it) {
          double mid = 0.5 * (lo + up);
          if (mid <= lo || mid >= up) break;
          (partial(i, j, mid) < 0.0 ? lo : up) = mid;
        }
        const double t = 0.5 * (lo + up);
        moved = std::max(moved, std::abs(t - T(i, j)));
        T(i, j) = t;
      }
    if (moved < 1e-13) break;
  }
  const double polished = objective(T, a, b, C, cfg);
  if (polished <= best.objective) {
    best.T = T;
    best.objective = polished;
  }
  best.converged = true;
  return best;
}

}  // namespace uoterrant

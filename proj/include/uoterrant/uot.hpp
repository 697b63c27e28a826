#pragma once

#include <cstddef>
#include <vector>

#include "uoterrant/editvec.hpp"

namespace uoterrant {

struct UotConfig {
  double epsilon = 0.1;
  double lambda1 = 0.1;
  double lambda2 = 0.1;
  int max_iters = 1000;
  double tol = 1e-9;
  double absorb_threshold = 1e10;

  void validate() const;
};

struct TransportPlan {
  Matrix T;
  bool converged = true;
  int iterations = 0;
  double objective = 0.0;

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  double total() const;
};

/// sum C.P + eps * sum P(log P - 1) + l1 * KL(P1 | a) + l2 * KL(P^T 1 | b),
/// with KL(x|y) = sum x log(x/y) - x + y and 0 log 0 = 0.
double objective(const Matrix& T, const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                 const UotConfig& cfg);

/// Entropic unbalanced OT by stabilized Sinkhorn scaling. Hitting max_iters is
/// not an error; the plan comes back with converged == false.
TransportPlan solve_uot(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                        const UotConfig& cfg = {});

struct BotOptions {
  int max_iters = 100000;
  double tol = 1e-10;
  double absorb_threshold = 1e10;
};

/// Entropic balanced OT. Requires sum(a) == sum(b).
TransportPlan solve_bot(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                        double epsilon, const BotOptions& options = {});

/// Exhaustive grid search plus coordinate-descent polish. Test oracle for
/// instances with at most four cells.
TransportPlan brute_force_uot(const std::vector<double>& a, const std::vector<double>& b, const CostMatrix& C,
                              const UotConfig& cfg, int grid_steps = 21);

}  // namespace uoterrant

#pragma once
#include <cstddef>
#include <vector>

#include "migplan/errors.hpp"

namespace migplan {

// max objective . x  subject to  a x <= b,  x >= 0
struct linear_program {
  std::vector<double> objective;
  std::vector<std::vector<double>> a;
  std::vector<double> b;

  std::size_t num_vars() const { return objective.size(); }
  std::size_t num_rows() const { return a.size(); }
};

enum class lp_status { optimal, infeasible, unbounded };

struct lp_result {
  lp_status status = lp_status::infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

struct lp_options {
  std::size_t max_nonzeros = 10000;
  bool dump_tableau = false;  // debug print to stderr on request
};

// Two-phase dense simplex, Bland (least-index) anti-cycling pivoting.
// Deterministic: identical input always yields the identical basic solution.
lp_result lp_solve(const linear_program& lp, const lp_options& opts = {});

}  // namespace migplan

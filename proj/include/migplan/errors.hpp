#pragma once
#include <stdexcept>
#include <string>

namespace migplan {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// bad node/link/agent id
struct invalid_reference : error {
  using error::error;
};

// query that has no meaning (src == dst, empty path, ...)
struct degenerate_query : error {
  using error::error;
};

struct invalid_parameter : error {
  using error::error;
};

// plan/allocation cannot be realized (zero-rate link carrying load,
// LP infeasible, no migration path, ...)
struct infeasible_error : error {
  using error::error;
};

// an agent has no feasible destination
struct no_candidate_error : error {
  using error::error;
};

// plan with an all-zero alpha row, or missing chain paths
struct empty_plan_error : error {
  using error::error;
};

struct incomplete_plan_error : error {
  using error::error;
};

// congestion term at or past the 1/(1-x) pole
struct unbounded_cost_error : error {
  using error::error;
};

// exhaustive/grid oracle exceeds its configured budget
struct oracle_too_large_error : error {
  using error::error;
};

}  // namespace migplan

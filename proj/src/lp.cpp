#include "migplan/lp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace migplan {

namespace {

constexpr double kPivEps = 1e-9;

class simplex_tableau {
 public:
  simplex_tableau(const linear_program& lp)
      : m_(lp.num_rows()), n_(lp.num_vars()) {
    // columns: [structural n][slack m][artificial a][rhs]
    // rows with negative rhs get flipped and receive an artificial variable
    std::vector<int> art_rows;
    for (std::size_t i = 0; i < m_; ++i)
      if (lp.b[i] < 0.0) art_rows.push_back(static_cast<int>(i));
    n_art_ = art_rows.size();
    ncols_ = n_ + m_ + n_art_;

    rows_.assign(m_, std::vector<double>(ncols_ + 1, 0.0));
    basis_.assign(m_, -1);
    forbidden_.assign(ncols_, 0);

    std::size_t art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      double sgn = lp.b[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = sgn * lp.a[i][j];
      rows_[i][n_ + i] = sgn;  // slack
      rows_[i][ncols_] = sgn * lp.b[i];
      if (lp.b[i] < 0.0) {
        std::size_t ac = n_ + m_ + art;
        rows_[i][ac] = 1.0;
        forbidden_[ac] = 1;
        basis_[i] = static_cast<int>(ac);
        ++art;
      } else {
        basis_[i] = static_cast<int>(n_ + i);
      }
    }
  }

  bool needs_phase1() const { return n_art_ > 0; }

  // maximize -sum(artificials); returns true when feasible
  bool phase1() {
    z_.assign(ncols_, 0.0);
    zval_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (static_cast<std::size_t>(basis_[i]) >= n_ + m_) {
        for (std::size_t j = 0; j < ncols_; ++j) z_[j] += rows_[i][j];
        zval_ -= rows_[i][ncols_];
      }
    }
    // artificials may not re-enter
    for (std::size_t j = n_ + m_; j < ncols_; ++j) z_[j] = 0.0;
    iterate();
    if (zval_ < -1e-7) return false;
    drive_out_artificials();
    return true;
  }

  // maximize c over structural vars; true = optimal, false = unbounded
  bool phase2(const std::vector<double>& c) {
    z_.assign(ncols_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) z_[j] = c[j];
    zval_ = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      std::size_t bv = static_cast<std::size_t>(basis_[i]);
      double cb = bv < n_ ? c[bv] : 0.0;
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j < ncols_; ++j) z_[j] -= cb * rows_[i][j];
      zval_ += cb * rows_[i][ncols_];
    }
    for (std::size_t j = n_ + m_; j < ncols_; ++j) z_[j] = 0.0;
    return iterate();
  }

  std::vector<double> solution() const {
    std::vector<double> x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_)
        x[basis_[i]] = rows_[i][ncols_];
    return x;
  }

  double objective() const { return zval_; }

  void dump() const {
    for (std::size_t i = 0; i < m_; ++i) {
      std::fprintf(stderr, "b%zu=x%d |", i, basis_[i]);
      for (std::size_t j = 0; j <= ncols_; ++j)
        std::fprintf(stderr, " %9.4f", rows_[i][j]);
      std::fprintf(stderr, "\n");
    }
  }

 private:
  // Bland: entering = least-index improving column, leaving = min ratio with
  // least basis index on ties. Returns false iff unbounded.
  bool iterate() {
    for (;;) {
      int enter = -1;
      for (std::size_t j = 0; j < ncols_; ++j) {
        if (forbidden_[j]) continue;
        if (z_[j] > kPivEps) {
          enter = static_cast<int>(j);
          break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        double a = rows_[i][enter];
        if (a <= kPivEps) continue;
        double ratio = rows_[i][ncols_] / a;
        if (ratio < best - 1e-12 ||
            (ratio < best + 1e-12 && leave >= 0 && basis_[i] < basis_[leave])) {
          best = ratio;
          leave = static_cast<int>(i);
        }
      }
      if (leave < 0) return false;
      pivot(static_cast<std::size_t>(leave), static_cast<std::size_t>(enter));
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    double p = rows_[r][c];
    for (std::size_t j = 0; j <= ncols_; ++j) rows_[r][j] /= p;
    rows_[r][c] = 1.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r) continue;
      double f = rows_[i][c];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= ncols_; ++j) rows_[i][j] -= f * rows_[r][j];
      rows_[i][c] = 0.0;
    }
    double f = z_[c];
    if (f != 0.0) {
      for (std::size_t j = 0; j < ncols_; ++j) z_[j] -= f * rows_[r][j];
      z_[c] = 0.0;
      zval_ += f * rows_[r][ncols_];
    }
    basis_[r] = static_cast<int>(c);
  }

  // After a feasible phase 1, basic artificials sit at zero; pivot them onto
  // any usable column so phase 2 never touches them. Rows with no usable
  // column are redundant and stay inert.
  void drive_out_artificials() {
    for (std::size_t i = 0; i < m_; ++i) {
      if (static_cast<std::size_t>(basis_[i]) < n_ + m_) continue;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (std::fabs(rows_[i][j]) > kPivEps) {
          pivot(i, j);
          break;
        }
      }
    }
  }

  std::size_t m_, n_, n_art_ = 0, ncols_ = 0;
  std::vector<std::vector<double>> rows_;
  std::vector<double> z_;
  double zval_ = 0.0;
  std::vector<int> basis_;
  std::vector<char> forbidden_;
};

}  // namespace

lp_result lp_solve(const linear_program& lp, const lp_options& opts) {
  if (lp.a.size() != lp.b.size())
    throw invalid_parameter("lp: row/bound count mismatch");
  std::size_t nz = 0;
  for (const auto& row : lp.a) {
    if (row.size() != lp.num_vars())
      throw invalid_parameter("lp: inconsistent row width");
    for (double v : row) {
      if (!std::isfinite(v)) throw invalid_parameter("lp: non-finite coefficient");
      if (v != 0.0) ++nz;
    }
  }
  for (double v : lp.b)
    if (!std::isfinite(v)) throw invalid_parameter("lp: non-finite bound");
  for (double v : lp.objective)
    if (!std::isfinite(v)) throw invalid_parameter("lp: non-finite objective");
  if (nz > opts.max_nonzeros)
    throw oracle_too_large_error("lp: nonzero budget exceeded");

  lp_result res;
  if (lp.num_rows() == 0) {
    // only x >= 0: optimum at origin unless some objective coefficient is
    // positive, in which case the program is unbounded
    for (double c : lp.objective)
      if (c > kPivEps) {
        res.status = lp_status::unbounded;
        return res;
      }
    res.status = lp_status::optimal;
    res.x.assign(lp.num_vars(), 0.0);
    res.objective = 0.0;
    return res;
  }

  simplex_tableau tab(lp);
  if (tab.needs_phase1() && !tab.phase1()) {
    res.status = lp_status::infeasible;
    return res;
  }
  bool bounded = tab.phase2(lp.objective);
  if (opts.dump_tableau) tab.dump();
  if (!bounded) {
    res.status = lp_status::unbounded;
    return res;
  }
  res.status = lp_status::optimal;
  res.x = tab.solution();
  res.objective = tab.objective();
  return res;
}

}  // namespace migplan

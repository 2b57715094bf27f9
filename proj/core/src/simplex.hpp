// SPDX-License-Identifier: Apache-2.0
//
// Bounded-variable dual simplex over a dense explicit basis inverse.
// Internal to the solver backend; minimization form. All structural
// data is integral, which keeps the numerics tame at the scales the
// library targets (up to a few thousand columns).
#pragma once

#include "ipg/game.hpp"
#include "ipg/solver.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <vector>

namespace ipg::detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class LpStatus { optimal, infeasible, iteration_limit };

/// LP in equality form A x + s = b with bounded structural columns and
/// sign-bounded slacks. Columns and rows may both be appended at any
/// time; variables are addressed as vid >= 0 (structural column) or
/// vid = ~row (slack), so indices stay stable. The basis is kept dual
/// feasible across bound changes and row additions, making the dual
/// simplex the single re-optimization driver (exactly what the
/// branch-and-bound layer and the cutting loop need).
class SimplexLP {
public:
  void add_column(double lb, double ub);
  void add_row(const SolverRow &row);

  void set_objective(const std::vector<double> &c); // minimization
  void set_bound(int col, double lb, double ub);

  int num_cols() const { return static_cast<int>(col_lb_.size()); }
  int num_rows() const { return static_cast<int>(rows_rhs_.size()); }

  LpStatus solve(std::int64_t max_pivots = -1);

  double objective_value() const { return obj_value_; }
  double value(int col) const { return x_[col]; }
  const std::vector<double> &values() const { return x_; }
  std::int64_t pivots() const { return total_pivots_; }

private:
  enum class VStat : unsigned char { basic, at_lower, at_upper };

  static bool is_slack(int vid) { return vid < 0; }
  static int slack_row(int vid) { return ~vid; }
  static int slack_vid(int row) { return ~row; }

  double vlb(int vid) const { return vid >= 0 ? col_lb_[vid] : slack_lb_[~vid]; }
  double vub(int vid) const { return vid >= 0 ? col_ub_[vid] : slack_ub_[~vid]; }
  double vobj(int vid) const { return vid >= 0 ? obj_[vid] : 0.0; }
  VStat vstat(int vid) const { return vid >= 0 ? col_stat_[vid] : slack_stat_[~vid]; }
  void set_vstat(int vid, VStat s) {
    if (vid >= 0)
      col_stat_[vid] = s;
    else
      slack_stat_[~vid] = s;
  }
  double dual(int vid) const { return vid >= 0 ? dual_col_[vid] : dual_slack_[~vid]; }
  void set_dual(int vid, double d) {
    if (vid >= 0)
      dual_col_[vid] = d;
    else
      dual_slack_[~vid] = d;
  }
  double alpha_for(const Eigen::VectorXd &rho, int vid) const {
    if (vid >= 0) {
      double a = 0.0;
      for (auto [r, c] : cols_[vid])
        a += rho[r] * c;
      return a;
    }
    return rho[~vid];
  }

  template <typename Fn> void for_each_var(Fn &&fn) const {
    for (int c = 0; c < num_cols(); ++c)
      fn(c);
    for (int r = 0; r < num_rows(); ++r)
      fn(~r);
  }

  void refactorize();
  void compute_xb();
  void compute_duals();
  void snap_nonbasic_to_feasible_bounds();
  Eigen::VectorXd tableau_column(int vid) const;
  void primal_values_from_state();

  // structural data
  std::vector<std::vector<std::pair<int, double>>> cols_; // col -> (row, coeff)
  std::vector<double> col_lb_, col_ub_;
  std::vector<double> obj_;
  std::vector<std::vector<std::pair<int, double>>> rows_; // row -> (col, coeff)
  std::vector<double> rows_rhs_;
  std::vector<double> slack_lb_, slack_ub_;

  // factorized state
  std::vector<int> basis_; // row -> vid
  std::vector<VStat> col_stat_, slack_stat_;
  std::vector<double> dual_col_, dual_slack_;
  Eigen::MatrixXd binv_;
  Eigen::VectorXd xb_;
  std::vector<double> x_; // last primal solution, structural columns
  double obj_value_ = 0.0;
  bool structure_dirty_ = true;
  std::int64_t total_pivots_ = 0;
  int pivots_since_refactor_ = 0;
};

} // namespace ipg::detail

// SPDX-License-Identifier: Apache-2.0
#include "simplex.hpp"

#include "ipg/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ipg::detail {

namespace {
constexpr double kPrimalTol = 1e-7;
constexpr double kDualTol = 1e-9;
constexpr double kPivotTol = 1e-9;
} // namespace

void SimplexLP::add_column(double lb, double ub) {
  col_lb_.push_back(lb);
  col_ub_.push_back(ub);
  cols_.emplace_back();
  obj_.push_back(0.0);
  col_stat_.push_back(std::isfinite(lb) ? VStat::at_lower : VStat::at_upper);
  dual_col_.push_back(0.0);
}

void SimplexLP::add_row(const SolverRow &row) {
  int r = num_rows();
  rows_.emplace_back();
  for (auto [c, a] : row.coeffs) {
    if (c < 0 || c >= num_cols())
      throw InputError("row references an invalid column index");
    if (a == 0)
      continue;
    rows_[r].emplace_back(c, static_cast<double>(a));
    cols_[c].emplace_back(r, static_cast<double>(a));
  }
  rows_rhs_.push_back(static_cast<double>(row.rhs));
  switch (row.sense) {
  case RowSense::le:
    slack_lb_.push_back(0.0);
    slack_ub_.push_back(kInf);
    break;
  case RowSense::eq:
    slack_lb_.push_back(0.0);
    slack_ub_.push_back(0.0);
    break;
  case RowSense::ge:
    slack_lb_.push_back(-kInf);
    slack_ub_.push_back(0.0);
    break;
  }
  // the new row's slack starts basic; the basis inverse is rebuilt lazily
  basis_.push_back(slack_vid(r));
  slack_stat_.push_back(VStat::basic);
  dual_slack_.push_back(0.0);
  structure_dirty_ = true;
}

void SimplexLP::set_objective(const std::vector<double> &c) {
  obj_ = c;
  obj_.resize(col_lb_.size(), 0.0);
  structure_dirty_ = true;
}

void SimplexLP::set_bound(int col, double lb, double ub) {
  col_lb_[col] = lb;
  col_ub_[col] = ub;
  if (col_stat_[col] == VStat::basic)
    return;
  // nonbasic variables sit on a finite, dual-feasible bound
  double d = dual_col_[col];
  if (lb == ub)
    col_stat_[col] = VStat::at_lower;
  else if (d > kDualTol && std::isfinite(lb))
    col_stat_[col] = VStat::at_lower;
  else if (d < -kDualTol && std::isfinite(ub))
    col_stat_[col] = VStat::at_upper;
  else if (col_stat_[col] == VStat::at_lower && !std::isfinite(lb))
    col_stat_[col] = VStat::at_upper;
  else if (col_stat_[col] == VStat::at_upper && !std::isfinite(ub))
    col_stat_[col] = VStat::at_lower;
}

void SimplexLP::snap_nonbasic_to_feasible_bounds() {
  for_each_var([&](int vid) {
    if (vstat(vid) == VStat::basic)
      return;
    double lb = vlb(vid), ub = vub(vid);
    double d = dual(vid);
    if (lb == ub) {
      set_vstat(vid, VStat::at_lower);
    } else if (d > kDualTol && std::isfinite(lb)) {
      set_vstat(vid, VStat::at_lower);
    } else if (d < -kDualTol && std::isfinite(ub)) {
      set_vstat(vid, VStat::at_upper);
    } else if (vstat(vid) == VStat::at_lower && !std::isfinite(lb)) {
      set_vstat(vid, VStat::at_upper);
    } else if (vstat(vid) == VStat::at_upper && !std::isfinite(ub)) {
      set_vstat(vid, VStat::at_lower);
    }
  });
}

Eigen::VectorXd SimplexLP::tableau_column(int vid) const {
  int m = num_rows();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  if (vid >= 0) {
    for (auto [r, a] : cols_[vid])
      w += a * binv_.col(r);
  } else {
    w = binv_.col(~vid);
  }
  return w;
}

void SimplexLP::refactorize() {
  int m = num_rows();
  if (m == 0) {
    binv_.resize(0, 0);
    xb_.resize(0);
  } else {
    bool all_slack = true;
    for (int r = 0; r < m && all_slack; ++r)
      all_slack = basis_[r] == slack_vid(r);
    if (all_slack) {
      binv_ = Eigen::MatrixXd::Identity(m, m);
    } else {
      Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, m);
      for (int r = 0; r < m; ++r) {
        int vid = basis_[r];
        if (vid >= 0) {
          for (auto [row, a] : cols_[vid])
            B(row, r) = a;
        } else {
          B(~vid, r) = 1.0;
        }
      }
      Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
      if (!(lu.rcond() > 1e-14)) {
        // singular basis: fall back to the all-slack basis
        for (int r = 0; r < m; ++r) {
          int vid = basis_[r];
          if (vid != slack_vid(r))
            set_vstat(vid, std::isfinite(vlb(vid)) ? VStat::at_lower : VStat::at_upper);
          basis_[r] = slack_vid(r);
          set_vstat(basis_[r], VStat::basic);
        }
        binv_ = Eigen::MatrixXd::Identity(m, m);
      } else {
        binv_ = lu.inverse();
      }
    }
  }
  compute_duals();
  snap_nonbasic_to_feasible_bounds();
  compute_xb();
  pivots_since_refactor_ = 0;
  structure_dirty_ = false;
}

void SimplexLP::compute_duals() {
  int m = num_rows();
  dual_col_.assign(num_cols(), 0.0);
  dual_slack_.assign(m, 0.0);
  Eigen::VectorXd y;
  if (m > 0) {
    Eigen::VectorXd cb(m);
    for (int r = 0; r < m; ++r)
      cb[r] = vobj(basis_[r]);
    y = binv_.transpose() * cb;
  }
  for_each_var([&](int vid) {
    if (vstat(vid) == VStat::basic) {
      set_dual(vid, 0.0);
      return;
    }
    double ya = 0.0;
    if (m > 0) {
      if (vid >= 0) {
        for (auto [r, a] : cols_[vid])
          ya += y[r] * a;
      } else {
        ya = y[~vid];
      }
    }
    set_dual(vid, vobj(vid) - ya);
  });
}

void SimplexLP::compute_xb() {
  int m = num_rows();
  if (m == 0) {
    xb_.resize(0);
    return;
  }
  Eigen::VectorXd rhs(m);
  for (int r = 0; r < m; ++r)
    rhs[r] = rows_rhs_[r];
  for_each_var([&](int vid) {
    if (vstat(vid) == VStat::basic)
      return;
    double xv = vstat(vid) == VStat::at_lower ? vlb(vid) : vub(vid);
    if (xv == 0.0)
      return;
    if (vid >= 0) {
      for (auto [r, a] : cols_[vid])
        rhs[r] -= a * xv;
    } else {
      rhs[~vid] -= xv;
    }
  });
  xb_ = binv_ * rhs;
}

void SimplexLP::primal_values_from_state() {
  x_.assign(num_cols(), 0.0);
  for (int c = 0; c < num_cols(); ++c)
    if (col_stat_[c] != VStat::basic)
      x_[c] = col_stat_[c] == VStat::at_lower ? col_lb_[c] : col_ub_[c];
  for (int r = 0; r < num_rows(); ++r)
    if (basis_[r] >= 0)
      x_[basis_[r]] = xb_[r];
  obj_value_ = 0.0;
  for (int c = 0; c < num_cols(); ++c)
    obj_value_ += obj_[c] * x_[c];
}

LpStatus SimplexLP::solve(std::int64_t max_pivots) {
  if (structure_dirty_)
    refactorize();
  else {
    snap_nonbasic_to_feasible_bounds();
    compute_xb();
  }

  int m = num_rows();
  std::int64_t pivots = 0;
  int null_pivot_retries = 0;
  bool bland = false;

  while (true) {
    if (max_pivots >= 0 && pivots > max_pivots)
      return LpStatus::iteration_limit;

    // leaving variable: largest bound violation among basic variables;
    // under the anti-cycling fallback, the lowest-ranked violated one
    int r = -1;
    double best_viol = kPrimalTol;
    int best_rank = 0;
    int sigma = 0;
    auto vid_rank = [&](int vid) { return vid >= 0 ? vid : num_cols() + ~vid; };
    for (int i = 0; i < m; ++i) {
      int vid = basis_[i];
      double bv = xb_[i];
      double lo = vlb(vid), hi = vub(vid);
      double viol = 0;
      int s = 0;
      if (bv < lo - kPrimalTol) {
        viol = lo - bv;
        s = -1;
      } else if (bv > hi + kPrimalTol) {
        viol = bv - hi;
        s = +1;
      } else {
        continue;
      }
      bool better = bland ? (r < 0 || vid_rank(vid) < best_rank) : viol > best_viol;
      if (better) {
        r = i;
        best_viol = viol;
        best_rank = vid_rank(vid);
        sigma = s;
      }
    }
    if (r < 0) {
      primal_values_from_state();
      return LpStatus::optimal;
    }

    Eigen::VectorXd rho = binv_.row(r);
    int enter = 0;
    bool have_enter = false;
    double best_ratio = kInf;
    double best_alpha = 0.0;
    int enter_rank = 0;
    for_each_var([&](int vid) {
      if (vstat(vid) == VStat::basic || vlb(vid) == vub(vid))
        return;
      double alpha = alpha_for(rho, vid);
      double sa = sigma * alpha;
      bool admissible = (vstat(vid) == VStat::at_lower) ? (sa > kPivotTol) : (sa < -kPivotTol);
      if (!admissible)
        return;
      double ratio = std::abs(dual(vid)) / std::abs(alpha);
      bool better;
      if (!have_enter || ratio < best_ratio - 1e-12)
        better = true;
      else if (ratio < best_ratio + 1e-12)
        // near-tied ratios: prefer stable pivots, or the lowest rank
        // under the anti-cycling fallback
        better = bland ? vid_rank(vid) < enter_rank : std::abs(alpha) > std::abs(best_alpha);
      else
        better = false;
      if (better) {
        enter = vid;
        have_enter = true;
        best_ratio = ratio;
        best_alpha = alpha;
        enter_rank = vid_rank(vid);
      }
    });
    if (!have_enter)
      return LpStatus::infeasible;

    int leave = basis_[r];
    Eigen::VectorXd w = tableau_column(enter);
    double piv = w[r];
    if (std::abs(piv) < kPivotTol) {
      refactorize();
      if (++null_pivot_retries > 3)
        throw BackendError("simplex: persistent numerically-null pivot");
      continue;
    }

    double target = sigma < 0 ? vlb(leave) : vub(leave);
    double step = (xb_[r] - target) / piv;
    double enter_from = vstat(enter) == VStat::at_lower ? vlb(enter) : vub(enter);

    xb_ -= step * w;
    xb_[r] = enter_from + step;

    double theta = dual(enter) / piv;
    if (theta != 0.0) {
      for_each_var([&](int vid) {
        if (vstat(vid) == VStat::basic || vid == enter)
          return;
        double alpha = alpha_for(rho, vid);
        if (alpha != 0.0)
          set_dual(vid, dual(vid) - theta * alpha);
      });
    }
    set_dual(leave, -theta);
    set_dual(enter, 0.0);

    binv_.row(r) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == r)
        continue;
      double f = w[i];
      if (f != 0.0)
        binv_.row(i) -= f * binv_.row(r);
    }

    set_vstat(enter, VStat::basic);
    set_vstat(leave, sigma < 0 ? VStat::at_lower : VStat::at_upper);
    basis_[r] = enter;

    ++pivots;
    ++total_pivots_;
    // explicit-inverse drift grows with rank-1 updates; the cadence
    // trades refactorization cost (cubic) against that drift
    if (++pivots_since_refactor_ >= std::max(256, 2 * m))
      refactorize();
    if (!bland && pivots > 20LL * (num_cols() + m + 16) + 2000) {
      bland = true;
      refactorize();
    }
    if (pivots > 400LL * (num_cols() + m + 16) + 400000)
      throw BackendError("simplex: pivot limit exceeded");
  }
}

} // namespace ipg::detail

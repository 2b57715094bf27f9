// SPDX-License-Identifier: Apache-2.0
#include "ipg/solver.hpp"

#include "ipg/errors.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstdio>
#include <set>

namespace ipg {

using detail::LpStatus;
using detail::SimplexLP;
using Clock = std::chrono::steady_clock;

namespace {
constexpr double kIntTol = 1e-6; // integrality tolerance before exact rounding
} // namespace

struct SolverModel::Impl {
  SimplexLP lp;
  std::vector<char> integral;
  std::vector<double> lb, ub;
  std::vector<SolverRow> rows; // exact copies, for verification
  Sense sense = Sense::maximize;
  std::vector<Rational> obj_user;     // user-sense rational coefficients
  std::vector<std::int64_t> obj_int;  // min-form, denominators cleared
  bool obj_integral = false;          // integer optimum guaranteed
  std::vector<int> pref_cols;
  bool in_tie_phase = false;
  std::int64_t node_limit = 0; // 0 = unlimited
  bool log = false;

  // pseudocosts: average LP degradation per unit of fractionality,
  // kept across re-solves of the same model (cuts only tighten it)
  std::vector<double> pc_sum[2];
  std::vector<std::int64_t> pc_cnt[2];
  void grow_pc() {
    for (int d = 0; d < 2; ++d) {
      pc_sum[d].resize(integral.size(), 0.0);
      pc_cnt[d].resize(integral.size(), 0);
    }
  }

  Impl() {
    const char *engine = std::getenv("IPG_MILP_ENGINE");
    if (engine && std::string(engine) != "bnb")
      throw BackendError(std::string("unknown MILP engine '") + engine +
                         "' (available: bnb)");
    const char *lg = std::getenv("IPG_MILP_LOG");
    log = lg && *lg && std::string(lg) != "0";
  }

  double internal_obj_dbl(int c) const {
    return c < static_cast<int>(obj_int.size()) ? static_cast<double>(obj_int[c]) : 0.0;
  }

  // exact row check at rounded integer values; rows touching continuous
  // columns are checked in floating point instead
  bool verify_candidate(const std::vector<double> &vals,
                        const std::vector<std::int64_t> &ints) const {
    for (const auto &row : rows) {
      bool pure_int = true;
      __int128 lhs = 0;
      double lhs_d = 0.0, scale = 1.0;
      for (auto [c, a] : row.coeffs) {
        if (integral[c]) {
          lhs += (__int128)a * ints[c];
          lhs_d += static_cast<double>(a) * static_cast<double>(ints[c]);
        } else {
          pure_int = false;
          lhs_d += static_cast<double>(a) * vals[c];
        }
        scale += std::abs(static_cast<double>(a));
      }
      if (pure_int) {
        bool ok = row.sense == RowSense::le   ? lhs <= row.rhs
                  : row.sense == RowSense::eq ? lhs == row.rhs
                                              : lhs >= row.rhs;
        if (!ok)
          return false;
      } else {
        double rhs = static_cast<double>(row.rhs);
        double tol = 1e-6 * scale;
        bool ok = row.sense == RowSense::le   ? lhs_d <= rhs + tol
                  : row.sense == RowSense::eq ? std::abs(lhs_d - rhs) <= tol
                                              : lhs_d >= rhs - tol;
        if (!ok)
          return false;
      }
    }
    return true;
  }
};

SolverModel::SolverModel() : impl_(std::make_unique<Impl>()) {}
SolverModel::~SolverModel() = default;
SolverModel::SolverModel(SolverModel &&) noexcept = default;
SolverModel &SolverModel::operator=(SolverModel &&) noexcept = default;

int SolverModel::add_column(double lb, double ub, bool integral) {
  if (lb > ub)
    throw InputError("column with lb > ub");
  impl_->lp.add_column(lb, ub);
  impl_->integral.push_back(integral ? 1 : 0);
  impl_->lb.push_back(lb);
  impl_->ub.push_back(ub);
  return static_cast<int>(impl_->integral.size()) - 1;
}

void SolverModel::set_bounds(int col, double lb, double ub) {
  if (col < 0 || col >= num_cols())
    throw InputError("column index out of range");
  if (lb > ub)
    throw InputError("column with lb > ub");
  impl_->lb[col] = lb;
  impl_->ub[col] = ub;
  impl_->lp.set_bound(col, lb, ub);
}

double SolverModel::lower_bound(int col) const { return impl_->lb[col]; }
double SolverModel::upper_bound(int col) const { return impl_->ub[col]; }
int SolverModel::num_cols() const { return static_cast<int>(impl_->integral.size()); }
int SolverModel::num_rows() const { return static_cast<int>(impl_->rows.size()); }

void SolverModel::add_row(SolverRow row) {
  impl_->lp.add_row(row);
  impl_->rows.push_back(std::move(row));
}

void SolverModel::add_rows(std::vector<SolverRow> rows) {
  for (auto &r : rows)
    add_row(std::move(r));
}

void SolverModel::set_objective(Sense sense, std::vector<Rational> coeffs) {
  coeffs.resize(num_cols(), Rational(0));
  impl_->sense = sense;
  impl_->obj_user = coeffs;

  std::int64_t lcm = 1;
  for (const auto &c : coeffs)
    if (!c.is_zero())
      lcm = checked_lcm(lcm, c.den());
  impl_->obj_int.assign(num_cols(), 0);
  impl_->obj_integral = true;
  std::vector<double> internal(num_cols(), 0.0);
  for (int c = 0; c < num_cols(); ++c) {
    if (coeffs[c].is_zero())
      continue;
    __int128 v = (__int128)coeffs[c].num() * (lcm / coeffs[c].den());
    if (v > INT64_MAX || v < INT64_MIN)
      throw NumericalError("objective coefficient overflow after clearing");
    std::int64_t iv = static_cast<std::int64_t>(sense == Sense::maximize ? -v : v);
    impl_->obj_int[c] = iv;
    internal[c] = static_cast<double>(iv);
    if (!impl_->integral[c])
      impl_->obj_integral = false;
  }
  impl_->lp.set_objective(internal);
}

void SolverModel::set_tie_preference(std::vector<int> pref_cols) {
  impl_->pref_cols = std::move(pref_cols);
}

bool SolverModel::row_satisfied(const SolverRow &row, const std::vector<std::int64_t> &point) {
  __int128 lhs = 0;
  for (auto [c, a] : row.coeffs) {
    if (c < static_cast<int>(point.size()))
      lhs += (__int128)a * point[c];
  }
  switch (row.sense) {
  case RowSense::le:
    return lhs <= row.rhs;
  case RowSense::eq:
    return lhs == row.rhs;
  default:
    return lhs >= row.rhs;
  }
}

SolveOutcome SolverModel::solve(double time_limit_seconds) {
  Impl &im = *impl_;
  SimplexLP &lp = im.lp;
  const int ncols = num_cols();
  auto t0 = Clock::now();
  bool has_deadline = time_limit_seconds > 0;
  auto deadline = t0 + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(has_deadline ? time_limit_seconds : 0));
  auto out_of_time = [&] { return has_deadline && Clock::now() >= deadline; };

  // incumbent
  bool have_inc = false;
  std::vector<double> inc_vals;
  std::vector<std::int64_t> inc_ints;
  double inc_obj_dbl = 0.0;
  __int128 inc_obj_int = 0;
  std::int64_t nodes = 0;

  auto candidate_internal_obj = [&](const std::vector<double> &vals,
                                    const std::vector<std::int64_t> &ints, __int128 &as_int) {
    as_int = 0;
    double d = 0.0;
    for (int c = 0; c < ncols; ++c) {
      if (im.obj_int[c] == 0)
        continue;
      if (im.integral[c]) {
        as_int += (__int128)im.obj_int[c] * ints[c];
        d += static_cast<double>(im.obj_int[c]) * static_cast<double>(ints[c]);
      } else {
        d += static_cast<double>(im.obj_int[c]) * vals[c];
      }
    }
    return d;
  };

  auto prunable = [&](double bound) {
    if (!have_inc)
      return false;
    if (im.obj_integral) {
      __int128 b = (__int128)std::llround(std::ceil(bound - kIntTol));
      return b >= inc_obj_int;
    }
    return bound >= inc_obj_dbl - 1e-9 * (1.0 + std::abs(inc_obj_dbl));
  };

  auto try_accept = [&](void) {
    // called when the current LP solution is integral
    std::vector<double> vals(ncols);
    std::vector<std::int64_t> ints(ncols, 0);
    for (int c = 0; c < ncols; ++c) {
      vals[c] = lp.value(c);
      if (im.integral[c]) {
        ints[c] = std::llround(vals[c]);
        vals[c] = static_cast<double>(ints[c]);
      }
    }
    if (!im.verify_candidate(vals, ints))
      return; // fails the exact gate; treat as pruned
    __int128 oi = 0;
    double od = candidate_internal_obj(vals, ints, oi);
    bool better;
    if (im.obj_integral)
      better = !have_inc || oi < inc_obj_int;
    else
      better = !have_inc || od < inc_obj_dbl - 1e-9 * (1.0 + std::abs(od));
    if (better) {
      have_inc = true;
      inc_vals = std::move(vals);
      inc_ints = std::move(ints);
      inc_obj_dbl = od;
      inc_obj_int = oi;
    }
  };

  // DFS over bound fixings; the LP stays dual-feasible throughout
  struct Frame {
    int col;
    double save_lb, save_ub;
    double c_lb[2], c_ub[2];
    bool child_up[2];
    double parent_bound, frac;
    int phase; // next child to process (0,1), 2 = done
    std::multiset<double>::iterator pending[2];
  };
  std::vector<Frame> stack;
  std::multiset<double> pending_bounds;
  im.grow_pc();
  std::int64_t probes_left = 1000;

  auto global_bound_internal = [&](double current) {
    double b = current;
    if (!pending_bounds.empty())
      b = std::min(b, *pending_bounds.begin());
    if (have_inc)
      b = std::min(b, im.obj_integral ? static_cast<double>((std::int64_t)inc_obj_int)
                                      : inc_obj_dbl);
    return b;
  };

  auto finish = [&](SolveOutcome::Status st, double bound_internal) {
    SolveOutcome out;
    out.status = st;
    out.nodes = nodes;
    out.lp_pivots = lp.pivots();
    double flip = im.sense == Sense::maximize ? -1.0 : 1.0;
    // undo the denominator clearing on reported values
    std::int64_t lcm = 1;
    for (const auto &c : im.obj_user)
      if (!c.is_zero())
        lcm = checked_lcm(lcm, c.den());
    out.best_bound = flip * bound_internal / static_cast<double>(lcm);
    if (have_inc && (st == SolveOutcome::Status::optimal ||
                     st == SolveOutcome::Status::time_limit_with_incumbent)) {
      out.values = inc_vals;
      out.int_values = inc_ints;
      out.objective_value = flip * inc_obj_dbl / static_cast<double>(lcm);
      out.objective_is_exact = im.obj_integral;
      if (out.objective_is_exact) {
        Rational v = 0;
        for (int c = 0; c < ncols; ++c)
          if (!im.obj_user[c].is_zero())
            v += im.obj_user[c] * Rational(inc_ints[c]);
        out.objective_exact = v;
      }
      if (st == SolveOutcome::Status::optimal)
        out.best_bound = out.objective_value;
    }
    if (im.log)
      std::fprintf(stderr,
                   "milp status=%d value=%.10g bound=%.10g nodes=%lld pivots=%lld time=%.3f\n",
                   static_cast<int>(out.status), out.objective_value, out.best_bound,
                   static_cast<long long>(out.nodes), static_cast<long long>(out.lp_pivots),
                   std::chrono::duration<double>(Clock::now() - t0).count());
    return out;
  };

  auto tl_status = [&] {
    return have_inc ? SolveOutcome::Status::time_limit_with_incumbent
                    : SolveOutcome::Status::time_limit_no_incumbent;
  };

  // process one node: solve the LP at the current bounds, then either
  // prune, record an integer candidate, or pick a branching column by
  // pseudocost score (strong probes initialize shallow candidates).
  // returns -1 to prune/backtrack, otherwise the branching column.
  double node_bound = 0.0;
  double branch_val = 0.0;
  bool lp_was_optimal = false;
  auto process_node = [&]() -> int {
    ++nodes;
    lp_was_optimal = false;
    LpStatus st = lp.solve();
    if (st == LpStatus::infeasible)
      return -1;
    node_bound = lp.objective_value();
    lp_was_optimal = true;
    if (prunable(node_bound))
      return -1;

    struct Cand {
      int col;
      double val, frac; // frac = val - floor(val)
    };
    std::vector<Cand> cands;
    for (int c = 0; c < ncols; ++c) {
      if (!im.integral[c])
        continue;
      double v = lp.value(c);
      double f = v - std::floor(v);
      if (std::min(f, 1.0 - f) > kIntTol)
        cands.push_back({c, v, f});
    }
    if (cands.empty()) {
      try_accept();
      return -1;
    }

    // strong probes: a pivot-limited dual solve per direction seeds the
    // pseudocosts of untouched columns near the top of the tree
    if (stack.size() < 10 && probes_left > 0) {
      std::vector<int> order(cands.size());
      for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        double fa = std::min(cands[a].frac, 1 - cands[a].frac);
        double fb = std::min(cands[b].frac, 1 - cands[b].frac);
        return fa > fb || (fa == fb && cands[a].col < cands[b].col);
      });
      int probed = 0;
      for (int idx : order) {
        if (probed >= 6 || probes_left <= 0)
          break;
        const Cand &cd = cands[idx];
        if (im.pc_cnt[0][cd.col] + im.pc_cnt[1][cd.col] > 0)
          continue;
        ++probed;
        --probes_left;
        double save_lb = im.lb[cd.col], save_ub = im.ub[cd.col];
        bool dead[2] = {false, false};
        for (int dir = 0; dir < 2; ++dir) { // 0 = down, 1 = up
          double fl = std::floor(cd.val);
          if (dir == 0)
            lp.set_bound(cd.col, save_lb, fl);
          else
            lp.set_bound(cd.col, fl + 1, save_ub);
          LpStatus ps = lp.solve(300);
          double degr;
          if (ps == LpStatus::infeasible) {
            degr = 1e15;
            dead[dir] = true;
          } else if (ps == LpStatus::optimal) {
            degr = std::max(0.0, lp.objective_value() - node_bound);
            if (prunable(lp.objective_value()))
              dead[dir] = true;
          } else {
            degr = 0.0; // pivot limit: no information
          }
          double denom = dir == 0 ? cd.frac : 1.0 - cd.frac;
          im.pc_sum[dir][cd.col] += degr / std::max(denom, 1e-6);
          im.pc_cnt[dir][cd.col] += 1;
          lp.set_bound(cd.col, save_lb, save_ub);
        }
        if (dead[0] && dead[1])
          return -1; // both sides gone: the node itself is done
      }
    }

    // pseudocost product score; uninitialized columns fall back to the
    // average initialized pseudocost
    double avg[2] = {1.0, 1.0};
    for (int dir = 0; dir < 2; ++dir) {
      double s = 0;
      std::int64_t n = 0;
      for (int c = 0; c < ncols; ++c)
        if (im.pc_cnt[dir][c] > 0) {
          s += im.pc_sum[dir][c] / static_cast<double>(im.pc_cnt[dir][c]);
          ++n;
        }
      if (n > 0)
        avg[dir] = s / static_cast<double>(n);
    }
    int best_col = -1;
    double best_score = -1, best_val = 0;
    for (const auto &cd : cands) {
      double pc[2];
      for (int dir = 0; dir < 2; ++dir)
        pc[dir] = im.pc_cnt[dir][cd.col] > 0
                      ? im.pc_sum[dir][cd.col] / static_cast<double>(im.pc_cnt[dir][cd.col])
                      : avg[dir];
      double down = std::max(pc[0] * cd.frac, 1e-6);
      double up = std::max(pc[1] * (1.0 - cd.frac), 1e-6);
      double score = down * up;
      if (score > best_score + 1e-12 ||
          (score > best_score - 1e-12 && (best_col < 0 || cd.col < best_col))) {
        best_score = score;
        best_col = cd.col;
        best_val = cd.val;
      }
    }
    branch_val = best_val;
    return best_col;
  };

  // root cover cuts: for a row sum a_j x_j <= b over binaries (negative
  // coefficients complemented away), any set C with sum_C a_j > b obeys
  // sum_C x_j <= |C| - 1. Greedy separation against the LP point; the
  // cuts are implied rows, so they stay for later re-solves.
  auto separate_covers = [&](const std::vector<double> &vals) {
    std::vector<SolverRow> found;
    for (const auto &row : im.rows) {
      if (found.size() >= 30)
        break;
      if (row.sense == RowSense::eq)
        continue;
      double sign = row.sense == RowSense::le ? 1.0 : -1.0;
      bool usable = !row.coeffs.empty();
      __int128 bprime = sign > 0 ? row.rhs : -row.rhs;
      struct Item {
        int col;
        std::int64_t a;
        bool complemented;
        double v;
      };
      std::vector<Item> items;
      for (auto [c, a0] : row.coeffs) {
        std::int64_t a = sign > 0 ? a0 : -a0;
        if (!im.integral[c] || im.lb[c] < -kIntTol || im.ub[c] > 1 + kIntTol) {
          usable = false;
          break;
        }
        if (a == 0)
          continue;
        double v = std::clamp(vals[c], 0.0, 1.0);
        if (a > 0)
          items.push_back({c, a, false, v});
        else {
          bprime += -a;
          items.push_back({c, -a, true, 1.0 - v});
        }
      }
      if (!usable || items.empty() || bprime < 0)
        continue;
      // largest LP value first: the most fractional support
      std::sort(items.begin(), items.end(), [](const Item &x, const Item &y) {
        return x.v > y.v || (x.v == y.v && x.col < y.col);
      });
      __int128 weight = 0;
      std::size_t take = 0;
      while (take < items.size() && weight <= bprime)
        weight += items[take++].a;
      if (weight <= bprime)
        continue; // the row cannot be covered
      // trim to a minimal cover, dropping light members first
      std::vector<Item> cover(items.begin(), items.begin() + take);
      std::sort(cover.begin(), cover.end(), [](const Item &x, const Item &y) {
        return x.a < y.a || (x.a == y.a && x.col < y.col);
      });
      std::vector<Item> kept;
      for (const auto &it : cover) {
        if (weight - it.a > bprime)
          weight -= it.a;
        else
          kept.push_back(it);
      }
      double lp_sum = 0;
      for (const auto &it : kept)
        lp_sum += it.v;
      if (lp_sum <= static_cast<double>(kept.size() - 1) + 1e-4)
        continue; // not violated by the LP point
      SolverRow cut;
      cut.sense = RowSense::le;
      std::int64_t rhs = static_cast<std::int64_t>(kept.size()) - 1;
      for (const auto &it : kept) {
        if (it.complemented) {
          cut.coeffs.emplace_back(it.col, -1);
          rhs -= 1;
        } else {
          cut.coeffs.emplace_back(it.col, 1);
        }
      }
      cut.rhs = rhs;
      found.push_back(std::move(cut));
    }
    return found;
  };

  auto root_cover_rounds = [&] {
    if (lp.solve() == LpStatus::infeasible)
      return;
    for (int round = 0; round < 5; ++round) {
      auto cuts = separate_covers(lp.values());
      if (cuts.empty())
        return;
      for (auto &c : cuts) {
        im.rows.push_back(c);
        lp.add_row(c);
      }
      if (lp.solve() == LpStatus::infeasible)
        return;
    }
  };

  // deterministic tie handling: once the optimum V is proven, a second
  // search over the optimal face (objective pinned to V) maximizes the
  // preference score and replaces the incumbent
  auto resolve_ties = [&] {
    if (!have_inc || im.pref_cols.empty() || !im.obj_integral || im.in_tie_phase)
      return;
    __int128 cur_score = 0;
    for (int c : im.pref_cols)
      cur_score += inc_ints[c];
    SolverModel phase2;
    phase2.impl_->in_tie_phase = true;
    phase2.impl_->node_limit = 50000; // keep the tie pass subordinate
    for (int c = 0; c < ncols; ++c)
      phase2.add_column(im.lb[c], im.ub[c], im.integral[c]);
    for (const auto &r : im.rows)
      phase2.add_row(r);
    SolverRow pin; // objective <= V in the internal min form
    for (int c = 0; c < ncols; ++c)
      if (im.obj_int[c] != 0)
        pin.coeffs.emplace_back(c, im.obj_int[c]);
    pin.sense = RowSense::le;
    if (inc_obj_int > INT64_MAX || inc_obj_int < INT64_MIN)
      return;
    pin.rhs = static_cast<std::int64_t>(inc_obj_int);
    phase2.add_row(std::move(pin));
    std::vector<Rational> score(ncols, Rational(0));
    for (int c : im.pref_cols)
      score[c] = 1;
    phase2.set_objective(Sense::maximize, std::move(score));
    double budget =
        has_deadline ? std::chrono::duration<double>(deadline - Clock::now()).count() : -1;
    if (has_deadline && budget <= 0)
      return;
    SolveOutcome alt = phase2.solve(budget);
    if (alt.status == SolveOutcome::Status::optimal &&
        alt.objective_exact > Rational(static_cast<std::int64_t>(cur_score))) {
      inc_vals = alt.values;
      inc_ints = alt.int_values;
      __int128 oi = 0;
      inc_obj_dbl = candidate_internal_obj(inc_vals, inc_ints, oi);
      inc_obj_int = oi;
    }
    nodes += alt.nodes;
  };

  if (out_of_time())
    return finish(tl_status(), global_bound_internal(-detail::kInf));

  root_cover_rounds();
  int branch_col = process_node();

  while (true) {
    if (branch_col >= 0) {
      Frame f;
      f.col = branch_col;
      f.save_lb = im.lb[branch_col];
      f.save_ub = im.ub[branch_col];
      f.parent_bound = node_bound;
      double v = branch_val;
      double fl = std::floor(v);
      f.frac = v - fl;
      // dive toward the nearest integer first
      bool up_first = f.frac >= 0.5;
      f.c_lb[0] = up_first ? fl + 1 : f.save_lb;
      f.c_ub[0] = up_first ? f.save_ub : fl;
      f.c_lb[1] = up_first ? f.save_lb : fl + 1;
      f.c_ub[1] = up_first ? fl : f.save_ub;
      f.child_up[0] = up_first;
      f.child_up[1] = !up_first;
      f.phase = 0;
      f.pending[0] = pending_bounds.insert(node_bound);
      f.pending[1] = pending_bounds.insert(node_bound);
      stack.push_back(f);
    }

    // advance: find the next child to process, backtracking as needed
    bool processed = false;
    while (!stack.empty() && !processed) {
      Frame &f = stack.back();
      if (f.phase >= 2) {
        im.lb[f.col] = f.save_lb;
        im.ub[f.col] = f.save_ub;
        lp.set_bound(f.col, f.save_lb, f.save_ub);
        stack.pop_back();
        continue;
      }
      if (out_of_time() || (im.node_limit > 0 && nodes >= im.node_limit))
        return finish(tl_status(), global_bound_internal(detail::kInf));
      int k = f.phase++;
      pending_bounds.erase(f.pending[k]);
      im.lb[f.col] = f.c_lb[k];
      im.ub[f.col] = f.c_ub[k];
      lp.set_bound(f.col, f.c_lb[k], f.c_ub[k]);
      double parent_bound = f.parent_bound, frac = f.frac;
      int pc_dir = f.child_up[k] ? 1 : 0;
      int pc_col = f.col;
      branch_col = process_node();
      if (lp_was_optimal) {
        double denom = pc_dir == 0 ? frac : 1.0 - frac;
        im.pc_sum[pc_dir][pc_col] +=
            std::max(0.0, node_bound - parent_bound) / std::max(denom, 1e-6);
        im.pc_cnt[pc_dir][pc_col] += 1;
      }
      processed = true;
    }
    if (stack.empty() && !processed)
      break;
  }

  if (!have_inc)
    return finish(SolveOutcome::Status::infeasible, detail::kInf);
  resolve_ties();
  return finish(SolveOutcome::Status::optimal, inc_obj_dbl);
}

} // namespace ipg

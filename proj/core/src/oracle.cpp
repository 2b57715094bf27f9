// SPDX-License-Identifier: Apache-2.0
#include "ipg/oracle.hpp"

#include "ipg/errors.hpp"

#include <algorithm>
#include <thread>

namespace ipg {

struct SeparationOracle::Sub {
  SolverModel model;
  bool built = false;
};

SeparationOracle::SeparationOracle(const LiftedModel &lift) : lift_(lift) {
  subs_.resize(lift.game().num_players);
  for (auto &s : subs_)
    s = std::make_shared<Sub>();
}

BestResponse SeparationOracle::best_response(int player, const StrategyProfile &profile,
                                             double time_limit) {
  const GameInstance &game = lift_.game();
  if (player < 0 || player >= game.num_players)
    throw InputError("player index out of range");
  check_profile(game, profile);

  Sub &sub = *subs_[player];
  if (!sub.built) {
    sub.model = lift_.instantiate();
    std::vector<Rational> obj(lift_.num_cols(), Rational(0));
    for (const auto &[col, c] : lift_.utility(player).terms)
      obj[col] += c;
    sub.model.set_objective(game.sense(), std::move(obj));
    sub.built = true;
  }

  // fix every opponent bit column to its induced value
  std::vector<std::int64_t> ints = lift_.induced_ints(profile);
  for (int k = 0; k < game.num_players; ++k) {
    if (k == player)
      continue;
    for (int col : lift_.player_bits(k)) {
      double v = static_cast<double>(ints[col]);
      sub.model.set_bounds(col, v, v);
    }
  }

  SolveOutcome out = sub.model.solve(time_limit);
  if (out.status == SolveOutcome::Status::infeasible)
    throw InputError("player " + std::to_string(player) +
                     " has an empty feasible set (ill-posed game)");
  if (!out.has_incumbent())
    throw OracleTimeout("best-response subproblem hit the time limit");

  StrategyProfile dev_profile = profile;
  dev_profile.x[player] = lift_.decode(out.int_values).x[player];

  BestResponse br;
  br.strategy = dev_profile.x[player];
  br.value = lift_.exact_payoff(player, dev_profile);
  return br;
}

EquilibriumCut SeparationOracle::make_cut(int player, const std::vector<std::int64_t> &deviation,
                                          const SeparationOptions &opts) const {
  const GameInstance &game = lift_.game();
  const bool maximize = game.sense() == Sense::maximize;

  // left side: u^i(deviation, x^{-i}) as a linear expression. Bit
  // columns of the player become constants; products touching the
  // player collapse onto the opponent bit; custom terms come from the
  // custom lift's deviation expression.
  LiftedExpr lhs;
  DeviationExpr custom_dev;
  StrategyProfile dev_only;
  dev_only.x.resize(game.num_players);
  for (int k = 0; k < game.num_players; ++k)
    dev_only.x[k].assign(game.players[k].num_vars, 0);
  dev_only.x[player] = deviation;
  std::vector<std::int64_t> dev_bits = lift_.induced_ints(dev_only);

  const auto &cols = lift_.columns();
  for (const auto &[col, coeff] : lift_.utility(player).terms) {
    const LiftedColumn &lc = cols[col];
    switch (lc.kind) {
    case LiftedColumn::Kind::bit:
      if (lc.player == player)
        lhs.constant += coeff * Rational(dev_bits[col]);
      else
        lhs.add_term(col, coeff);
      break;
    case LiftedColumn::Kind::product: {
      int pa = cols[lc.bit_a].player, pb = cols[lc.bit_b].player;
      if (pa == player && pb == player)
        lhs.constant += coeff * Rational(dev_bits[lc.bit_a] * dev_bits[lc.bit_b]);
      else if (pa == player)
        lhs.add_term(lc.bit_b, coeff * Rational(dev_bits[lc.bit_a]));
      else if (pb == player)
        lhs.add_term(lc.bit_a, coeff * Rational(dev_bits[lc.bit_b]));
      else
        lhs.add_term(col, coeff);
      break;
    }
    case LiftedColumn::Kind::custom:
      // handled wholesale below
      break;
    }
  }
  lhs.constant += lift_.utility(player).constant;
  if (lift_.custom()) {
    custom_dev = lift_.custom()->deviation_utility(lift_, player, deviation);
    lhs.constant += custom_dev.expr.constant;
    for (const auto &[col, c] : custom_dev.expr.terms)
      lhs.add_term(col, c);
  }

  // inequality, maximization: lhs [-eps|*eps] <= u^i(x, x^-i)
  // minimization: u^i(x, x^-i) [-eps] <= lhs
  RationalRow row;
  row.sense = RowSense::ge;
  const LiftedExpr &rhs = lift_.utility(player);
  Rational lhs_scale = 1;
  if (opts.mode == SeparationMode::epsilon_rel)
    lhs_scale = opts.epsilon;
  LiftedExpr diff; // diff >= 0
  auto acc = [&](const LiftedExpr &e, const Rational &s) {
    diff.constant += e.constant * s;
    for (const auto &[col, c] : e.terms)
      diff.add_term(col, c * s);
  };
  if (maximize) {
    acc(rhs, Rational(1));
    acc(lhs, -lhs_scale);
  } else {
    acc(lhs, Rational(1));
    acc(rhs, -Rational(1));
  }
  if (opts.mode == SeparationMode::epsilon_abs) {
    if (opts.epsilon_col >= 0)
      diff.add_term(opts.epsilon_col, Rational(1));
    else
      diff.constant += opts.epsilon;
  }
  for (const auto &[col, c] : diff.terms)
    row.terms.emplace_back(col, c);
  row.rhs = -diff.constant;

  EquilibriumCut cut;
  cut.provenance = opts.mode == SeparationMode::exact ? EquilibriumCut::Provenance::general
                                                      : EquilibriumCut::Provenance::epsilon;
  cut.player = player;
  cut.deviation = deviation;
  cut.row = clear_row(row);
  cut.new_columns = custom_dev.new_columns;
  for (const auto &r : custom_dev.new_rows)
    cut.new_rows.push_back(clear_row(r));
  cut.attachment_values = custom_dev.attachment_values;
  return cut;
}

SeparationResult SeparationOracle::separate(const StrategyProfile &profile,
                                            const SeparationOptions &opts) {
  const GameInstance &game = lift_.game();
  check_profile(game, profile);
  const int n = game.num_players;
  const bool maximize = game.sense() == Sense::maximize;

  std::vector<BestResponse> br(n);
  std::vector<std::exception_ptr> errors(n);
  auto solve_one = [&](int i) {
    try {
      br[i] = best_response(i, profile, opts.time_limit);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  if (opts.parallel && n > 1) {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (int i = 0; i < n; ++i)
      pool.emplace_back(solve_one, i);
    for (auto &t : pool)
      t.join();
  } else {
    for (int i = 0; i < n; ++i)
      solve_one(i);
  }
  for (int i = 0; i < n; ++i)
    if (errors[i])
      std::rethrow_exception(errors[i]);

  SeparationResult res;
  res.regrets.resize(n, Rational(0));
  for (int i = 0; i < n; ++i) {
    Rational cur = lift_.exact_payoff(i, profile);
    Rational gain = maximize ? br[i].value - cur : cur - br[i].value;
    if (gain > Rational(0))
      res.regrets[i] = gain;

    bool violated;
    switch (opts.mode) {
    case SeparationMode::exact:
      violated = gain > Rational(0);
      break;
    case SeparationMode::epsilon_abs:
      if (opts.epsilon_col >= 0)
        violated = res.regrets[i].to_double() > opts.epsilon_value + 1e-7;
      else
        violated = gain > opts.epsilon;
      break;
    case SeparationMode::epsilon_rel:
      if (br[i].value < Rational(0))
        throw InputError("relative epsilon mode requires nonnegative best-response values");
      violated = opts.epsilon * br[i].value > cur;
      break;
    default:
      violated = false;
    }
    if (violated && !(opts.single_cut && !res.cuts.empty()))
      res.cuts.push_back(make_cut(i, br[i].strategy, opts));
  }
  res.is_equilibrium = res.cuts.empty();
  return res;
}

EquilibriumCut make_nogood_cut(const LiftedModel &lift, const StrategyProfile &profile) {
  std::vector<std::int64_t> ints = lift.induced_ints(profile);
  EquilibriumCut cut;
  cut.provenance = EquilibriumCut::Provenance::nogood;
  SolverRow row;
  row.sense = RowSense::ge;
  std::int64_t ones = 0;
  for (int i = 0; i < lift.game().num_players; ++i) {
    for (int col : lift.player_bits(i)) {
      if (ints[col]) {
        row.coeffs.emplace_back(col, -1);
        ++ones;
      } else {
        row.coeffs.emplace_back(col, 1);
      }
    }
  }
  row.rhs = 1 - ones;
  cut.row = std::move(row);
  return cut;
}

} // namespace ipg

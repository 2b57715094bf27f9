// SPDX-License-Identifier: Apache-2.0
#include "ipg/master.hpp"

#include "ipg/brute_force.hpp"
#include "ipg/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace ipg {

using Clock = std::chrono::steady_clock;

void SolveConfig::validate() const {
  if (enumerate_limit < 1)
    throw InputError("enumerate limit must be >= 1");
  if (epsilon && *epsilon < Rational(0))
    throw InputError("epsilon must be >= 0");
  if (mode == Mode::epsilon_rel && !epsilon)
    throw InputError("relative epsilon mode needs a fixed epsilon");
}

namespace {

/// Remap a cut's attachment columns/rows onto a live model and append
/// everything.
void apply_cut(SolverModel &model, const EquilibriumCut &cut) {
  int actual = model.num_cols();
  auto remap = [&](int col) {
    return col < kAttachmentBase ? col : actual + (col - kAttachmentBase);
  };
  for (const auto &nc : cut.new_columns)
    model.add_column(nc.lb, nc.ub, nc.integral);
  auto remap_row = [&](const SolverRow &r) {
    SolverRow out = r;
    for (auto &[col, a] : out.coeffs)
      col = remap(col);
    return out;
  };
  for (const auto &r : cut.new_rows)
    model.add_row(remap_row(r));
  model.add_row(remap_row(cut.row));
}

/// Static precondition for relative-epsilon mode: a guaranteed
/// nonnegative best-response value for every player. Sufficient
/// condition: maximization, the all-zero strategy is feasible, and the
/// player's utility vanishes on it against any opponents (no constant
/// and no pure-opponent terms).
void check_relative_mode(const LiftedModel &lift) {
  const GameInstance &game = lift.game();
  if (game.sense() != Sense::maximize)
    throw InputError("relative epsilon mode supports maximization games only");
  const auto &cols = lift.columns();
  for (int i = 0; i < game.num_players; ++i) {
    std::vector<std::int64_t> zero(game.players[i].num_vars, 0);
    bool ok = lift.utility(i).constant.is_zero();
    for (const auto &d : game.players[i].domains)
      if (d.lower > 0 || d.upper < 0)
        ok = false;
    ok = ok && is_feasible(game, i, zero);
    for (const auto &[col, c] : lift.utility(i).terms) {
      (void)c;
      const LiftedColumn &lc = cols[col];
      bool touches_own =
          (lc.kind == LiftedColumn::Kind::bit && lc.player == i) ||
          (lc.kind == LiftedColumn::Kind::product &&
           (cols[lc.bit_a].player == i || cols[lc.bit_b].player == i));
      if (!touches_own)
        ok = false;
    }
    if (!ok)
      throw InputError("relative epsilon mode requires provably nonnegative "
                       "best-response values: the all-zero strategy must be "
                       "feasible and the utility must vanish on it");
  }
}

struct MasterState {
  SolverModel model;
  int epsilon_col = -1;
  std::vector<int> pref_cols;
};

MasterState build_master(const LiftedModel &lift, bool minimize_eps) {
  MasterState st;
  st.model = lift.instantiate();
  const GameInstance &game = lift.game();

  // equal-welfare masters are resolved deterministically, preferring
  // points that activate auxiliary product columns (mutually consistent
  // joint choices); see SolverModel::set_tie_preference
  for (int c = 0; c < lift.num_cols(); ++c) {
    const auto &col = lift.columns()[c];
    if (col.integral && col.kind != LiftedColumn::Kind::bit)
      st.pref_cols.push_back(c);
  }

  std::vector<Rational> obj(lift.num_cols(), Rational(0));
  if (minimize_eps) {
    // bounded continuous epsilon column; bound = the widest utility range
    Rational span = 0;
    for (int i = 0; i < game.num_players; ++i) {
      Rational s = 0;
      for (const auto &[col, c] : lift.utility(i).terms) {
        const auto &lc = lift.columns()[col];
        s += c.abs() * (Rational(std::int64_t(std::ceil(lc.ub))) -
                        Rational(std::int64_t(std::floor(lc.lb))));
      }
      if (s > span)
        span = s;
    }
    st.epsilon_col = st.model.add_column(0.0, span.to_double() + 1.0, false);
    obj.resize(lift.num_cols() + 1, Rational(0));
    obj[st.epsilon_col] = 1;
    st.model.set_objective(Sense::minimize, std::move(obj));
  } else {
    for (const auto &[col, c] : lift.welfare_expr().terms)
      obj[col] += c;
    st.model.set_objective(game.sense(), std::move(obj));
    st.model.set_tie_preference(st.pref_cols);
  }
  return st;
}

SolveReport run_master(const LiftedModel &lift, const SolveConfig &config) {
  config.validate();
  const GameInstance &game = lift.game();
  const bool enumerate = config.mode == SolveConfig::Mode::enumerate_all;
  const bool minimize_eps = config.mode == SolveConfig::Mode::epsilon_abs && !config.epsilon;
  if (config.mode == SolveConfig::Mode::epsilon_rel)
    check_relative_mode(lift);

  auto t0 = Clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };
  auto remaining = [&] { return config.time_limit - elapsed(); };

  MasterState st = build_master(lift, minimize_eps);
  SeparationOracle oracle(lift);

  SeparationOptions sep;
  sep.parallel = config.parallel_oracle;
  sep.single_cut = config.cut_batch == SolveConfig::CutBatch::one;
  switch (config.mode) {
  case SolveConfig::Mode::epsilon_abs:
    sep.mode = SeparationMode::epsilon_abs;
    if (config.epsilon)
      sep.epsilon = *config.epsilon;
    else
      sep.epsilon_col = st.epsilon_col;
    break;
  case SolveConfig::Mode::epsilon_rel:
    sep.mode = SeparationMode::epsilon_rel;
    sep.epsilon = *config.epsilon;
    break;
  default:
    sep.mode = SeparationMode::exact;
  }

  SolveReport rep;
  std::vector<Rational> best_regrets;

  auto finalize = [&](SolveStatus status) {
    rep.status = status;
    rep.time_total = elapsed();
    if (!rep.pnes.empty() && rep.osw) {
      rep.pos = welfare_price(*rep.osw, rep.pnes.front().second, game.sense());
      if (enumerate) // worst PNE is the last one found
        rep.poa = welfare_price(*rep.osw, rep.pnes.back().second, game.sense());
    }
    if (!rep.pnes.empty() && sep.mode != SeparationMode::exact && !best_regrets.empty()) {
      Rational mx = 0;
      for (const auto &r : best_regrets)
        if (r > mx)
          mx = r;
      rep.epsilon = mx;
    }
    return rep;
  };

  while (true) {
    double budget = remaining();
    if (budget <= 0)
      return finalize(SolveStatus::TIME_LIMIT);

    SolveOutcome out = st.model.solve(budget);
    if (out.status == SolveOutcome::Status::infeasible) {
      if (rep.iterations == 0)
        throw InputError("the welfare relaxation is infeasible at iteration 0; "
                         "some player has an empty feasible set");
      // Q infeasible: either no PNE exists or the enumeration is complete
      if (enumerate)
        return finalize(rep.pnes.empty() ? SolveStatus::NO_PNE : SolveStatus::PNE_FOUND);
      return finalize(SolveStatus::NO_PNE);
    }
    if (!out.has_incumbent())
      return finalize(SolveStatus::TIME_LIMIT);
    rep.last_bound = out.best_bound;
    ++rep.iterations;

    StrategyProfile profile = lift.decode(out.int_values);
    if (rep.iterations == 1 && !minimize_eps)
      rep.osw = lift.exact_welfare(profile);

    IterationRecord rec;
    rec.master_value = out.objective_value;
    for (int i = 0; i < game.num_players; ++i)
      for (int col : lift.player_bits(i))
        rec.profile_bits.push_back(out.int_values[col]);
    rep.trace.push_back(std::move(rec));

    // lazy separation of the problem-specific pool: add what the
    // incumbent violates and re-solve without calling the oracle. The
    // pool is valid for exact equilibria only: a profile may be
    // eps-stable even when a strictly improving item swap exists.
    if (config.use_strategic_cuts && !config.strategic_pool.empty() &&
        sep.mode == SeparationMode::exact) {
      bool added = false;
      for (const auto &cut : config.strategic_pool) {
        if (SolverModel::row_satisfied(cut.row, out.int_values))
          continue;
        apply_cut(st.model, cut);
        added = true;
        if (config.record_cuts)
          rep.cuts.push_back(cut);
        if (cut.provenance == EquilibriumCut::Provenance::dominance)
          ++rep.ei_dominance;
        else if (cut.provenance == EquilibriumCut::Provenance::payoff)
          ++rep.ei_payoff;
        else
          ++rep.ei_general;
      }
      if (added)
        continue;
    }

    sep.time_limit = remaining();
    if (sep.time_limit <= 0)
      return finalize(SolveStatus::TIME_LIMIT);
    if (sep.epsilon_col >= 0)
      sep.epsilon_value = out.values[sep.epsilon_col];

    SeparationResult res;
    try {
      res = oracle.separate(profile, sep);
    } catch (const OracleTimeout &) {
      return finalize(SolveStatus::TIME_LIMIT);
    }

    if (res.is_equilibrium) {
      Rational w = lift.exact_welfare(profile);
      rep.pnes.emplace_back(profile, w);
      if (rep.time_first < 0)
        rep.time_first = elapsed();
      if (rep.pnes.size() == 1)
        best_regrets = res.regrets;
      if (!enumerate || static_cast<int>(rep.pnes.size()) >= config.enumerate_limit)
        return finalize(SolveStatus::PNE_FOUND);
      apply_cut(st.model, make_nogood_cut(lift, profile));
      continue;
    }
    for (const auto &cut : res.cuts) {
      apply_cut(st.model, cut);
      ++rep.ei_general;
      if (config.record_cuts)
        rep.cuts.push_back(cut);
    }
  }
}

} // namespace

SolveReport select_best_pne(const LiftedModel &lift, const SolveConfig &config) {
  SolveConfig c = config;
  c.mode = SolveConfig::Mode::select;
  return run_master(lift, c);
}

SolveReport enumerate_pnes(const LiftedModel &lift, const SolveConfig &config) {
  SolveConfig c = config;
  c.mode = SolveConfig::Mode::enumerate_all;
  return run_master(lift, c);
}

SolveReport epsilon_pne(const LiftedModel &lift, const SolveConfig &config) {
  SolveConfig c = config;
  if (c.mode != SolveConfig::Mode::epsilon_rel)
    c.mode = SolveConfig::Mode::epsilon_abs;
  return run_master(lift, c);
}

SolveReport select_best_pne(const GameInstance &game, const SolveConfig &config) {
  return select_best_pne(build_lifted_model(game), config);
}

SolveReport enumerate_pnes(const GameInstance &game, const SolveConfig &config) {
  return enumerate_pnes(build_lifted_model(game), config);
}

} // namespace ipg

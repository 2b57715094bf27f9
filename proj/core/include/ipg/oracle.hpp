// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"
#include "ipg/lift.hpp"
#include "ipg/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace ipg {

/// One linear inequality valid for every PNE of the game, tagged with
/// the player and deviation that produced it. Rows may carry fresh
/// columns/rows (fractional-share deviations); those use the
/// kAttachmentBase index space and get remapped when the cut lands in a
/// model.
struct EquilibriumCut {
  enum class Provenance { general, dominance, payoff, nogood, epsilon };
  Provenance provenance = Provenance::general;
  int player = -1;
  std::vector<std::int64_t> deviation;
  SolverRow row;
  std::vector<DeviationExpr::NewColumn> new_columns;
  std::vector<SolverRow> new_rows;
  std::function<std::vector<Rational>(const StrategyProfile &)> attachment_values;

  /// No-good rows are invalid by design (they cut certified PNEs off);
  /// validity checks skip them.
  bool valid_for_equilibria() const { return provenance != Provenance::nogood; }
};

struct BestResponse {
  std::vector<std::int64_t> strategy;
  Rational value;
};

enum class SeparationMode { exact, epsilon_abs, epsilon_rel };

struct SeparationOptions {
  SeparationMode mode = SeparationMode::exact;
  Rational epsilon = 0;      // fixed tolerance (abs or rel)
  int epsilon_col = -1;      // >= 0: bounded continuous epsilon column in the master
  double epsilon_value = 0;  // incumbent value of that column
  double time_limit = -1;    // per call; <= 0 means none
  bool parallel = true;      // solve the per-player subproblems concurrently
  bool single_cut = false;   // emit only the first violated player's cut
};

struct SeparationResult {
  bool is_equilibrium = false;
  std::vector<EquilibriumCut> cuts;
  std::vector<Rational> regrets; // per player, exact (filled on yes and no)
};

/// Per-player best responses against a fixed candidate profile, PNE
/// certification, and generation of equilibrium inequalities in lifted
/// coordinates. Stateless given (game, lift) apart from cached
/// subproblem models, which are confined to their player's thread.
class SeparationOracle {
public:
  explicit SeparationOracle(const LiftedModel &lift);

  /// Optimal strategy of `player` against the opponents in `profile`
  /// (the player's own entry is ignored). The subproblem fixes opponent
  /// bit columns in a copy of K and optimizes the player's lifted
  /// utility; the returned value is re-evaluated exactly.
  BestResponse best_response(int player, const StrategyProfile &profile,
                             double time_limit = -1);

  /// Runs the per-player best responses; emits at most one cut per
  /// player, each strictly violated by the given point. Returns yes
  /// (empty cut set) iff the decoded profile is a PNE (resp. eps-PNE).
  SeparationResult separate(const StrategyProfile &profile, const SeparationOptions &opts = {});

  /// The generic equilibrium inequality for a player/deviation pair, in
  /// lifted coordinates: u^i(deviation, x^-i) <= u^i(x^i, x^-i).
  EquilibriumCut make_cut(int player, const std::vector<std::int64_t> &deviation,
                          const SeparationOptions &opts) const;

private:
  struct Sub; // cached per-player subproblem
  std::vector<std::shared_ptr<Sub>> subs_;
  const LiftedModel &lift_;
};

/// Row excluding exactly one integer point, over the bit columns:
/// sum_{bits=1}(1-b) + sum_{bits=0} b >= 1.
EquilibriumCut make_nogood_cut(const LiftedModel &lift, const StrategyProfile &profile);

} // namespace ipg

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"
#include "ipg/lift.hpp"
#include "ipg/oracle.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ipg {

enum class SolveStatus { PNE_FOUND, NO_PNE, TIME_LIMIT };

struct SolveConfig {
  enum class Mode { select, enumerate_all, epsilon_abs, epsilon_rel };
  Mode mode = Mode::select;
  int enumerate_limit = std::numeric_limits<int>::max(); // >= 1
  /// Fixed tolerance for the epsilon modes; nullopt in epsilon_abs
  /// turns the objective into "minimize epsilon".
  std::optional<Rational> epsilon;
  double time_limit = 1800.0;
  enum class CutBatch { all, one } cut_batch = CutBatch::all;
  /// Problem-specific equilibrium inequalities, separated lazily: per
  /// iteration only the ones violated by the incumbent are added.
  std::vector<EquilibriumCut> strategic_pool;
  bool use_strategic_cuts = true;
  bool parallel_oracle = true;
  /// keep a copy of every cut added to the master (validity audits)
  bool record_cuts = false;

  void validate() const;
};

struct IterationRecord {
  double master_value = 0.0;              // welfare of the incumbent (objective units)
  std::vector<std::int64_t> profile_bits; // incumbent identity (bit columns)
};

struct SolveReport {
  SolveStatus status = SolveStatus::NO_PNE;
  std::vector<std::pair<StrategyProfile, Rational>> pnes; // with welfare, discovery order
  std::optional<Rational> osw;
  std::optional<Rational> pos, poa;
  /// exact max regret of the returned profile in the epsilon modes
  std::optional<Rational> epsilon;

  std::int64_t ei_general = 0;   // #EI
  std::int64_t ei_payoff = 0;    // #EI_P
  std::int64_t ei_dominance = 0; // #EI_D
  std::int64_t iterations = 0;   // #It (master solves)
  double time_total = 0.0;
  double time_first = -1.0; // wall clock when the first PNE was certified
  std::optional<double> last_bound;

  std::vector<IterationRecord> trace;  // for monotonicity checks
  std::vector<EquilibriumCut> cuts;    // filled when SolveConfig::record_cuts

  const std::pair<StrategyProfile, Rational> *best_pne() const {
    return pnes.empty() ? nullptr : &pnes.front();
  }
};

/// Welfare-optimal PNE via the cutting-plane loop: optimize welfare
/// over K plus accumulated cuts, ask the separation oracle, repeat.
/// Infeasibility of the master certifies that no PNE exists.
SolveReport select_best_pne(const LiftedModel &lift, const SolveConfig &config = {});

/// Every certified PNE is recorded, excluded with a no-good row over
/// its bit columns, and the loop continues until the master goes
/// infeasible: complete enumeration in welfare-nonincreasing order.
SolveReport enumerate_pnes(const LiftedModel &lift, const SolveConfig &config = {});

/// Approximate equilibria: the oracle separates at tolerance epsilon
/// (absolute or relative); with no fixed epsilon the master minimizes a
/// bounded continuous epsilon column instead of the welfare.
SolveReport epsilon_pne(const LiftedModel &lift, const SolveConfig &config);

// conveniences for plain polynomial games
SolveReport select_best_pne(const GameInstance &game, const SolveConfig &config = {});
SolveReport enumerate_pnes(const GameInstance &game, const SolveConfig &config = {});

// --- reporting -------------------------------------------------------------

std::string status_name(SolveStatus s);
std::string report_to_json(const SolveReport &report, const std::string &instance_label);
std::string report_csv_header();
std::string report_csv_row(const SolveReport &report, const std::string &instance_label);

} // namespace ipg

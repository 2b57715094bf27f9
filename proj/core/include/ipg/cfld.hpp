// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"
#include "ipg/lift.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ipg {

/// Competitive facility location and design: players open facilities
/// (location + design under a budget) and split each customer's demand
/// in proportion to attraction, against a positive outside option.
struct CfldInstance {
  int num_locations = 0;
  int num_customers = 0;
  std::vector<int> designs;                // per location
  std::vector<Rational> demand;            // w_j >= 0
  std::vector<std::vector<std::vector<std::vector<Rational>>>> utility; // [i][l][r][j] >= 0
  std::vector<std::vector<std::vector<std::int64_t>>> fixed_cost;       // [i][l][r]
  std::vector<std::int64_t> budget;                                     // per player
  std::vector<Rational> outside;                                        // u0_j > 0

  int num_players() const { return static_cast<int>(budget.size()); }
  int var_index(int l, int r) const; // flattened (location, design)
  int total_vars() const;
  void validate() const;
};

struct CfldGame {
  GameInstance game;
  std::shared_ptr<const CustomLift> lift;
  CfldInstance instance;
};

/// Binary open/design variables with budget and one-design-per-location
/// rows; a custom lift introduces one continuous share column per
/// (player, customer) with an exact bilinear defining row, linearized
/// by continuous-by-binary products. Utilities are sum_j w_j s^i_j.
CfldGame build_cfld(const CfldInstance &inst);

/// Exact demand share payoff straight from the fractional objective.
Rational cfld_payoff(const CfldInstance &inst, int player, const StrategyProfile &profile);

// JSON schema: {L, J, R, w, u, f, B, u0}
CfldInstance cfld_from_json(const std::string &text);
std::string cfld_to_json(const CfldInstance &inst);

} // namespace ipg

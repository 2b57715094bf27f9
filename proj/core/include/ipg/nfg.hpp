// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"
#include "ipg/lift.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ipg {

/// Weighted network formation game on a directed graph: each player
/// routes one unit from its source to its sink and pays, per edge, its
/// weight share of the construction cost among all players using the
/// edge.
struct NfgInstance {
  int num_vertices = 0;
  struct Edge {
    int from = 0, to = 0;
    std::int64_t cost = 0;
  };
  std::vector<Edge> edges;
  struct Player {
    int source = 0, sink = 0;
    Rational weight = 1;
  };
  std::vector<Player> players;

  void validate() const;
};

struct NfgGame {
  GameInstance game;                   // flow constraints; payoffs live in the lift
  std::shared_ptr<const CustomLift> lift; // per-edge subset columns
  NfgInstance instance;
};

/// Minimization game with unit-flow rows per player and a subset lift:
/// one binary column z^S_e per edge and nonempty player set S, linking
/// rows x^i_e = sum_{S ni i} z^S_e plus a clique row per edge. Guarded
/// to n <= 4 (subset columns grow as 2^n - 1 per edge).
NfgGame build_nfg(const NfgInstance &inst);

/// Exact cost of player i at a profile, straight from the cost-sharing
/// fraction (0 for unused edges): the independent reference the lifted
/// utilities are tested against.
Rational nfg_cost(const NfgInstance &inst, int player, const StrategyProfile &profile);

/// Layered left-to-right grid with extra random edges between adjacent
/// layers; costs uniform in [20,100]; all players share the leftmost
/// source and rightmost sink by default.
NfgInstance generate_grid(int v_target, std::uint64_t seed,
                          const std::vector<Rational> &weights = {Rational(1), Rational(1),
                                                                  Rational(1)});

// JSON schema: {V, E:[[h,l,c]], players:[{s,t,w_num,w_den}]}
NfgInstance nfg_from_json(const std::string &text);
std::string nfg_to_json(const NfgInstance &inst);

} // namespace ipg

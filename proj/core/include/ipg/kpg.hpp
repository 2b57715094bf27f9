// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"
#include "ipg/lift.hpp"
#include "ipg/oracle.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ipg {

/// Knapsack game: each player packs m items under one capacity row;
/// picking item j yields p^i_j plus interaction C^i_{k,j} for every
/// opponent k also picking j.
struct KpgInstance {
  int n = 0, m = 0;
  std::vector<std::vector<std::int64_t>> p; // [i][j], >= 0
  std::vector<std::vector<std::int64_t>> w; // [i][j], >= 0
  std::vector<std::int64_t> b;              // capacities
  std::vector<std::vector<std::vector<std::int64_t>>> C; // [i][k][j]; C[i][i] ignored
  std::string dist;                                      // generator tag when generated
  std::uint64_t seed = 0;

  void validate() const;
};

GameInstance build_kpg(const KpgInstance &inst);

/// Generator matching the standard experimental design: p, w uniform in
/// [1,100]; capacity = floor(cap_ratio * sum w); interactions per
/// distribution A (one draw per item, shared by every player pair),
/// B (independent in [1,100]) or C (independent in [-100,100]).
KpgInstance generate_kpg(int n, int m, char dist, double cap_ratio, std::uint64_t seed);

/// Strategic dominance inequalities x^i_{j'} <= x^i_j: item j dominates
/// j' when it is no heavier and its worst-case profit beats j''s
/// best-case profit. For two players the conditional variant
/// x^1_{j'} <= x^1_j + (1 - x^2_j) + x^2_{j'} is also emitted.
std::vector<EquilibriumCut> dominance_cuts(const KpgInstance &inst, const LiftedModel &lift);

/// Strategic payoff inequalities x^i_j + sum_{k in S} x^k_j <= |S| for
/// minimal opponent sets S whose joint selection makes item j
/// unprofitable even with every favorable opponent joining in.
std::vector<EquilibriumCut> payoff_cuts(const KpgInstance &inst, const LiftedModel &lift);

std::vector<EquilibriumCut> strategic_cuts(const KpgInstance &inst, const LiftedModel &lift);

/// Bilevel knapsack decision instance: does a packing x
/// (sum a_j x_j <= A) exist so that every y with sum b_j y_j <= B has
/// sum b_j y_j (1 - x_j) <= B - 1?
struct BkpInstance {
  std::vector<std::int64_t> a, b;
  std::int64_t A = 0, B = 0;

  void validate() const;
};

/// Hard-instance generator: two-player, (m+1)-item game that has a PNE
/// iff the bilevel instance is a yes-instance. Entries with a_j > A are
/// normalized away first.
KpgInstance reduce_bkp_instance(const BkpInstance &bkp);
GameInstance reduce_bkp(const BkpInstance &bkp);

/// Reference decision procedure for small instances (exhaustive).
bool bkp_feasible(const BkpInstance &bkp);

// JSON schemas: {n,m,p,w,b,C,dist?,seed?} and {a,b,A,B}
KpgInstance kpg_from_json(const std::string &text);
std::string kpg_to_json(const KpgInstance &inst);
BkpInstance bkp_from_json(const std::string &text);
std::string bkp_to_json(const BkpInstance &inst);

} // namespace ipg

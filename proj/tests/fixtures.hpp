// SPDX-License-Identifier: Apache-2.0
//
// Shared game fixtures for the test suites. The two-player knapsack
// games below double as golden regression instances; their equilibria
// and welfare values are asserted all over the suites.
#pragma once

#include "ipg/kpg.hpp"

namespace ipg::testing {

// player 1: max 6a + b - 4ac + 6bd   s.t. 3a + 2b <= 4
// player 2: max 4c + 2d -  ac -  bd  s.t. 3c + 2d <= 4
// unique PNE ((1,0),(1,0)) with utilities (2,3), welfare 5; OSW 8
inline KpgInstance example_one_kpg() {
  KpgInstance k;
  k.n = 2;
  k.m = 2;
  k.p = {{6, 1}, {4, 2}};
  k.w = {{3, 2}, {3, 2}};
  k.b = {4, 4};
  k.C = {{{0, 0}, {-4, 6}}, {{-1, -1}, {0, 0}}};
  return k;
}

inline GameInstance example_one() { return build_kpg(example_one_kpg()); }

// three items per player; 4 feasible strategies each; 3 PNEs with
// utility pairs (9,9), (7,9), (7,9) and welfares 18, 16, 16
inline KpgInstance example_two_kpg() {
  KpgInstance k;
  k.n = 2;
  k.m = 3;
  k.p = {{1, 3, 7}, {9, 9, 2}};
  k.w = {{6, 4, 5}, {4, 2, 5}};
  k.b = {7, 5};
  k.C = {{{0, 0, 0}, {-6, 3, 2}}, {{-6, 5, 7}, {0, 0, 0}}};
  return k;
}

inline GameInstance example_two() { return build_kpg(example_two_kpg()); }

// price-of-stability witness: unique PNE with welfare 5 while the
// social optimum reaches M + 1
inline KpgInstance unbounded_price_kpg(std::int64_t M) {
  KpgInstance k;
  k.n = 2;
  k.m = 2;
  k.p = {{M, 1}, {4, 1}};
  k.w = {{3, 2}, {3, 2}};
  k.b = {4, 4};
  k.C = {{{0, 0}, {-(M - 2), -1}}, {{-1, -1}, {0, 0}}};
  return k;
}

inline GameInstance unbounded_price_game(std::int64_t M) {
  return build_kpg(unbounded_price_kpg(M));
}

} // namespace ipg::testing

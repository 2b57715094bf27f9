// SPDX-License-Identifier: Apache-2.0
#include "ipg/kpg.hpp"

#include "ipg/brute_force.hpp"
#include "ipg/errors.hpp"
#include "ipg/master.hpp"
#include "ipg/rng.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace ipg;
using namespace ipg::testing;

TEST_CASE("building the knapsack game") {
  SUBCASE("the walkthrough instance round-trips through the model") {
    GameInstance g = example_one();
    StrategyProfile p{{{1, 0}, {0, 1}}};
    CHECK(payoff(g, 0, p) == Rational(6));
    CHECK(payoff(g, 1, p) == Rational(2));
  }
  SUBCASE("zero interaction: per-player optima form the unique equilibrium") {
    KpgInstance k = example_one_kpg();
    k.C = {{{0, 0}, {0, 0}}, {{0, 0}, {0, 0}}};
    auto res = all_pnes(build_kpg(k));
    REQUIRE(res.pnes.size() == 1);
    CHECK(res.pnes[0].first == StrategyProfile{{{1, 0}, {1, 0}}});
  }
  SUBCASE("negative weights are rejected") {
    KpgInstance k = example_one_kpg();
    k.w[0][0] = -1;
    CHECK_THROWS_AS(build_kpg(k), InputError);
  }
}

TEST_CASE("generator honors the experimental design") {
  KpgInstance a = generate_kpg(2, 25, 'A', 0.5, 7);
  std::int64_t wsum = 0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 25; ++j) {
      CHECK(a.p[i][j] >= 1);
      CHECK(a.p[i][j] <= 100);
      CHECK(a.w[i][j] >= 1);
      CHECK(a.w[i][j] <= 100);
    }
  for (int j = 0; j < 25; ++j)
    wsum += a.w[0][j];
  CHECK(a.b[0] == wsum / 2);
  // distribution A: a single interaction value per item
  for (int j = 0; j < 25; ++j) {
    CHECK(a.C[0][1][j] == a.C[1][0][j]);
    CHECK(a.C[0][1][j] >= 1);
    CHECK(a.C[0][1][j] <= 100);
  }

  KpgInstance c = generate_kpg(3, 10, 'C', 0.2, 11);
  bool some_negative = false;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k)
      for (int j = 0; j < 10; ++j)
        some_negative = some_negative || (k != i && c.C[i][k][j] < 0);
  CHECK(some_negative);

  // determinism: identical seed, identical bytes
  CHECK(kpg_to_json(generate_kpg(2, 25, 'A', 0.5, 7)) == kpg_to_json(a));
}

TEST_CASE("strategic dominance inequalities") {
  SUBCASE("no interaction: plain knapsack dominance") {
    KpgInstance k;
    k.n = 2;
    k.m = 2;
    k.p = {{10, 3}, {1, 1}};
    k.w = {{2, 5}, {1, 1}};
    k.b = {6, 2};
    k.C = {{{0, 0}, {0, 0}}, {{0, 0}, {0, 0}}};
    LiftedModel lift = build_lifted_model(build_kpg(k));
    auto cuts = dominance_cuts(k, lift);
    // item 1 dominates item 2 for player 1: x_2 <= x_1
    bool found = false;
    for (const auto &cut : cuts)
      if (cut.player == 0 && cut.row.coeffs.size() == 2)
        found = true;
    CHECK(found);
  }
  SUBCASE("worst/best profits with interaction") {
    KpgInstance k;
    k.n = 2;
    k.m = 2;
    k.p = {{10, 3}, {1, 1}};
    k.w = {{2, 5}, {1, 1}};
    k.b = {6, 2};
    // p_min(item1) = 10 - 2 = 8 > p_max(item2) = 3 + 4 = 7
    k.C = {{{0, 0}, {-2, 4}}, {{0, 0}, {0, 0}}};
    LiftedModel lift = build_lifted_model(build_kpg(k));
    auto cuts = dominance_cuts(k, lift);
    bool unconditional = false;
    for (const auto &cut : cuts)
      if (cut.player == 0 && cut.row.coeffs.size() == 2 && cut.row.rhs == 0)
        unconditional = true;
    CHECK(unconditional);
    // soundness: equilibria never violate the emitted cuts
    GameInstance g = build_kpg(k);
    auto brute = all_pnes(g);
    for (const auto &[profile, w] : brute.pnes)
      for (const auto &cut : cuts)
        CHECK(SolverModel::row_satisfied(cut.row, lift.induced_ints(profile)));
  }
  SUBCASE("the walkthrough emits no unconditional cut for player 2") {
    KpgInstance k = example_one_kpg();
    LiftedModel lift = build_lifted_model(build_kpg(k));
    auto cuts = dominance_cuts(k, lift);
    for (const auto &cut : cuts) {
      CHECK(cut.player == 0); // only player 1's conditional cut appears
      CHECK(cut.row.coeffs.size() == 4);
    }
    CHECK(cuts.size() == 1);
  }
}

TEST_CASE("strategic payoff inequalities") {
  SUBCASE("all nonnegative interactions produce nothing") {
    KpgInstance k = generate_kpg(3, 6, 'B', 0.5, 3);
    LiftedModel lift = build_lifted_model(build_kpg(k));
    CHECK(payoff_cuts(k, lift).empty());
  }
  SUBCASE("both opponents needed: a three-player minimal set") {
    KpgInstance k;
    k.n = 3;
    k.m = 1;
    k.p = {{5}, {5}, {5}};
    k.w = {{1}, {1}, {1}};
    k.b = {1, 1, 1};
    k.C = {{{0}, {-3}, {-3}}, {{0}, {0}, {0}}, {{0}, {0}, {0}}};
    LiftedModel lift = build_lifted_model(build_kpg(k));
    auto cuts = payoff_cuts(k, lift);
    REQUIRE(cuts.size() == 1);
    CHECK(cuts[0].row.coeffs.size() == 3);
    CHECK(cuts[0].row.rhs == 2);
    CHECK(cuts[0].row.sense == RowSense::le);
  }
  SUBCASE("singleton minimal set") {
    KpgInstance k;
    k.n = 2;
    k.m = 1;
    k.p = {{2}, {2}};
    k.w = {{1}, {1}};
    k.b = {1, 1};
    k.C = {{{0}, {-5}}, {{0}, {0}}};
    GameInstance g = build_kpg(k);
    LiftedModel lift = build_lifted_model(g);
    auto cuts = payoff_cuts(k, lift);
    REQUIRE(cuts.size() == 1);
    CHECK(cuts[0].row.coeffs.size() == 2);
    CHECK(cuts[0].row.rhs == 1);
    for (const auto &[profile, w] : all_pnes(g).pnes)
      CHECK(SolverModel::row_satisfied(cuts[0].row, lift.induced_ints(profile)));
  }
  SUBCASE("a favorable opponent outside the set vetoes the cut") {
    // without the positivity guard this would emit x^0 + x^1 <= 1,
    // which the all-select equilibrium violates
    KpgInstance k;
    k.n = 3;
    k.m = 1;
    k.p = {{1}, {1}, {1}};
    k.w = {{1}, {1}, {1}};
    k.b = {1, 1, 1};
    k.C = {{{0}, {-2}, {5}}, {{0}, {0}, {2}}, {{2}, {2}, {0}}};
    GameInstance g = build_kpg(k);
    LiftedModel lift = build_lifted_model(g);
    auto cuts = payoff_cuts(k, lift);
    auto brute = all_pnes(g);
    bool all_select_is_pne = false;
    for (const auto &[profile, w] : brute.pnes)
      if (profile.x[0][0] && profile.x[1][0] && profile.x[2][0])
        all_select_is_pne = true;
    CHECK(all_select_is_pne);
    for (const auto &cut : cuts)
      for (const auto &[profile, w] : brute.pnes)
        CHECK(SolverModel::row_satisfied(cut.row, lift.induced_ints(profile)));
  }
}

TEST_CASE("strategic cut validity over random instances") {
  Rng rng(5150);
  int instances = 0;
  long cuts_checked = 0;
  while (instances < 60) {
    int n = instances % 2 ? 3 : 2;
    int m = static_cast<int>(rng.uniform(2, n == 2 ? 8 : 4));
    KpgInstance inst =
        generate_kpg(n, m, "ABC"[instances % 3], 0.2 + 0.3 * (instances % 3), rng.next());
    GameInstance g = build_kpg(inst);
    LiftedModel lift = build_lifted_model(g);
    auto brute = all_pnes(g);
    auto cuts = strategic_cuts(inst, lift);
    for (const auto &[profile, w] : brute.pnes) {
      auto ints = lift.induced_ints(profile);
      for (const auto &cut : cuts) {
        CHECK(SolverModel::row_satisfied(cut.row, ints));
        ++cuts_checked;
      }
    }
    ++instances;
  }
  CHECK(cuts_checked > 200);
}

TEST_CASE("bilevel knapsack reduction") {
  SUBCASE("one-item yes-instance") {
    BkpInstance bkp{{1}, {1}, 1, 1};
    CHECK(bkp_feasible(bkp));
    GameInstance g = reduce_bkp(bkp);
    CHECK_FALSE(all_pnes(g).pnes.empty());
  }
  SUBCASE("B = 0 is rejected") {
    BkpInstance bkp{{1}, {1}, 1, 0};
    CHECK_THROWS_AS(reduce_bkp(bkp), InputError);
  }
  SUBCASE("existence matches the exhaustive answer, with and without normalization") {
    Rng rng(8888);
    int trials = 0, normalized = 0, yes = 0;
    while (trials < 50) {
      int m = static_cast<int>(rng.uniform(1, 4));
      BkpInstance bkp;
      for (int j = 0; j < m; ++j) {
        bkp.a.push_back(rng.uniform(0, 8));
        bkp.b.push_back(rng.uniform(0, 8));
      }
      bkp.A = rng.uniform(0, 6);
      bkp.B = rng.uniform(1, 8);
      bool norm = false;
      for (auto v : bkp.a)
        if (v > bkp.A)
          norm = true;
      normalized += norm ? 1 : 0;
      bool expected = bkp_feasible(bkp);
      yes += expected ? 1 : 0;
      GameInstance g = reduce_bkp(bkp);
      CHECK(all_pnes(g).pnes.empty() == !expected);
      ++trials;
    }
    CHECK(normalized > 5);
    CHECK(yes > 5);
    CHECK(yes < 50);
  }
}

TEST_CASE("kpg and bkp JSON round trips") {
  KpgInstance inst = generate_kpg(2, 4, 'C', 0.5, 21);
  KpgInstance back = kpg_from_json(kpg_to_json(inst));
  CHECK(back.n == inst.n);
  CHECK(back.C == inst.C);
  CHECK(back.b == inst.b);

  BkpInstance bkp{{1, 2}, {3, 4}, 2, 5};
  BkpInstance bback = bkp_from_json(bkp_to_json(bkp));
  CHECK(bback.a == bkp.a);
  CHECK(bback.B == bkp.B);
  CHECK_THROWS_AS(kpg_from_json("{"), InputError);
}

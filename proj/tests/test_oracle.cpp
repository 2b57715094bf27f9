// SPDX-License-Identifier: Apache-2.0
#include "ipg/oracle.hpp"

#include "ipg/brute_force.hpp"
#include "ipg/kpg.hpp"
#include "ipg/rng.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>

using namespace ipg;
using namespace ipg::testing;

TEST_CASE("best responses of the worked examples") {
  GameInstance ex1 = example_one();
  LiftedModel lift1 = build_lifted_model(ex1);
  SeparationOracle oracle1(lift1);

  SUBCASE("player 2 answers (1,0) with (1,0), value 3") {
    StrategyProfile p{{{1, 0}, {0, 0}}};
    auto br = oracle1.best_response(1, p);
    CHECK(br.strategy == std::vector<std::int64_t>{1, 0});
    CHECK(br.value == Rational(3));
  }
  SUBCASE("player 1's best response to any feasible strategy in example two") {
    GameInstance ex2 = example_two();
    LiftedModel lift2 = build_lifted_model(ex2);
    SeparationOracle oracle2(lift2);
    for (const auto &x2 : enumerate_feasible(ex2, 1)) {
      StrategyProfile p{{{0, 0, 0}, x2}};
      auto br = oracle2.best_response(0, p);
      CHECK(br.strategy == std::vector<std::int64_t>{0, 0, 1});
    }
  }
  SUBCASE("zero interaction: the single-agent optimum, opponents ignored") {
    KpgInstance k = example_one_kpg();
    k.C = {{{0, 0}, {0, 0}}, {{0, 0}, {0, 0}}};
    GameInstance g = build_kpg(k);
    LiftedModel lift = build_lifted_model(g);
    SeparationOracle oracle(lift);
    for (const auto &x2 : enumerate_feasible(g, 1)) {
      StrategyProfile p{{{0, 0}, x2}};
      auto br = oracle.best_response(0, p);
      CHECK(br.strategy == std::vector<std::int64_t>{1, 0}); // item 1 pays 6
      CHECK(br.value == Rational(6));
    }
  }
}

TEST_CASE("separation on the cutting-plane walkthrough") {
  GameInstance ex1 = example_one();
  LiftedModel lift = build_lifted_model(ex1);
  SeparationOracle oracle(lift);

  SUBCASE("the welfare-optimal incumbent is refused, with player 2's inequality") {
    StrategyProfile incumbent{{{1, 0}, {0, 1}}};
    auto res = oracle.separate(incumbent);
    CHECK_FALSE(res.is_equilibrium);
    // player 2's cut is 4 - x^1_1 <= 4 x^2_1 + 2 x^2_2 - z_1 - z_2,
    // normalized here to x^1_1 + 4 x^2_1 + 2 x^2_2 - z_1 - z_2 >= 4
    bool found = false;
    for (const auto &cut : res.cuts) {
      if (cut.player != 1)
        continue;
      found = true;
      CHECK(cut.deviation == std::vector<std::int64_t>{1, 0});
      std::map<int, std::int64_t> coeffs(cut.row.coeffs.begin(), cut.row.coeffs.end());
      CHECK(cut.row.sense == RowSense::ge);
      CHECK(cut.row.rhs == 4);
      CHECK(coeffs[0] == 1);  // x^1_1
      CHECK(coeffs[2] == 4);  // x^2_1
      CHECK(coeffs[3] == 2);  // x^2_2
      CHECK(coeffs[4] == -1); // z_1
      CHECK(coeffs[5] == -1); // z_2
    }
    CHECK(found);
    // every emitted cut must be violated by the incumbent that produced it
    auto ints = lift.induced_ints(incumbent);
    for (const auto &cut : res.cuts)
      CHECK_FALSE(SolverModel::row_satisfied(cut.row, ints));
  }
  SUBCASE("the equilibrium is accepted") {
    StrategyProfile pne{{{1, 0}, {1, 0}}};
    auto res = oracle.separate(pne);
    CHECK(res.is_equilibrium);
    for (const auto &r : res.regrets)
      CHECK(r == Rational(0));
  }
}

TEST_CASE("a singleton strategy set never contributes a cut") {
  KpgInstance k = example_one_kpg();
  // player 2 can afford nothing: only the all-zero strategy remains
  k.b[1] = 0;
  GameInstance g = build_kpg(k);
  LiftedModel lift = build_lifted_model(g);
  SeparationOracle oracle(lift);
  for (const auto &x1 : enumerate_feasible(g, 0)) {
    StrategyProfile p{{x1, {0, 0}}};
    auto res = oracle.separate(p);
    for (const auto &cut : res.cuts)
      CHECK(cut.player != 1);
  }
}

TEST_CASE("oracle soundness and cut validity against brute force") {
  Rng rng(404);
  int games = 0, yes_seen = 0, cut_count = 0;
  while (games < 40) {
    char dist = "ABC"[games % 3];
    KpgInstance inst = generate_kpg(2, 4, dist, 0.5, rng.next());
    GameInstance g = build_kpg(inst);
    LiftedModel lift = build_lifted_model(g);
    SeparationOracle oracle(lift);
    auto brute = all_pnes(g);
    std::vector<std::vector<Rational>> pne_points;
    for (const auto &[profile, w] : brute.pnes)
      pne_points.push_back(lift.induced_point(profile));
    ++games;
    for (const auto &x1 : enumerate_feasible(g, 0)) {
      for (const auto &x2 : enumerate_feasible(g, 1)) {
        StrategyProfile p{{x1, x2}};
        auto res = oracle.separate(p);
        bool is_pne = std::any_of(brute.pnes.begin(), brute.pnes.end(),
                                  [&](const auto &q) { return q.first == p; });
        CHECK(res.is_equilibrium == is_pne);
        yes_seen += res.is_equilibrium ? 1 : 0;
        CHECK(res.cuts.size() <= 2); // at most one per player
        auto ints = lift.induced_ints(p);
        for (const auto &cut : res.cuts) {
          ++cut_count;
          // violated by the point that produced it
          CHECK_FALSE(SolverModel::row_satisfied(cut.row, ints));
          // satisfied by every PNE of the instance
          for (const auto &point : pne_points)
            CHECK(row_holds(cut.row, point));
        }
      }
    }
  }
  CHECK(yes_seen > 0);
  CHECK(cut_count > 100);
}

TEST_CASE("no-good rows cut exactly one point") {
  GameInstance g = example_two();
  LiftedModel lift = build_lifted_model(g);
  auto strategies0 = enumerate_feasible(g, 0);
  auto strategies1 = enumerate_feasible(g, 1);
  StrategyProfile target{{strategies0[1], strategies1[2]}};
  EquilibriumCut ng = make_nogood_cut(lift, target);
  CHECK_FALSE(ng.valid_for_equilibria());
  for (const auto &x1 : strategies0)
    for (const auto &x2 : strategies1) {
      StrategyProfile p{{x1, x2}};
      bool excluded = !SolverModel::row_satisfied(ng.row, lift.induced_ints(p));
      CHECK(excluded == (p == target));
    }
}

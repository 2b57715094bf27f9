// SPDX-License-Identifier: Apache-2.0
#include "ipg/lift.hpp"

#include "ipg/brute_force.hpp"
#include "ipg/errors.hpp"
#include "ipg/qipg.hpp"
#include "ipg/rng.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace ipg;
using namespace ipg::testing;

TEST_CASE("binary expansion") {
  SUBCASE("[0,3]: two bits, no cap") {
    BitExpansion e = binary_expand(VarDomain::integer(0, 3));
    CHECK(e.bits == 2);
    CHECK(e.offset == 0);
    CHECK_FALSE(e.needs_cap);
  }
  SUBCASE("[0,1]: the identity") {
    BitExpansion e = binary_expand(VarDomain::binary());
    CHECK(e.bits == 1);
    CHECK(e.offset == 0);
    CHECK_FALSE(e.needs_cap);
  }
  SUBCASE("[-2,5]: three bits, offset -2, bijection onto the range") {
    BitExpansion e = binary_expand(VarDomain::integer(-2, 5));
    CHECK(e.bits == 3);
    CHECK(e.offset == -2);
    CHECK_FALSE(e.needs_cap);
    std::set<std::int64_t> values;
    for (int pattern = 0; pattern < 8; ++pattern)
      values.insert(e.offset + pattern);
    CHECK(values == std::set<std::int64_t>{-2, -1, 0, 1, 2, 3, 4, 5});
  }
  SUBCASE("[0,5]: cap row required") {
    BitExpansion e = binary_expand(VarDomain::integer(0, 5));
    CHECK(e.bits == 3);
    CHECK(e.needs_cap);
    CHECK(e.cap == 5);
  }
  SUBCASE("fixed variable: zero bits") {
    BitExpansion e = binary_expand(VarDomain::integer(4, 4));
    CHECK(e.bits == 0);
    CHECK(e.offset == 4);
  }
}

TEST_CASE("lifting the first worked example") {
  LiftedModel lift = build_lifted_model(example_one());
  CHECK(lift.num_product_cols() == 2);
  // 2 knapsack rows + 3 linking rows per product
  CHECK(lift.rows().size() == 2 + 6);
  CHECK(lift.num_cols() == 4 + 2);

  StrategyProfile pne{{{1, 0}, {1, 0}}};
  auto vals = lift.induced_ints(pne);
  CHECK(vals[4] == 1); // z1
  CHECK(vals[5] == 0); // z2

  StrategyProfile zero{{{0, 0}, {0, 0}}};
  for (auto v : lift.induced_ints(zero))
    CHECK(v == 0);
}

TEST_CASE("purely linear utilities need no products") {
  GameInstance g = example_one();
  for (auto &p : g.players)
    p.utility.quadratic.clear();
  LiftedModel lift = build_lifted_model(g);
  CHECK(lift.num_product_cols() == 0);
  CHECK(lift.rows().size() == 2); // just the knapsack rows
}

TEST_CASE("worked example two: induced products") {
  LiftedModel lift = build_lifted_model(example_two());
  StrategyProfile p{{{0, 0, 1}, {0, 0, 1}}};
  auto vals = lift.induced_ints(p);
  // products are registered in utility order: (a1,c1), (b2,d2), (c3,d3)
  REQUIRE(lift.num_product_cols() == 3);
  int base = 6;
  CHECK(vals[base + 0] == 0);
  CHECK(vals[base + 1] == 0);
  CHECK(vals[base + 2] == 1);
}

TEST_CASE("quadratic own and cross terms over [0,3] domains") {
  // n=2, m=1, Q=2, C=1, c=-3: each player minimizes x^2 + x*y - 3x
  QipgInstance q;
  q.n = 2;
  q.m = 1;
  q.Q = {{{Rational(2)}}, {{Rational(2)}}};
  q.C = {{{Rational(1)}}, {{Rational(1)}}};
  q.c = {{-3}, {-3}};
  q.lb = {0};
  q.ub = {3};
  GameInstance game = build_qipg(q);
  LiftedModel lift = build_lifted_model(game);
  // own squares: one product per player; cross x*y: four products
  CHECK(lift.num_product_cols() == 2 * 1 + 4);
  CHECK(lift.num_cols() == 4 + 6);

  // payoffs through the lift equal the direct quadratic form
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    StrategyProfile p{{{rng.uniform(0, 3)}, {rng.uniform(0, 3)}}};
    auto point = lift.induced_point(p);
    for (int i = 0; i < 2; ++i) {
      CHECK(lift.utility(i).eval(point) == qipg_cost(q, i, p));
      CHECK(lift.utility(i).eval(point) == payoff(game, i, p));
    }
  }
}

TEST_CASE("bijection between profiles and lifted integer points") {
  GameInstance g = example_two();
  LiftedModel lift = build_lifted_model(g);
  for (const auto &x1 : enumerate_feasible(g, 0))
    for (const auto &x2 : enumerate_feasible(g, 1)) {
      StrategyProfile p{{x1, x2}};
      auto ints = lift.induced_ints(p);
      CHECK(lift.decode(ints) == p);
      for (const auto &row : lift.rows())
        CHECK(SolverModel::row_satisfied(row, ints));
    }
}

TEST_CASE("lifted utilities match direct payoffs on random games") {
  Rng rng(77);
  for (int t = 0; t < 20; ++t) {
    GameInstance g;
    g.num_players = 2;
    g.players.resize(2);
    for (int i = 0; i < 2; ++i) {
      auto &p = g.players[i];
      p.num_vars = 2;
      p.domains = {VarDomain::integer(-2, 5), VarDomain::integer(0, 6)};
      p.utility.sense = Sense::maximize;
      for (int j = 0; j < 2; ++j)
        p.utility.linear.push_back({{i, j}, Rational(rng.uniform(-5, 5))});
      for (int reps = 0; reps < 3; ++reps) {
        Monomial2 q{{static_cast<int>(rng.uniform(0, 1)), static_cast<int>(rng.uniform(0, 1))},
                    {static_cast<int>(rng.uniform(0, 1)), static_cast<int>(rng.uniform(0, 1))},
                    Rational(rng.uniform(-3, 3))};
        q.canonicalize();
        p.utility.quadratic.push_back(q);
      }
    }
    LiftedModel lift = build_lifted_model(g);
    for (int s = 0; s < 50; ++s) {
      StrategyProfile p{{{rng.uniform(-2, 5), rng.uniform(0, 6)},
                         {rng.uniform(-2, 5), rng.uniform(0, 6)}}};
      auto point = lift.induced_point(p);
      CHECK(lift.utility(0).eval(point) == payoff(g, 0, p));
      CHECK(lift.utility(1).eval(point) == payoff(g, 1, p));
      CHECK(lift.welfare_expr().eval(point) == welfare(g, p));
    }
  }
}

TEST_CASE("product linking rows admit only the true product") {
  // exhaustive 4-case check on the three-row pattern
  LiftedModel lift = build_lifted_model(example_one());
  for (std::int64_t a = 0; a <= 1; ++a)
    for (std::int64_t b = 0; b <= 1; ++b)
      for (std::int64_t z = 0; z <= 1; ++z) {
        StrategyProfile p{{{a, 0}, {b, 0}}};
        auto ints = lift.induced_ints(p);
        ints[4] = z;
        bool ok = true;
        for (const auto &row : lift.rows())
          ok = ok && SolverModel::row_satisfied(row, ints);
        CHECK(ok == (z == a * b));
      }
}

TEST_CASE("monomials over oversized ranges are rejected early") {
  GameInstance g = example_one();
  g.players[0].domains[0] = {0, (std::int64_t(1) << 62), VarDomain::Kind::integer};
  CHECK_THROWS_AS(build_lifted_model(g), InputError);
}

TEST_CASE("LP-format dump") {
  LiftedModel lift = build_lifted_model(example_one());
  std::ostringstream os;
  lift.write_lp(os);
  std::string text = os.str();
  CHECK(text.find("Maximize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("Generals") != std::string::npos);
  CHECK(text.find("x_0_0_0") != std::string::npos);
}

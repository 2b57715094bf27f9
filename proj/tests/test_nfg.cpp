// SPDX-License-Identifier: Apache-2.0
#include "ipg/nfg.hpp"

#include "ipg/brute_force.hpp"
#include "ipg/errors.hpp"
#include "ipg/master.hpp"
#include "ipg/oracle.hpp"
#include "ipg/rng.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace ipg;

namespace {

NfgInstance single_edge(int players) {
  NfgInstance inst;
  inst.num_vertices = 2;
  inst.edges = {{0, 1, 3}};
  for (int i = 0; i < players; ++i)
    inst.players.push_back({0, 1, Rational(1)});
  return inst;
}

// two parallel routes: a direct edge and a two-edge detour
NfgInstance two_routes(std::int64_t direct, std::int64_t hop1, std::int64_t hop2) {
  NfgInstance inst;
  inst.num_vertices = 3;
  inst.edges = {{0, 2, direct}, {0, 1, hop1}, {1, 2, hop2}};
  inst.players = {{0, 2, Rational(1)}, {0, 2, Rational(1)}, {0, 2, Rational(1)}};
  return inst;
}

PayoffFn cost_fn(const NfgInstance &inst) {
  return [inst](int i, const StrategyProfile &p) { return nfg_cost(inst, i, p); };
}

} // namespace

TEST_CASE("single shared edge: everyone rides, equal shares") {
  NfgGame nfg = build_nfg(single_edge(3));
  auto res = all_pnes(nfg.game, cost_fn(nfg.instance));
  REQUIRE(res.pnes.size() == 1);
  StrategyProfile p = res.pnes[0].first;
  for (int i = 0; i < 3; ++i) {
    CHECK(p.x[i][0] == 1);
    CHECK(nfg_cost(nfg.instance, i, p) == Rational(1));
  }
  CHECK(res.pnes[0].second == Rational(3));

  LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
  SolveReport rep = select_best_pne(lift);
  REQUIRE(rep.status == SolveStatus::PNE_FOUND);
  CHECK(rep.pnes.front().second == Rational(3));
  CHECK(*rep.osw == Rational(3));
}

TEST_CASE("subset columns: seven per edge for three players") {
  NfgGame nfg = build_nfg(single_edge(3));
  LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
  CHECK(lift.num_cols() - lift.custom_col_start() == 7);
  // per edge: one clique row + one linking row per player, after the
  // per-player flow rows (2 vertices x 3 players)
  CHECK(lift.rows().size() == 6 + 1 + 3);

  // induced subset values match the user set exactly
  StrategyProfile p{{{1}, {0}, {1}}};
  auto point = lift.induced_point(p);
  int base = lift.custom_col_start();
  for (int mask = 1; mask <= 7; ++mask)
    CHECK(point[base + mask - 1] == Rational(mask == 0b101 ? 1 : 0));
}

TEST_CASE("single player: the equilibrium is a shortest path") {
  NfgInstance inst = two_routes(50, 20, 25);
  inst.players = {{0, 2, Rational(1)}};
  NfgGame nfg = build_nfg(inst);
  LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
  SolveReport rep = select_best_pne(lift);
  REQUIRE(rep.status == SolveStatus::PNE_FOUND);
  CHECK(rep.pnes.front().second == Rational(45)); // the detour wins
}

TEST_CASE("lifted costs equal the sharing fraction everywhere") {
  for (auto weights : {std::vector<Rational>{1, 1, 1},
                       std::vector<Rational>{{3, 5}, {1, 5}, {1, 5}},
                       std::vector<Rational>{{9, 20}, {9, 20}, {1, 10}}}) {
    NfgInstance inst = two_routes(40, 21, 33);
    for (int i = 0; i < 3; ++i)
      inst.players[i].weight = weights[i];
    NfgGame nfg = build_nfg(inst);
    LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
    ProfileSpace space = enumerate_profiles(nfg.game);
    std::vector<std::size_t> idx(3, 0);
    bool done = false;
    while (!done) {
      StrategyProfile p;
      for (int i = 0; i < 3; ++i)
        p.x.push_back(space.strategies[i][idx[i]]);
      auto point = lift.induced_point(p);
      Rational total = 0;
      for (int i = 0; i < 3; ++i) {
        Rational direct = nfg_cost(inst, i, p);
        CHECK(lift.utility(i).eval(point) == direct);
        CHECK(lift.exact_payoff(i, p) == direct);
        total += direct;
      }
      CHECK(lift.exact_welfare(p) == total);
      done = true;
      for (int k = 2; k >= 0; --k) {
        if (++idx[k] < space.strategies[k].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
    }
  }
}

TEST_CASE("deviation expressions produce valid, violated cuts") {
  NfgInstance inst = two_routes(10, 4, 4); // sharing the detour is tempting
  NfgGame nfg = build_nfg(inst);
  LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
  SeparationOracle oracle(lift);
  auto brute = all_pnes(nfg.game, cost_fn(inst));
  REQUIRE_FALSE(brute.pnes.empty());
  std::vector<std::vector<Rational>> pne_points;
  for (const auto &[profile, w] : brute.pnes)
    pne_points.push_back(lift.induced_point(profile));

  ProfileSpace space = enumerate_profiles(nfg.game);
  std::vector<std::size_t> idx(3, 0);
  bool done = false;
  int cut_count = 0;
  while (!done) {
    StrategyProfile p;
    for (int i = 0; i < 3; ++i)
      p.x.push_back(space.strategies[i][idx[i]]);
    auto res = oracle.separate(p);
    bool is_pne = std::any_of(brute.pnes.begin(), brute.pnes.end(),
                              [&](const auto &q) { return q.first == p; });
    CHECK(res.is_equilibrium == is_pne);
    auto point = lift.induced_point(p);
    for (const auto &cut : res.cuts) {
      ++cut_count;
      CHECK_FALSE(row_holds(cut.row, point)); // cuts off its incumbent
      for (const auto &pt : pne_points)
        CHECK(row_holds(cut.row, pt)); // never cuts an equilibrium
    }
    done = true;
    for (int k = 2; k >= 0; --k) {
      if (++idx[k] < space.strategies[k].size()) {
        done = false;
        break;
      }
      idx[k] = 0;
    }
  }
  CHECK(cut_count > 0);
}

TEST_CASE("selection on a weighted instance") {
  NfgInstance inst = two_routes(12, 5, 5);
  inst.players[0].weight = Rational(3, 5);
  inst.players[1].weight = Rational(1, 5);
  inst.players[2].weight = Rational(1, 5);
  NfgGame nfg = build_nfg(inst);
  LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
  SolveReport rep = select_best_pne(lift);
  auto brute = all_pnes(nfg.game, cost_fn(inst));
  if (brute.pnes.empty()) {
    CHECK(rep.status == SolveStatus::NO_PNE);
  } else {
    REQUIRE(rep.status == SolveStatus::PNE_FOUND);
    Rational best = brute.pnes[0].second;
    for (const auto &[q, w] : brute.pnes)
      best = std::min(best, w, [](const Rational &a, const Rational &b) { return a < b; });
    CHECK(rep.pnes.front().second == best);
    if (rep.pos)
      CHECK(*rep.pos >= Rational(1));
  }
}

TEST_CASE("grid generator") {
  SUBCASE("the smallest benchmark shape") {
    NfgInstance g = generate_grid(50, 7);
    CHECK(g.num_vertices == 50);
    CHECK(g.edges.size() == 99);
    CHECK(g.players.size() == 3);
    for (const auto &e : g.edges) {
      CHECK(e.cost >= 20);
      CHECK(e.cost <= 100);
    }
  }
  SUBCASE("tiny targets degrade to a path") {
    NfgInstance g = generate_grid(5, 3);
    CHECK(g.num_vertices == 5);
    CHECK(g.edges.size() == 4);
  }
  SUBCASE("sinks stay reachable across seeds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed)
      CHECK_NOTHROW(generate_grid(50, seed)); // validate() checks reachability
  }
  SUBCASE("larger shapes keep the edge density") {
    NfgInstance g = generate_grid(100, 9);
    CHECK(g.num_vertices == 100);
    CHECK(g.edges.size() == 209);
  }
}

TEST_CASE("nfg input guards") {
  NfgInstance bad = single_edge(3);
  bad.edges[0].cost = 0;
  CHECK_THROWS_AS(build_nfg(bad), InputError);
  NfgInstance unreachable = single_edge(2);
  unreachable.players[0] = {1, 0, Rational(1)}; // against the arc
  CHECK_THROWS_AS(build_nfg(unreachable), InputError);
  NfgInstance five = single_edge(5);
  CHECK_THROWS_AS(build_nfg(five), InputError);
}

TEST_CASE("nfg JSON round trip") {
  NfgInstance g = generate_grid(20, 4, {Rational(3, 5), Rational(1, 5), Rational(1, 5)});
  NfgInstance back = nfg_from_json(nfg_to_json(g));
  CHECK(back.num_vertices == g.num_vertices);
  CHECK(back.edges.size() == g.edges.size());
  CHECK(back.players[0].weight == Rational(3, 5));
}

TEST_CASE("master and exhaustive oracle agree on random mini networks") {
  Rng rng(24642);
  int games = 0, with_pne = 0;
  while (games < 25) {
    // random DAG over a handful of vertices, a guaranteed 0 -> V-1 chain
    NfgInstance inst;
    inst.num_vertices = 3 + static_cast<int>(rng.uniform(0, 2));
    for (int a = 0; a + 1 < inst.num_vertices; ++a)
      inst.edges.push_back({a, a + 1, rng.uniform(1, 10)});
    for (int a = 0; a < inst.num_vertices; ++a)
      for (int b = a + 2; b < inst.num_vertices; ++b)
        if (rng.uniform(0, 1))
          inst.edges.push_back({a, b, rng.uniform(1, 10)});
    int n = 2 + static_cast<int>(rng.uniform(0, 1));
    std::vector<Rational> weights = {Rational(1), Rational(rng.uniform(1, 4), 2),
                                     Rational(rng.uniform(1, 4), 4)};
    for (int i = 0; i < n; ++i)
      inst.players.push_back({0, inst.num_vertices - 1, weights[i]});
    NfgGame nfg = build_nfg(inst);
    LiftedModel lift = build_lifted_model(nfg.game, nfg.lift);
    auto brute = all_pnes(nfg.game,
                          [&](int i, const StrategyProfile &p) { return nfg_cost(inst, i, p); });
    SolveReport en = enumerate_pnes(lift);
    std::set<std::vector<std::vector<std::int64_t>>> got, want;
    for (const auto &[p, w] : en.pnes)
      got.insert(p.x);
    for (const auto &[p, w] : brute.pnes)
      want.insert(p.x);
    CHECK(got == want);
    if (!brute.pnes.empty()) {
      ++with_pne;
      Rational best = brute.pnes.front().second;
      for (const auto &[p, w] : brute.pnes)
        if (w < best)
          best = w;
      SolveReport sel = select_best_pne(lift);
      REQUIRE(sel.status == SolveStatus::PNE_FOUND);
      CHECK(sel.pnes.front().second == best);
    }
    ++games;
  }
  CHECK(with_pne > 10);
}

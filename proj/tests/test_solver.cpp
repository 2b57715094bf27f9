// SPDX-License-Identifier: Apache-2.0
#include "ipg/solver.hpp"

#include "ipg/errors.hpp"
#include "ipg/lift.hpp"
#include "ipg/rng.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace ipg;

TEST_CASE("milp basics") {
  SUBCASE("max x over a binary, no rows") {
    SolverModel m;
    m.add_column(0, 1, true);
    m.set_objective(Sense::maximize, {Rational(1)});
    auto out = m.solve(-1);
    REQUIRE(out.status == SolveOutcome::Status::optimal);
    CHECK(out.int_values[0] == 1);
    CHECK(out.objective_exact == Rational(1));
  }
  SUBCASE("max x + y subject to x + y <= 1") {
    SolverModel m;
    m.add_column(0, 1, true);
    m.add_column(0, 1, true);
    m.add_row({{{0, 1}, {1, 1}}, RowSense::le, 1});
    m.set_objective(Sense::maximize, {Rational(1), Rational(1)});
    auto out = m.solve(-1);
    REQUIRE(out.status == SolveOutcome::Status::optimal);
    CHECK(out.objective_exact == Rational(1));
  }
  SUBCASE("x >= 1 and x <= 0 is infeasible") {
    SolverModel m;
    m.add_column(0, 1, true);
    m.add_row({{{0, 1}}, RowSense::ge, 1});
    m.add_row({{{0, 1}}, RowSense::le, 0});
    m.set_objective(Sense::maximize, {Rational(1)});
    CHECK(m.solve(-1).status == SolveOutcome::Status::infeasible);
  }
  SUBCASE("adding 0 <= 1 leaves the optimum unchanged") {
    SolverModel m;
    m.add_column(0, 1, true);
    m.set_objective(Sense::maximize, {Rational(1)});
    auto before = m.solve(-1);
    m.add_row({{}, RowSense::le, 1});
    auto after = m.solve(-1);
    CHECK(before.objective_exact == after.objective_exact);
  }
  SUBCASE("a row violated by the only feasible point") {
    SolverModel m;
    m.add_column(1, 1, true);
    m.set_objective(Sense::maximize, {Rational(1)});
    CHECK(m.solve(-1).status == SolveOutcome::Status::optimal);
    m.add_row({{{0, 1}}, RowSense::le, 0});
    CHECK(m.solve(-1).status == SolveOutcome::Status::infeasible);
  }
  SUBCASE("rational objective is reported exactly") {
    SolverModel m;
    m.add_column(0, 1, true);
    m.add_column(0, 1, true);
    m.add_row({{{0, 1}, {1, 1}}, RowSense::le, 1});
    m.set_objective(Sense::maximize, {Rational(1, 3), Rational(1, 2)});
    auto out = m.solve(-1);
    REQUIRE(out.status == SolveOutcome::Status::optimal);
    CHECK(out.objective_exact == Rational(1, 2));
    CHECK(out.int_values[1] == 1);
  }
  SUBCASE("minimization with negative coefficients") {
    SolverModel m;
    m.add_column(-3, 5, true);
    m.set_objective(Sense::minimize, {Rational(2)});
    auto out = m.solve(-1);
    REQUIRE(out.status == SolveOutcome::Status::optimal);
    CHECK(out.int_values[0] == -3);
    CHECK(out.objective_exact == Rational(-6));
  }
  SUBCASE("invalid column index in a row") {
    SolverModel m;
    m.add_column(0, 1, true);
    CHECK_THROWS_AS(m.add_row({{{3, 1}}, RowSense::le, 1}), InputError);
  }
}

TEST_CASE("continuous columns and equality rows") {
  // max 3s + y with 2s + y <= 2, s continuous in [0,1], y binary
  SolverModel m;
  int s = m.add_column(0, 1, false);
  int y = m.add_column(0, 1, true);
  m.add_row({{{s, 2}, {y, 1}}, RowSense::le, 2});
  std::vector<Rational> obj(2);
  obj[s] = Rational(3);
  obj[y] = Rational(1);
  m.set_objective(Sense::maximize, obj);
  auto out = m.solve(-1);
  REQUIRE(out.status == SolveOutcome::Status::optimal);
  // s = 1, y = 0 gives 3; s = 1/2, y = 1 gives 5/2
  CHECK(out.values[s] == doctest::Approx(1.0));
  CHECK(out.int_values[y] == 0);
  CHECK(out.objective_value == doctest::Approx(3.0));

  SolverModel eq;
  int a = eq.add_column(0, 10, true);
  int b = eq.add_column(0, 10, true);
  eq.add_row({{{a, 1}, {b, 2}}, RowSense::eq, 7});
  eq.set_objective(Sense::maximize, {Rational(0), Rational(1)});
  auto o2 = eq.solve(-1);
  REQUIRE(o2.status == SolveOutcome::Status::optimal);
  CHECK(o2.int_values[a] == 1);
  CHECK(o2.int_values[b] == 3);
}

namespace {

struct RandomMilp {
  SolverModel model;
  std::vector<std::pair<std::int64_t, std::int64_t>> bounds;
  std::vector<SolverRow> rows;
  std::vector<Rational> obj;
  Sense sense;
};

RandomMilp make_random(Rng &rng) {
  RandomMilp rm;
  int ncols = static_cast<int>(rng.uniform(2, 6));
  rm.sense = rng.uniform(0, 1) ? Sense::maximize : Sense::minimize;
  for (int c = 0; c < ncols; ++c) {
    std::int64_t lo = rng.uniform(-2, 1);
    std::int64_t hi = lo + rng.uniform(0, 3);
    rm.bounds.emplace_back(lo, hi);
    rm.model.add_column(static_cast<double>(lo), static_cast<double>(hi), true);
    rm.obj.push_back(Rational(rng.uniform(-6, 6)));
  }
  int nrows = static_cast<int>(rng.uniform(1, 5));
  for (int r = 0; r < nrows; ++r) {
    SolverRow row;
    for (int c = 0; c < ncols; ++c) {
      std::int64_t a = rng.uniform(-4, 4);
      if (a != 0)
        row.coeffs.emplace_back(c, a);
    }
    int s = static_cast<int>(rng.uniform(0, 2));
    row.sense = s == 0 ? RowSense::le : s == 1 ? RowSense::ge : RowSense::eq;
    if (row.sense == RowSense::eq && rng.uniform(0, 3) != 0)
      row.sense = RowSense::le; // keep most instances feasible
    row.rhs = rng.uniform(-6, 10);
    rm.rows.push_back(row);
    rm.model.add_row(row);
  }
  rm.model.set_objective(rm.sense, rm.obj);
  return rm;
}

/// exhaustive reference over all integer points
std::pair<bool, Rational> enumerate_best(const RandomMilp &rm) {
  int ncols = static_cast<int>(rm.bounds.size());
  std::vector<std::int64_t> x(ncols);
  bool found = false;
  Rational best = 0;
  auto rec = [&](auto &&self, int c) -> void {
    if (c == ncols) {
      for (const auto &row : rm.rows)
        if (!SolverModel::row_satisfied(row, x))
          return;
      Rational v = 0;
      for (int j = 0; j < ncols; ++j)
        v += rm.obj[j] * Rational(x[j]);
      if (!found || (rm.sense == Sense::maximize ? v > best : v < best)) {
        best = v;
        found = true;
      }
      return;
    }
    for (std::int64_t t = rm.bounds[c].first; t <= rm.bounds[c].second; ++t) {
      x[c] = t;
      self(self, c + 1);
    }
  };
  rec(rec, 0);
  return {found, best};
}

} // namespace

TEST_CASE("milp agrees with exhaustive enumeration on random instances") {
  Rng rng(2024);
  int feasible = 0, infeasible = 0;
  for (int t = 0; t < 300; ++t) {
    RandomMilp rm = make_random(rng);
    auto [found, best] = enumerate_best(rm);
    auto out = rm.model.solve(-1);
    if (!found) {
      ++infeasible;
      CHECK(out.status == SolveOutcome::Status::infeasible);
    } else {
      ++feasible;
      REQUIRE(out.status == SolveOutcome::Status::optimal);
      REQUIRE(out.objective_is_exact);
      CHECK(out.objective_exact == best);
      // exactness gate: the incumbent satisfies every row exactly
      for (const auto &row : rm.rows)
        CHECK(SolverModel::row_satisfied(row, out.int_values));
    }
  }
  CHECK(feasible > 50);
  CHECK(infeasible > 10);
}

TEST_CASE("row monotonicity under added rows") {
  Rng rng(99);
  for (int t = 0; t < 60; ++t) {
    RandomMilp rm = make_random(rng);
    auto first = rm.model.solve(-1);
    if (first.status != SolveOutcome::Status::optimal)
      continue;
    // append random extra rows one by one; the optimum never improves
    Rational last = first.objective_exact;
    for (int extra = 0; extra < 3; ++extra) {
      SolverRow row;
      for (std::size_t c = 0; c < rm.bounds.size(); ++c) {
        std::int64_t a = rng.uniform(-3, 3);
        if (a != 0)
          row.coeffs.emplace_back(static_cast<int>(c), a);
      }
      row.sense = RowSense::le;
      row.rhs = rng.uniform(-2, 8);
      rm.model.add_row(row);
      auto out = rm.model.solve(-1);
      if (out.status != SolveOutcome::Status::optimal)
        break;
      if (rm.sense == Sense::maximize)
        CHECK(out.objective_exact <= last);
      else
        CHECK(out.objective_exact >= last);
      last = out.objective_exact;
    }
  }
}

TEST_CASE("tie preference steers equal-objective incumbents") {
  // two optima of value 1: (x=1,z=0) and (y=1,z=1); prefer the z-active one
  SolverModel m;
  int x = m.add_column(0, 1, true);
  int y = m.add_column(0, 1, true);
  int z = m.add_column(0, 1, true);
  m.add_row({{{x, 1}, {y, 1}}, RowSense::le, 1});
  m.add_row({{{z, 1}, {y, -1}}, RowSense::le, 0}); // z <= y
  m.set_objective(Sense::maximize, {Rational(1), Rational(1), Rational(0)});
  m.set_tie_preference({z});
  auto out = m.solve(-1);
  REQUIRE(out.status == SolveOutcome::Status::optimal);
  CHECK(out.objective_exact == Rational(1));
  CHECK(out.int_values[y] == 1);
  CHECK(out.int_values[z] == 1);
}

TEST_CASE("time limit reports an incumbent when one exists") {
  SolverModel m;
  m.add_column(0, 1, true);
  m.set_objective(Sense::maximize, {Rational(1)});
  auto out = m.solve(1e-9);
  CHECK((out.status == SolveOutcome::Status::time_limit_no_incumbent ||
         out.status == SolveOutcome::Status::optimal));
}

TEST_CASE("backend selection environment variable") {
  setenv("IPG_MILP_ENGINE", "cplex", 1);
  CHECK_THROWS_AS(SolverModel{}, BackendError);
  setenv("IPG_MILP_ENGINE", "bnb", 1);
  CHECK_NOTHROW(SolverModel{});
  unsetenv("IPG_MILP_ENGINE");
}

TEST_CASE("the walkthrough cut moves the welfare optimum from 8 to 5") {
  // welfare model of the two-player walkthrough game; appending player
  // 2's equilibrium inequality 4 - x^1_1 <= 4 x^2_1 + 2 x^2_2 - z1 - z2
  // drops the optimum to the equilibrium value
  ipg::LiftedModel lift = ipg::build_lifted_model(ipg::testing::example_one());
  SolverModel m = lift.instantiate();
  std::vector<Rational> obj(lift.num_cols(), Rational(0));
  for (const auto &[col, c] : lift.welfare_expr().terms)
    obj[col] += c;
  m.set_objective(Sense::maximize, obj);
  auto before = m.solve(-1);
  REQUIRE(before.status == SolveOutcome::Status::optimal);
  CHECK(before.objective_exact == Rational(8));
  m.add_row({{{0, 1}, {2, 4}, {3, 2}, {4, -1}, {5, -1}}, RowSense::ge, 4});
  auto after = m.solve(-1);
  REQUIRE(after.status == SolveOutcome::Status::optimal);
  CHECK(after.objective_exact == Rational(5));
}

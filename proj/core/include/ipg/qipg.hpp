// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ipg {

/// Quadratic game: each player minimizes 1/2 x'Qx + (C x^{-i})'x + c'x
/// over box-constrained integers, plus optional extra linear rows.
struct QipgInstance {
  int n = 0, m = 0;
  std::vector<std::vector<std::vector<Rational>>> Q; // [i] m x m, symmetrized on load
  std::vector<std::vector<std::vector<Rational>>> C; // [i] m x (m*(n-1))
  std::vector<std::vector<std::int64_t>> c;          // [i] m
  std::vector<std::int64_t> lb, ub;                  // shared box bounds
  std::vector<std::vector<Constraint>> extra_rows;   // optional, per player

  void validate() const;
};

/// Minimization game over integer domains [lb_j, ub_j]; quadratic own
/// terms and bilinear cross terms become canonical monomials so the
/// binary-expansion lift keeps the master and the cuts linear.
GameInstance build_qipg(const QipgInstance &inst);

/// Direct quadratic-form evaluation, the arithmetic reference for
/// payoff tests.
Rational qipg_cost(const QipgInstance &inst, int player, const StrategyProfile &profile);

/// Random instances: Q positive definite when convex (integer factor
/// product, rescaled into [-25,25] by an exact positive factor),
/// arbitrary symmetric otherwise; C rational in [-25,25]; c integer in
/// [-5,5]. Bounds are the caller's (the CLI draws them from
/// [-1000,0] x [5,1000]).
QipgInstance generate_qipg(int n, int m, std::int64_t lb, std::int64_t ub, bool convex,
                           std::uint64_t seed);

// JSON schema: {n,m,Q,C,c,lb,ub,rows?}
QipgInstance qipg_from_json(const std::string &text);
std::string qipg_to_json(const QipgInstance &inst);

} // namespace ipg

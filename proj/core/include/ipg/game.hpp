// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/rational.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ipg {

enum class Sense { maximize, minimize };
enum class RowSense { le, eq, ge };

/// Bounded integer (or binary) decision variable of one player.
struct VarDomain {
  std::int64_t lower = 0;
  std::int64_t upper = 1;
  enum class Kind { binary, integer } kind = Kind::binary;

  void validate() const;
  static VarDomain binary() { return {0, 1, Kind::binary}; }
  static VarDomain integer(std::int64_t lo, std::int64_t hi) {
    return {lo, hi, Kind::integer};
  }
};

/// One linear constraint over a single player's own variables.
struct Constraint {
  std::vector<std::int64_t> coeffs;
  RowSense sense = RowSense::le;
  std::int64_t rhs = 0;
};

/// Reference to one variable of one player.
struct VarRef {
  int player = 0;
  int var = 0;
  friend bool operator==(const VarRef &, const VarRef &) = default;
  friend auto operator<=>(const VarRef &, const VarRef &) = default;
};

struct LinearTerm {
  VarRef var;
  Rational coeff;
};

/// Degree-2 monomial coeff * a * b, with a <= b canonically so each
/// product has a single representation across all utilities.
struct Monomial2 {
  VarRef a, b;
  Rational coeff;

  void canonicalize() {
    if (b < a)
      std::swap(a, b);
  }
};

/// Degree <= 2 utility over the joint variable space. Games built
/// around a custom lift (network formation, facility location) leave
/// this empty and mark the instance accordingly.
struct UtilityFunction {
  Sense sense = Sense::maximize;
  std::vector<LinearTerm> linear;
  std::vector<Monomial2> quadratic;
};

/// One player's parametrized integer program: own feasible set plus a
/// utility in the joint space.
struct PlayerProgram {
  int num_vars = 0;
  std::vector<VarDomain> domains;
  std::vector<Constraint> constraints;
  UtilityFunction utility;
};

/// Welfare specification: the default is the sum of utilities.
struct WelfareSpec {
  bool sum_of_utilities = true;
  std::vector<LinearTerm> linear;     // used when !sum_of_utilities
  std::vector<Monomial2> quadratic;
};

struct StrategyProfile {
  std::vector<std::vector<std::int64_t>> x; // x[i] = player i's vector

  friend bool operator==(const StrategyProfile &, const StrategyProfile &) = default;
};

struct GameInstance {
  int num_players = 0;
  std::vector<PlayerProgram> players;
  WelfareSpec welfare;
  /// False for games whose true payoffs are only defined through a
  /// custom lift; polynomial evaluation is then an input error.
  bool polynomial_payoffs = true;

  Sense sense() const { return players.empty() ? Sense::maximize : players[0].utility.sense; }
  void validate() const;
};

// --- operations -----------------------------------------------------------

/// True iff x satisfies player i's domains and constraints.
bool is_feasible(const GameInstance &game, int player, const std::vector<std::int64_t> &x);

/// Exact u^i at the profile. No feasibility check.
Rational payoff(const GameInstance &game, int player, const StrategyProfile &profile);

/// Welfare under the configured welfare specification.
Rational welfare(const GameInstance &game, const StrategyProfile &profile);

/// best_value - payoff for maximization (payoff - best_value when
/// minimizing); throws NumericalError when negative, since that means
/// best_value was not an optimal best-response value.
Rational regret(const GameInstance &game, int player, const StrategyProfile &profile,
                const Rational &best_value);

/// Dimension check shared by the operations above.
void check_profile(const GameInstance &game, const StrategyProfile &profile);

// --- JSON instance schema --------------------------------------------------

GameInstance game_from_json(const std::string &text);
std::string game_to_json(const GameInstance &game);

} // namespace ipg

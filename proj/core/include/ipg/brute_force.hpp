// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"
#include "ipg/rational.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ipg {

/// Independent correctness oracle: exhaustive profile enumeration,
/// best-response tables, the complete PNE set, OSW and prices. Every
/// other module is tested against this one, so it never touches the
/// solver or the lifted model (callers may pass an exact payoff
/// functional for games whose utilities live in a custom lift).
using PayoffFn = std::function<Rational(int player, const StrategyProfile &)>;

struct ProfileSpace {
  std::vector<std::vector<std::vector<std::int64_t>>> strategies; // [player][k] = vector
  std::int64_t total = 0;
};

inline constexpr std::int64_t kDefaultProfileCap = 10'000'000;

/// Exactly the integer points of X^i, in lexicographic order.
std::vector<std::vector<std::int64_t>> enumerate_feasible(const GameInstance &game, int player,
                                                          std::int64_t cap = kDefaultProfileCap);

ProfileSpace enumerate_profiles(const GameInstance &game,
                                std::int64_t cap = kDefaultProfileCap);

struct BruteForceResult {
  std::vector<std::pair<StrategyProfile, Rational>> pnes; // lexicographic order
  Rational osw;
  StrategyProfile osw_profile;
  std::optional<Rational> pos, poa;
};

/// Exact PNE set by checking every unilateral deviation; prices per the
/// standard definitions (undefined when the PNE set is empty or the
/// welfare signs make the ratio meaningless).
BruteForceResult all_pnes(const GameInstance &game, const PayoffFn &payoff_fn = nullptr,
                          std::int64_t cap = kDefaultProfileCap);

/// price = ratio >= 1 measuring welfare loss of `achieved` against
/// `optimal`; std::nullopt when signs differ or a denominator is zero.
std::optional<Rational> welfare_price(const Rational &osw, const Rational &achieved, Sense sense);

} // namespace ipg

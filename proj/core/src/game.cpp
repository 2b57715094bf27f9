// SPDX-License-Identifier: Apache-2.0
#include "ipg/game.hpp"

#include "ipg/errors.hpp"

namespace ipg {

void VarDomain::validate() const {
  if (lower > upper)
    throw InputError("variable domain with lower > upper");
  if (kind == Kind::binary && (lower != 0 || upper != 1))
    throw InputError("binary domain must be [0,1]");
  // binary expansion must never overflow 64-bit signed arithmetic
  unsigned __int128 range = (unsigned __int128)(upper - lower);
  if (range >> 62)
    throw InputError("domain range exceeds 62 bits");
}

void GameInstance::validate() const {
  if (num_players <= 0 || static_cast<int>(players.size()) != num_players)
    throw InputError("player count mismatch");
  for (int i = 0; i < num_players; ++i) {
    const auto &p = players[i];
    if (p.num_vars < 0 || static_cast<int>(p.domains.size()) != p.num_vars)
      throw InputError("domain count mismatch for player " + std::to_string(i));
    for (const auto &d : p.domains)
      d.validate();
    for (const auto &c : p.constraints)
      if (static_cast<int>(c.coeffs.size()) != p.num_vars)
        throw InputError("constraint width mismatch for player " + std::to_string(i));
    if (p.utility.sense != sense())
      throw InputError("all players must share the same utility sense");
    auto check_ref = [&](const VarRef &r) {
      if (r.player < 0 || r.player >= num_players || r.var < 0 ||
          r.var >= players[r.player].num_vars)
        throw InputError("utility references an invalid (player,var) pair");
    };
    for (const auto &t : p.utility.linear)
      check_ref(t.var);
    for (const auto &q : p.utility.quadratic) {
      check_ref(q.a);
      check_ref(q.b);
      if (q.b < q.a)
        throw InputError("monomial not in canonical order");
    }
  }
}

void check_profile(const GameInstance &game, const StrategyProfile &profile) {
  if (static_cast<int>(profile.x.size()) != game.num_players)
    throw InputError("profile has wrong number of players");
  for (int i = 0; i < game.num_players; ++i)
    if (static_cast<int>(profile.x[i].size()) != game.players[i].num_vars)
      throw InputError("profile dimension mismatch for player " + std::to_string(i));
}

bool is_feasible(const GameInstance &game, int player, const std::vector<std::int64_t> &x) {
  if (player < 0 || player >= game.num_players)
    throw InputError("player index out of range");
  const auto &p = game.players[player];
  if (static_cast<int>(x.size()) != p.num_vars)
    throw InputError("strategy dimension mismatch");
  for (int j = 0; j < p.num_vars; ++j)
    if (x[j] < p.domains[j].lower || x[j] > p.domains[j].upper)
      return false;
  for (const auto &c : p.constraints) {
    __int128 lhs = 0;
    for (int j = 0; j < p.num_vars; ++j)
      lhs += (__int128)c.coeffs[j] * x[j];
    switch (c.sense) {
    case RowSense::le:
      if (lhs > c.rhs)
        return false;
      break;
    case RowSense::eq:
      if (lhs != c.rhs)
        return false;
      break;
    case RowSense::ge:
      if (lhs < c.rhs)
        return false;
      break;
    }
  }
  return true;
}

Rational payoff(const GameInstance &game, int player, const StrategyProfile &profile) {
  if (player < 0 || player >= game.num_players)
    throw InputError("player index out of range");
  if (!game.polynomial_payoffs)
    throw InputError("game payoffs are defined through a custom lift; "
                     "evaluate them on the lifted model");
  check_profile(game, profile);
  const auto &u = game.players[player].utility;
  Rational v = 0;
  for (const auto &t : u.linear)
    v += t.coeff * Rational(profile.x[t.var.player][t.var.var]);
  for (const auto &q : u.quadratic)
    v += q.coeff * Rational(profile.x[q.a.player][q.a.var]) *
         Rational(profile.x[q.b.player][q.b.var]);
  return v;
}

Rational welfare(const GameInstance &game, const StrategyProfile &profile) {
  check_profile(game, profile);
  if (game.welfare.sum_of_utilities) {
    Rational s = 0;
    for (int i = 0; i < game.num_players; ++i)
      s += payoff(game, i, profile);
    return s;
  }
  Rational v = 0;
  for (const auto &t : game.welfare.linear)
    v += t.coeff * Rational(profile.x[t.var.player][t.var.var]);
  for (const auto &q : game.welfare.quadratic)
    v += q.coeff * Rational(profile.x[q.a.player][q.a.var]) *
         Rational(profile.x[q.b.player][q.b.var]);
  return v;
}

Rational regret(const GameInstance &game, int player, const StrategyProfile &profile,
                const Rational &best_value) {
  Rational cur = payoff(game, player, profile);
  Rational r = game.sense() == Sense::maximize ? best_value - cur : cur - best_value;
  if (r < Rational(0))
    throw NumericalError("negative regret: best_value was not optimal");
  return r;
}

} // namespace ipg

// SPDX-License-Identifier: Apache-2.0
#include "ipg/brute_force.hpp"

#include "ipg/errors.hpp"

namespace ipg {

std::vector<std::vector<std::int64_t>> enumerate_feasible(const GameInstance &game, int player,
                                                          std::int64_t cap) {
  if (player < 0 || player >= game.num_players)
    throw InputError("player index out of range");
  const auto &p = game.players[player];
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(p.num_vars);
  // lexicographic product over domains, filtered by the constraints
  std::int64_t count = 0;
  auto rec = [&](auto &&self, int v) -> void {
    if (v == p.num_vars) {
      if (is_feasible(game, player, x)) {
        out.push_back(x);
        if (++count > cap)
          throw CapExceeded("feasible-strategy enumeration exceeds the cap");
      }
      return;
    }
    for (std::int64_t t = p.domains[v].lower; t <= p.domains[v].upper; ++t) {
      x[v] = t;
      self(self, v + 1);
    }
  };
  rec(rec, 0);
  return out;
}

ProfileSpace enumerate_profiles(const GameInstance &game, std::int64_t cap) {
  ProfileSpace space;
  space.total = 1;
  for (int i = 0; i < game.num_players; ++i) {
    space.strategies.push_back(enumerate_feasible(game, i, cap));
    __int128 t = (__int128)space.total * space.strategies.back().size();
    if (t > cap)
      throw CapExceeded("profile space exceeds the cap (" + std::to_string(cap) + ")");
    space.total = static_cast<std::int64_t>(t);
  }
  return space;
}

std::optional<Rational> welfare_price(const Rational &osw, const Rational &achieved,
                                      Sense sense) {
  // orientation: the price is OSW / S for maximization and S / OSW for
  // minimization with positive costs; when both welfare values are
  // negative in a minimization game the roles flip again so the ratio
  // stays >= 1. Mixed signs or zero denominators leave it undefined.
  if (osw == achieved)
    return Rational(1);
  Rational num, den;
  if (sense == Sense::maximize) {
    num = osw;
    den = achieved;
  } else {
    num = achieved;
    den = osw;
  }
  if (num.sign() < 0 && den.sign() < 0) {
    std::swap(num, den);
    num = -num;
    den = -den;
  }
  if (num.sign() <= 0 || den.sign() <= 0)
    return std::nullopt;
  return num / den;
}

BruteForceResult all_pnes(const GameInstance &game, const PayoffFn &payoff_fn,
                          std::int64_t cap) {
  PayoffFn pf = payoff_fn;
  if (!pf)
    pf = [&game](int i, const StrategyProfile &prof) { return payoff(game, i, prof); };

  ProfileSpace space = enumerate_profiles(game, cap);
  const int n = game.num_players;
  const bool maximize = game.sense() == Sense::maximize;

  // per-player best-response value, memoized over opponent tuples
  std::vector<std::int64_t> radix(n), opp_total(n);
  std::vector<std::vector<Rational>> best(n);
  for (int i = 0; i < n; ++i) {
    __int128 t = 1;
    for (int k = 0; k < n; ++k)
      if (k != i)
        t *= space.strategies[k].size();
    opp_total[i] = static_cast<std::int64_t>(t);
    best[i].assign(opp_total[i], Rational(0));
  }

  StrategyProfile prof;
  prof.x.resize(n);
  std::vector<std::size_t> idx(n, 0);

  auto opp_index = [&](int i) {
    std::int64_t key = 0;
    for (int k = 0; k < n; ++k) {
      if (k == i)
        continue;
      key = key * static_cast<std::int64_t>(space.strategies[k].size()) +
            static_cast<std::int64_t>(idx[k]);
    }
    return key;
  };

  // pass 1: best-response tables
  for (int i = 0; i < n; ++i) {
    std::vector<char> seen(opp_total[i], 0);
    std::fill(idx.begin(), idx.end(), 0);
    bool done = false;
    while (!done) {
      for (int k = 0; k < n; ++k)
        prof.x[k] = space.strategies[k][idx[k]];
      std::int64_t key = opp_index(i);
      Rational v = pf(i, prof);
      if (!seen[key]) {
        seen[key] = 1;
        best[i][key] = v;
      } else if (maximize ? v > best[i][key] : v < best[i][key]) {
        best[i][key] = v;
      }
      // advance mixed-radix counter
      done = true;
      for (int k = n - 1; k >= 0; --k) {
        if (++idx[k] < space.strategies[k].size()) {
          done = false;
          break;
        }
        idx[k] = 0;
      }
    }
  }

  // pass 2: PNE membership and welfare extremes
  BruteForceResult res;
  bool have_osw = false;
  std::optional<Rational> best_w, worst_w;
  std::fill(idx.begin(), idx.end(), 0);
  bool done = space.total == 0;
  while (!done) {
    for (int k = 0; k < n; ++k)
      prof.x[k] = space.strategies[k][idx[k]];
    Rational w = 0;
    bool pne = true;
    for (int i = 0; i < n; ++i) {
      Rational v = pf(i, prof);
      w += v;
      if (pne && v != best[i][opp_index(i)])
        pne = false;
    }
    if (!game.welfare.sum_of_utilities)
      w = welfare(game, prof);
    if (!have_osw || (maximize ? w > res.osw : w < res.osw)) {
      res.osw = w;
      res.osw_profile = prof;
      have_osw = true;
    }
    if (pne) {
      res.pnes.emplace_back(prof, w);
      if (!best_w || (maximize ? w > *best_w : w < *best_w))
        best_w = w;
      if (!worst_w || (maximize ? w < *worst_w : w > *worst_w))
        worst_w = w;
    }
    done = true;
    for (int k = n - 1; k >= 0; --k) {
      if (++idx[k] < space.strategies[k].size()) {
        done = false;
        break;
      }
      idx[k] = 0;
    }
  }
  if (!have_osw)
    throw InputError("game has an empty profile space");
  if (best_w) {
    res.pos = welfare_price(res.osw, *best_w, game.sense());
    res.poa = welfare_price(res.osw, *worst_w, game.sense());
  }
  return res;
}

} // namespace ipg

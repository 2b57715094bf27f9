// SPDX-License-Identifier: Apache-2.0
#include "ipg/kpg.hpp"

#include "ipg/errors.hpp"
#include "ipg/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace ipg {

using nlohmann::json;

void KpgInstance::validate() const {
  if (n < 1 || m < 1)
    throw InputError("kpg needs n >= 1 and m >= 1");
  auto check_mat = [&](const auto &mat, const char *name) {
    if (static_cast<int>(mat.size()) != n)
      throw InputError(std::string("kpg ") + name + " must have n rows");
    for (const auto &row : mat)
      if (static_cast<int>(row.size()) != m)
        throw InputError(std::string("kpg ") + name + " rows must have m entries");
  };
  check_mat(p, "p");
  check_mat(w, "w");
  if (static_cast<int>(b.size()) != n)
    throw InputError("kpg b must have n entries");
  if (static_cast<int>(C.size()) != n)
    throw InputError("kpg C must have n blocks");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(C[i].size()) != n)
      throw InputError("kpg C blocks must be n x n");
    for (int k = 0; k < n; ++k)
      if (static_cast<int>(C[i][k].size()) != m)
        throw InputError("kpg C entries must have m items");
    for (int j = 0; j < m; ++j) {
      if (w[i][j] < 0)
        throw InputError("kpg weights must be nonnegative");
      if (p[i][j] < 0)
        throw InputError("kpg profits must be nonnegative");
    }
    if (b[i] < 0)
      throw InputError("kpg capacities must be nonnegative");
  }
}

GameInstance build_kpg(const KpgInstance &inst) {
  inst.validate();
  GameInstance game;
  game.num_players = inst.n;
  game.players.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    PlayerProgram &pl = game.players[i];
    pl.num_vars = inst.m;
    pl.domains.assign(inst.m, VarDomain::binary());
    Constraint cap;
    cap.coeffs = inst.w[i];
    cap.sense = RowSense::le;
    cap.rhs = inst.b[i];
    pl.constraints.push_back(std::move(cap));
    pl.utility.sense = Sense::maximize;
    for (int j = 0; j < inst.m; ++j)
      if (inst.p[i][j] != 0)
        pl.utility.linear.push_back({{i, j}, Rational(inst.p[i][j])});
    for (int k = 0; k < inst.n; ++k) {
      if (k == i)
        continue;
      for (int j = 0; j < inst.m; ++j) {
        if (inst.C[i][k][j] == 0)
          continue;
        Monomial2 q{{i, j}, {k, j}, Rational(inst.C[i][k][j])};
        q.canonicalize();
        pl.utility.quadratic.push_back(q);
      }
    }
  }
  game.validate();
  return game;
}

KpgInstance generate_kpg(int n, int m, char dist, double cap_ratio, std::uint64_t seed) {
  if (dist != 'A' && dist != 'B' && dist != 'C')
    throw InputError("kpg distribution must be A, B or C");
  KpgInstance inst;
  inst.n = n;
  inst.m = m;
  inst.dist = std::string(1, dist);
  inst.seed = seed;
  Rng rng(seed);
  inst.p.assign(n, std::vector<std::int64_t>(m));
  inst.w.assign(n, std::vector<std::int64_t>(m));
  inst.b.assign(n, 0);
  inst.C.assign(n, std::vector<std::vector<std::int64_t>>(n, std::vector<std::int64_t>(m, 0)));
  for (int i = 0; i < n; ++i) {
    std::int64_t wsum = 0;
    for (int j = 0; j < m; ++j) {
      inst.p[i][j] = rng.uniform(1, 100);
      inst.w[i][j] = rng.uniform(1, 100);
      wsum += inst.w[i][j];
    }
    inst.b[i] = static_cast<std::int64_t>(cap_ratio * static_cast<double>(wsum));
  }
  if (dist == 'A') {
    // one value per item, shared by every (i,k) pair
    for (int j = 0; j < m; ++j) {
      std::int64_t c = rng.uniform(1, 100);
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          if (k != i)
            inst.C[i][k][j] = c;
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        if (k == i)
          continue;
        for (int j = 0; j < m; ++j)
          inst.C[i][k][j] = dist == 'B' ? rng.uniform(1, 100) : rng.uniform(-100, 100);
      }
  }
  return inst;
}

namespace {

int item_col(const LiftedModel &lift, int player, int item) {
  const VarEncoding &e = lift.encoding(player, item);
  return e.first_col; // binary variables take exactly one bit
}

} // namespace

std::vector<EquilibriumCut> dominance_cuts(const KpgInstance &inst, const LiftedModel &lift) {
  std::vector<EquilibriumCut> cuts;
  for (int i = 0; i < inst.n; ++i) {
    // worst/best profits induced by free opponents
    std::vector<std::int64_t> pmin(inst.m), pmax(inst.m);
    for (int j = 0; j < inst.m; ++j) {
      std::int64_t lo = inst.p[i][j], hi = inst.p[i][j];
      for (int k = 0; k < inst.n; ++k) {
        if (k == i)
          continue;
        lo += std::min<std::int64_t>(inst.C[i][k][j], 0);
        hi += std::max<std::int64_t>(inst.C[i][k][j], 0);
      }
      pmin[j] = lo;
      pmax[j] = hi;
    }
    for (int j = 0; j < inst.m; ++j) {
      for (int jp = 0; jp < inst.m; ++jp) {
        if (j == jp || inst.w[i][j] > inst.w[i][jp])
          continue;
        if (pmin[j] > pmax[jp]) {
          EquilibriumCut cut;
          cut.provenance = EquilibriumCut::Provenance::dominance;
          cut.player = i;
          cut.row.sense = RowSense::ge; // x_j - x_{j'} >= 0
          cut.row.coeffs = {{item_col(lift, i, j), 1}, {item_col(lift, i, jp), -1}};
          cut.row.rhs = 0;
          cuts.push_back(std::move(cut));
        } else if (inst.n == 2) {
          // conditional form: dominance under (x^o_j = 1, x^o_{j'} = 0)
          int o = 1 - i;
          if (inst.p[i][j] + inst.C[i][o][j] > inst.p[i][jp]) {
            EquilibriumCut cut;
            cut.provenance = EquilibriumCut::Provenance::dominance;
            cut.player = i;
            // x^i_{j'} <= x^i_j + (1 - x^o_j) + x^o_{j'}
            cut.row.sense = RowSense::ge;
            cut.row.coeffs = {{item_col(lift, i, j), 1},
                              {item_col(lift, i, jp), -1},
                              {item_col(lift, o, j), -1},
                              {item_col(lift, o, jp), 1}};
            cut.row.rhs = -1;
            cuts.push_back(std::move(cut));
          }
        }
      }
    }
  }
  return cuts;
}

std::vector<EquilibriumCut> payoff_cuts(const KpgInstance &inst, const LiftedModel &lift) {
  constexpr int kSubsetCap = 1 << 12;
  std::vector<EquilibriumCut> cuts;
  for (int i = 0; i < inst.n; ++i) {
    for (int j = 0; j < inst.m; ++j) {
      std::vector<int> neg;
      std::int64_t pos_outside_all = 0;
      for (int k = 0; k < inst.n; ++k) {
        if (k == i)
          continue;
        if (inst.C[i][k][j] < 0)
          neg.push_back(k);
        else
          pos_outside_all += inst.C[i][k][j];
      }
      if (neg.size() > 12)
        continue; // enumeration capped; oversized items are skipped
      int count = 1 << neg.size();
      if (count > kSubsetCap)
        continue;
      for (int mask = 0; mask < count; ++mask) {
        // profit if everyone in S picks j and every profitable opponent
        // outside S joins in as well (the sound worst case)
        auto guarded = [&](int mm) {
          std::int64_t s = inst.p[i][j] + pos_outside_all;
          for (std::size_t t = 0; t < neg.size(); ++t)
            if (mm & (1 << t))
              s += inst.C[i][neg[t]][j];
          return s;
        };
        if (guarded(mask) >= 0)
          continue;
        // minimal: dropping any single member restores nonnegativity
        bool minimal = true;
        for (std::size_t t = 0; t < neg.size() && minimal; ++t)
          if ((mask & (1 << t)) && guarded(mask & ~(1 << t)) < 0)
            minimal = false;
        if (!minimal)
          continue;
        EquilibriumCut cut;
        cut.provenance = EquilibriumCut::Provenance::payoff;
        cut.player = i;
        cut.row.sense = RowSense::le;
        cut.row.coeffs.emplace_back(item_col(lift, i, j), 1);
        std::int64_t size = 0;
        for (std::size_t t = 0; t < neg.size(); ++t)
          if (mask & (1 << t)) {
            cut.row.coeffs.emplace_back(item_col(lift, neg[t], j), 1);
            ++size;
          }
        cut.row.rhs = size;
        cuts.push_back(std::move(cut));
      }
    }
  }
  return cuts;
}

std::vector<EquilibriumCut> strategic_cuts(const KpgInstance &inst, const LiftedModel &lift) {
  std::vector<EquilibriumCut> out = dominance_cuts(inst, lift);
  auto pay = payoff_cuts(inst, lift);
  out.insert(out.end(), pay.begin(), pay.end());
  return out;
}

void BkpInstance::validate() const {
  if (a.size() != b.size())
    throw InputError("bkp a and b must have the same length");
  if (A < 0 || B < 1)
    throw InputError("bkp requires A >= 0 and B >= 1");
  for (std::size_t j = 0; j < a.size(); ++j)
    if (a[j] < 0 || b[j] < 0)
      throw InputError("bkp entries must be nonnegative");
}

KpgInstance reduce_bkp_instance(const BkpInstance &input) {
  input.validate();
  BkpInstance bkp = input;
  const int m0 = static_cast<int>(bkp.a.size());
  bool needs_norm = false;
  for (int j = 0; j < m0; ++j)
    if (bkp.a[j] > bkp.A)
      needs_norm = true;
  if (needs_norm) {
    // rescale so every a_j fits under the capacity without changing the
    // answer: A -> 2A+1, a_j -> 2a_j (or 2A+1 when a_j > A), plus one
    // forced element with a = 1, b = B
    std::int64_t A = bkp.A;
    for (int j = 0; j < m0; ++j)
      bkp.a[j] = bkp.a[j] <= A ? 2 * bkp.a[j] : 2 * A + 1;
    bkp.A = 2 * A + 1;
    bkp.a.push_back(1);
    bkp.b.push_back(bkp.B);
  }

  const int m = static_cast<int>(bkp.a.size());
  KpgInstance kpg;
  kpg.n = 2;
  kpg.m = m + 1;
  kpg.p.assign(2, std::vector<std::int64_t>(m + 1, 0));
  kpg.w.assign(2, std::vector<std::int64_t>(m + 1, 0));
  kpg.b.assign(2, 0);
  kpg.C.assign(2, std::vector<std::vector<std::int64_t>>(2, std::vector<std::int64_t>(m + 1, 0)));

  // player 1: max sum b_j x^1_j x^2_j + x^1_{m+1} x^2_{m+1}
  //           s.t. sum a_j x^1_j <= A
  for (int j = 0; j < m; ++j) {
    kpg.w[0][j] = bkp.a[j];
    kpg.C[0][1][j] = bkp.b[j];
  }
  kpg.C[0][1][m] = 1;
  kpg.b[0] = bkp.A;

  // player 2: max (B-1) x^2_{m+1} + sum b_j x^2_j - sum b_j x^2_j x^1_j
  //           s.t. sum b_j x^2_j + B x^2_{m+1} <= B
  for (int j = 0; j < m; ++j) {
    kpg.p[1][j] = bkp.b[j];
    kpg.w[1][j] = bkp.b[j];
    kpg.C[1][0][j] = -bkp.b[j];
  }
  kpg.p[1][m] = bkp.B - 1;
  kpg.w[1][m] = bkp.B;
  kpg.b[1] = bkp.B;
  kpg.dist = "bkp";
  return kpg;
}

GameInstance reduce_bkp(const BkpInstance &bkp) { return build_kpg(reduce_bkp_instance(bkp)); }

bool bkp_feasible(const BkpInstance &bkp) {
  bkp.validate();
  const int m = static_cast<int>(bkp.a.size());
  if (m > 24)
    throw CapExceeded("bkp reference check is exhaustive; m too large");
  for (int x = 0; x < (1 << m); ++x) {
    __int128 ax = 0;
    for (int j = 0; j < m; ++j)
      if (x & (1 << j))
        ax += bkp.a[j];
    if (ax > bkp.A)
      continue;
    bool ok = true;
    for (int y = 0; y < (1 << m) && ok; ++y) {
      __int128 by = 0, follower = 0;
      for (int j = 0; j < m; ++j)
        if (y & (1 << j)) {
          by += bkp.b[j];
          if (!(x & (1 << j)))
            follower += bkp.b[j];
        }
      if (by <= bkp.B && follower > bkp.B - 1)
        ok = false;
    }
    if (ok)
      return true;
  }
  return false;
}

KpgInstance kpg_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  try {
    KpgInstance inst;
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    inst.p = j.at("p").get<std::vector<std::vector<std::int64_t>>>();
    inst.w = j.at("w").get<std::vector<std::vector<std::int64_t>>>();
    inst.b = j.at("b").get<std::vector<std::int64_t>>();
    inst.C = j.at("C").get<std::vector<std::vector<std::vector<std::int64_t>>>>();
    inst.dist = j.value("dist", "");
    inst.seed = j.value("seed", 0ULL);
    inst.validate();
    return inst;
  } catch (const json::exception &e) {
    throw InputError(std::string("bad kpg instance: ") + e.what());
  }
}

std::string kpg_to_json(const KpgInstance &inst) {
  json j;
  j["type"] = "kpg";
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["p"] = inst.p;
  j["w"] = inst.w;
  j["b"] = inst.b;
  j["C"] = inst.C;
  if (!inst.dist.empty())
    j["dist"] = inst.dist;
  j["seed"] = inst.seed;
  return j.dump(2);
}

BkpInstance bkp_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  try {
    BkpInstance inst;
    inst.a = j.at("a").get<std::vector<std::int64_t>>();
    inst.b = j.at("b").get<std::vector<std::int64_t>>();
    inst.A = j.at("A").get<std::int64_t>();
    inst.B = j.at("B").get<std::int64_t>();
    inst.validate();
    return inst;
  } catch (const json::exception &e) {
    throw InputError(std::string("bad bkp instance: ") + e.what());
  }
}

std::string bkp_to_json(const BkpInstance &inst) {
  json j;
  j["type"] = "bkp";
  j["a"] = inst.a;
  j["b"] = inst.b;
  j["A"] = inst.A;
  j["B"] = inst.B;
  return j.dump(2);
}

} // namespace ipg

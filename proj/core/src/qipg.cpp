// SPDX-License-Identifier: Apache-2.0
#include "ipg/qipg.hpp"

#include "ipg/errors.hpp"
#include "ipg/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace ipg {

using nlohmann::json;

void QipgInstance::validate() const {
  if (n < 1 || m < 1)
    throw InputError("qipg needs n >= 1 and m >= 1");
  if (static_cast<int>(Q.size()) != n || static_cast<int>(C.size()) != n ||
      static_cast<int>(c.size()) != n)
    throw InputError("qipg Q, C, c must have one block per player");
  if (static_cast<int>(lb.size()) != m || static_cast<int>(ub.size()) != m)
    throw InputError("qipg bounds must have m entries");
  for (int j = 0; j < m; ++j)
    if (lb[j] > ub[j])
      throw InputError("qipg bounds must satisfy lb <= ub");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(Q[i].size()) != m || static_cast<int>(c[i].size()) != m)
      throw InputError("qipg Q and c blocks must be m-dimensional");
    for (const auto &row : Q[i])
      if (static_cast<int>(row.size()) != m)
        throw InputError("qipg Q must be m x m");
    if (n > 1) {
      if (static_cast<int>(C[i].size()) != m)
        throw InputError("qipg C must have m rows");
      for (const auto &row : C[i])
        if (static_cast<int>(row.size()) != m * (n - 1))
          throw InputError("qipg C rows must have m*(n-1) entries");
    }
  }
  if (!extra_rows.empty() && static_cast<int>(extra_rows.size()) != n)
    throw InputError("qipg extra rows must have one list per player");
}

GameInstance build_qipg(const QipgInstance &inst) {
  inst.validate();
  GameInstance game;
  game.num_players = inst.n;
  game.players.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    PlayerProgram &p = game.players[i];
    p.num_vars = inst.m;
    for (int j = 0; j < inst.m; ++j)
      p.domains.push_back(VarDomain::integer(inst.lb[j], inst.ub[j]));
    if (!inst.extra_rows.empty())
      p.constraints = inst.extra_rows[i];
    p.utility.sense = Sense::minimize;
    for (int j = 0; j < inst.m; ++j)
      if (inst.c[i][j] != 0)
        p.utility.linear.push_back({{i, j}, Rational(inst.c[i][j])});
    // 1/2 x'Qx with Q symmetrized: diagonal keeps 1/2, off-diagonal
    // pairs merge into one canonical monomial
    for (int j = 0; j < inst.m; ++j)
      for (int k = j; k < inst.m; ++k) {
        Rational q = (inst.Q[i][j][k] + inst.Q[i][k][j]) / Rational(2);
        if (q.is_zero())
          continue;
        Rational coeff = j == k ? q / Rational(2) : q;
        Monomial2 mono{{i, j}, {i, k}, coeff};
        mono.canonicalize();
        p.utility.quadratic.push_back(mono);
      }
    // (C x^{-i})' x: opponent columns ordered by ascending player, then var
    if (inst.n > 1) {
      for (int j = 0; j < inst.m; ++j) {
        int col = 0;
        for (int k = 0; k < inst.n; ++k) {
          if (k == i)
            continue;
          for (int l = 0; l < inst.m; ++l, ++col) {
            const Rational &v = inst.C[i][j][col];
            if (v.is_zero())
              continue;
            Monomial2 mono{{i, j}, {k, l}, v};
            mono.canonicalize();
            p.utility.quadratic.push_back(mono);
          }
        }
      }
    }
  }
  game.validate();
  return game;
}

Rational qipg_cost(const QipgInstance &inst, int player, const StrategyProfile &profile) {
  Rational total = 0;
  const auto &x = profile.x[player];
  for (int j = 0; j < inst.m; ++j) {
    for (int k = 0; k < inst.m; ++k)
      total += Rational(x[j]) * inst.Q[player][j][k] * Rational(x[k]) / Rational(2);
    total += Rational(inst.c[player][j]) * Rational(x[j]);
  }
  if (inst.n > 1) {
    for (int j = 0; j < inst.m; ++j) {
      int col = 0;
      for (int k = 0; k < inst.n; ++k) {
        if (k == player)
          continue;
        for (int l = 0; l < inst.m; ++l, ++col)
          total += inst.C[player][j][col] * Rational(profile.x[k][l]) * Rational(x[j]);
      }
    }
  }
  return total;
}

QipgInstance generate_qipg(int n, int m, std::int64_t lb, std::int64_t ub, bool convex,
                           std::uint64_t seed) {
  if (n < 1 || n > 6 || m < 1 || m > 10)
    throw InputError("generator supports n in [1,6], m in [1,10]");
  if (lb > ub)
    throw InputError("generator needs lb <= ub");
  Rng rng(seed);
  QipgInstance inst;
  inst.n = n;
  inst.m = m;
  inst.lb.assign(m, lb);
  inst.ub.assign(m, ub);
  auto quarter = [&](std::int64_t lo, std::int64_t hi) {
    return Rational(rng.uniform(lo * 4, hi * 4), 4);
  };
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<Rational>> Q(m, std::vector<Rational>(m, Rational(0)));
    if (convex) {
      // G'G + I is positive definite with integer entries; an exact
      // positive rescale keeps it so while fitting the target range
      std::vector<std::vector<std::int64_t>> G(m, std::vector<std::int64_t>(m));
      for (auto &row : G)
        for (auto &v : row)
          v = rng.uniform(-10, 10);
      std::int64_t maxabs = 1;
      std::vector<std::vector<std::int64_t>> GG(m, std::vector<std::int64_t>(m, 0));
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) {
          std::int64_t s = a == b ? 1 : 0;
          for (int t = 0; t < m; ++t)
            s += G[t][a] * G[t][b];
          GG[a][b] = s;
          maxabs = std::max(maxabs, std::abs(s));
        }
      Rational scale(25, maxabs);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          Q[a][b] = Rational(GG[a][b]) * scale;
    } else {
      for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b)
          Q[a][b] = Q[b][a] = quarter(-25, 25);
    }
    inst.Q.push_back(std::move(Q));
    std::vector<std::vector<Rational>> C(m, std::vector<Rational>(m * (n - 1), Rational(0)));
    for (auto &row : C)
      for (auto &v : row)
        v = quarter(-25, 25);
    inst.C.push_back(std::move(C));
    std::vector<std::int64_t> c(m);
    for (auto &v : c)
      v = rng.uniform(-5, 5);
    inst.c.push_back(std::move(c));
  }
  return inst;
}

namespace {

Rational rational_from_json(const json &v) {
  if (v.is_array())
    return Rational(v.at(0).get<std::int64_t>(), v.at(1).get<std::int64_t>());
  if (v.is_number_integer())
    return Rational(v.get<std::int64_t>());
  throw InputError("rational values must be integers or [num,den] pairs");
}

json rational_to_json(const Rational &r) {
  if (r.is_integer())
    return json(r.num());
  return json::array({r.num(), r.den()});
}

std::vector<std::vector<Rational>> matrix_from_json(const json &m) {
  std::vector<std::vector<Rational>> out;
  for (const auto &row : m) {
    out.emplace_back();
    for (const auto &v : row)
      out.back().push_back(rational_from_json(v));
  }
  return out;
}

json matrix_to_json(const std::vector<std::vector<Rational>> &m) {
  json out = json::array();
  for (const auto &row : m) {
    json r = json::array();
    for (const auto &v : row)
      r.push_back(rational_to_json(v));
    out.push_back(std::move(r));
  }
  return out;
}

} // namespace

QipgInstance qipg_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  try {
    QipgInstance inst;
    inst.n = j.at("n").get<int>();
    inst.m = j.at("m").get<int>();
    for (const auto &q : j.at("Q"))
      inst.Q.push_back(matrix_from_json(q));
    for (const auto &c : j.at("C"))
      inst.C.push_back(matrix_from_json(c));
    inst.c = j.at("c").get<std::vector<std::vector<std::int64_t>>>();
    inst.lb = j.at("lb").get<std::vector<std::int64_t>>();
    inst.ub = j.at("ub").get<std::vector<std::int64_t>>();
    if (j.contains("rows")) {
      for (const auto &pr : j.at("rows")) {
        inst.extra_rows.emplace_back();
        for (const auto &cj : pr) {
          Constraint c;
          c.coeffs = cj.at("coeffs").get<std::vector<std::int64_t>>();
          std::string s = cj.at("sense").get<std::string>();
          c.sense = s == "<=" ? RowSense::le : s == ">=" ? RowSense::ge : RowSense::eq;
          c.rhs = cj.at("rhs").get<std::int64_t>();
          inst.extra_rows.back().push_back(std::move(c));
        }
      }
    }
    inst.validate();
    return inst;
  } catch (const json::exception &e) {
    throw InputError(std::string("bad qipg instance: ") + e.what());
  }
}

std::string qipg_to_json(const QipgInstance &inst) {
  json j;
  j["type"] = "qipg";
  j["n"] = inst.n;
  j["m"] = inst.m;
  j["Q"] = json::array();
  for (const auto &q : inst.Q)
    j["Q"].push_back(matrix_to_json(q));
  j["C"] = json::array();
  for (const auto &c : inst.C)
    j["C"].push_back(matrix_to_json(c));
  j["c"] = inst.c;
  j["lb"] = inst.lb;
  j["ub"] = inst.ub;
  if (!inst.extra_rows.empty()) {
    j["rows"] = json::array();
    for (const auto &pr : inst.extra_rows) {
      json rows = json::array();
      for (const auto &c : pr)
        rows.push_back({{"coeffs", c.coeffs},
                        {"sense", c.sense == RowSense::le   ? "<="
                                  : c.sense == RowSense::ge ? ">="
                                                            : "="},
                        {"rhs", c.rhs}});
      j["rows"].push_back(std::move(rows));
    }
  }
  return j.dump(2);
}

} // namespace ipg

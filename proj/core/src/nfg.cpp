// SPDX-License-Identifier: Apache-2.0
#include "ipg/nfg.hpp"

#include "ipg/errors.hpp"
#include "ipg/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <queue>

namespace ipg {

using nlohmann::json;

void NfgInstance::validate() const {
  if (num_vertices < 1)
    throw InputError("nfg needs at least one vertex");
  if (players.empty())
    throw InputError("nfg needs at least one player");
  for (const auto &e : edges) {
    if (e.from < 0 || e.from >= num_vertices || e.to < 0 || e.to >= num_vertices)
      throw InputError("nfg edge endpoint out of range");
    if (e.cost <= 0)
      throw InputError("nfg edge costs must be positive integers");
  }
  for (const auto &p : players) {
    if (p.source < 0 || p.source >= num_vertices || p.sink < 0 || p.sink >= num_vertices)
      throw InputError("nfg player terminal out of range");
    if (!(p.weight > Rational(0)))
      throw InputError("nfg weights must be positive");
  }
  // every sink must be reachable from its source
  for (std::size_t i = 0; i < players.size(); ++i) {
    std::vector<char> seen(num_vertices, 0);
    std::queue<int> q;
    q.push(players[i].source);
    seen[players[i].source] = 1;
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (const auto &e : edges)
        if (e.from == v && !seen[e.to]) {
          seen[e.to] = 1;
          q.push(e.to);
        }
    }
    if (!seen[players[i].sink])
      throw InputError("player " + std::to_string(i) + " cannot reach its sink");
  }
}

namespace {

/// Per-edge subset columns and the deviation identity over them.
class SubsetLift final : public CustomLift {
public:
  explicit SubsetLift(NfgInstance inst) : inst_(std::move(inst)) {
    n_ = static_cast<int>(inst_.players.size());
    subset_count_ = (1 << n_) - 1;
  }

  int col_of(const LiftedModel &lift, int edge, int subset_mask) const {
    return lift.custom_col_start() + edge * subset_count_ + (subset_mask - 1);
  }

  Rational weight_of(int mask) const {
    Rational s = 0;
    for (int i = 0; i < n_; ++i)
      if (mask & (1 << i))
        s += inst_.players[i].weight;
    return s;
  }

  void extend(LiftedModel &model) const override {
    const int E = static_cast<int>(inst_.edges.size());
    for (int e = 0; e < E; ++e)
      for (int mask = 1; mask <= subset_count_; ++mask) {
        std::string label = "z_e" + std::to_string(e) + "_s" + std::to_string(mask);
        model.add_custom_column(label, true, 0.0, 1.0);
      }
    for (int e = 0; e < E; ++e) {
      RationalRow clique;
      clique.sense = RowSense::le;
      clique.rhs = 1;
      for (int mask = 1; mask <= subset_count_; ++mask)
        clique.terms.emplace_back(col_of(model, e, mask), Rational(1));
      model.add_custom_row(clique);
      for (int i = 0; i < n_; ++i) {
        // x^i_e = sum over subsets containing i
        RationalRow link;
        link.sense = RowSense::eq;
        link.rhs = 0;
        link.terms.emplace_back(model.encoding(i, e).first_col, Rational(1));
        for (int mask = 1; mask <= subset_count_; ++mask)
          if (mask & (1 << i))
            link.terms.emplace_back(col_of(model, e, mask), Rational(-1));
        model.add_custom_row(link);
        for (int mask = 1; mask <= subset_count_; ++mask)
          if (mask & (1 << i)) {
            Rational share = inst_.players[i].weight / weight_of(mask);
            model.add_utility_term(i, col_of(model, e, mask),
                                   share * Rational(inst_.edges[e].cost));
          }
      }
    }
  }

  std::vector<Rational> induced_values(const GameInstance &game,
                                       const StrategyProfile &profile) const override {
    (void)game;
    const int E = static_cast<int>(inst_.edges.size());
    std::vector<Rational> vals(static_cast<std::size_t>(E) * subset_count_, Rational(0));
    for (int e = 0; e < E; ++e) {
      int users = 0;
      for (int i = 0; i < n_; ++i)
        if (profile.x[i][e] != 0)
          users |= 1 << i;
      if (users)
        vals[static_cast<std::size_t>(e) * subset_count_ + (users - 1)] = 1;
    }
    return vals;
  }

  DeviationExpr deviation_utility(const LiftedModel &model, int player,
                                  const std::vector<std::int64_t> &deviation) const override {
    // deviator's cost on a used edge, as a function of the opponents'
    // usage set T (readable off the z columns of the undeviated point):
    //   c_e * [no opponent uses e] + sum_{T != 0} w_i c_e / (w_i + w(T))
    //        * (z^T_e + z^(T+{i})_e)
    DeviationExpr dev;
    const int E = static_cast<int>(inst_.edges.size());
    const int me = 1 << player;
    for (int e = 0; e < E; ++e) {
      if (deviation[e] == 0)
        continue;
      Rational cost(inst_.edges[e].cost);
      dev.expr.constant += cost; // from 1 - sum_{S cap opp != 0} z^S_e
      for (int mask = 1; mask <= subset_count_; ++mask) {
        int opp = mask & ~me;
        if (opp == 0)
          continue; // only the deviator itself: full cost already counted
        Rational coeff = -cost; // the [no opponent] indicator loses this subset
        if ((mask & me) == 0) {
          // mask = T: deviator joins T
          coeff += inst_.players[player].weight * cost /
                   (inst_.players[player].weight + weight_of(opp));
        } else {
          // mask = T + {i}: the original profile already had i on board
          coeff += inst_.players[player].weight * cost / weight_of(mask);
        }
        dev.expr.add_term(col_of(model, e, mask), coeff);
      }
    }
    return dev;
  }

private:
  NfgInstance inst_;
  int n_ = 0;
  int subset_count_ = 0;
};

} // namespace

NfgGame build_nfg(const NfgInstance &inst) {
  inst.validate();
  const int n = static_cast<int>(inst.players.size());
  if (n > 4)
    throw InputError("nfg supports up to 4 players (2^n - 1 subset columns per edge)");
  const int E = static_cast<int>(inst.edges.size());

  NfgGame out;
  out.instance = inst;
  GameInstance &game = out.game;
  game.num_players = n;
  game.polynomial_payoffs = false;
  game.players.resize(n);
  for (int i = 0; i < n; ++i) {
    PlayerProgram &p = game.players[i];
    p.num_vars = E;
    p.domains.assign(E, VarDomain::binary());
    p.utility.sense = Sense::minimize;
    // unit outflow at the source, inflow at the sink, conservation elsewhere
    for (int v = 0; v < inst.num_vertices; ++v) {
      Constraint c;
      c.coeffs.assign(E, 0);
      for (int e = 0; e < E; ++e) {
        if (inst.edges[e].from == v)
          c.coeffs[e] += 1;
        if (inst.edges[e].to == v)
          c.coeffs[e] -= 1;
      }
      c.sense = RowSense::eq;
      c.rhs = v == inst.players[i].source ? 1 : v == inst.players[i].sink ? -1 : 0;
      if (inst.players[i].source == inst.players[i].sink)
        c.rhs = 0;
      p.constraints.push_back(std::move(c));
    }
  }
  game.validate();
  out.lift = std::make_shared<SubsetLift>(inst);
  return out;
}

Rational nfg_cost(const NfgInstance &inst, int player, const StrategyProfile &profile) {
  Rational total = 0;
  const int n = static_cast<int>(inst.players.size());
  for (std::size_t e = 0; e < inst.edges.size(); ++e) {
    if (profile.x[player][e] == 0)
      continue;
    Rational wsum = 0;
    for (int k = 0; k < n; ++k)
      if (profile.x[k][e] != 0)
        wsum += inst.players[k].weight;
    total += inst.players[player].weight * Rational(inst.edges[e].cost) / wsum;
  }
  return total;
}

NfgInstance generate_grid(int v_target, std::uint64_t seed,
                          const std::vector<Rational> &weights) {
  if (v_target < 2)
    throw InputError("grid generator needs at least two vertices");
  Rng rng(seed);
  NfgInstance inst;
  const int height = v_target < 10 ? 1 : 5;
  const int layers = std::max(2, v_target / height);
  inst.num_vertices = layers * height;
  auto node = [&](int layer, int row) { return layer * height + row; };
  for (int l = 0; l + 1 < layers; ++l) {
    for (int r = 0; r < height; ++r) {
      inst.edges.push_back({node(l, r), node(l + 1, r), rng.uniform(20, 100)});
      if (r + 1 < height)
        inst.edges.push_back({node(l, r), node(l + 1, r + 1), rng.uniform(20, 100)});
    }
    // extra random edges between adjacent layers widen the path space
    for (int extra = 0; extra < 2 && height > 1; ++extra) {
      int a = static_cast<int>(rng.uniform(0, height - 1));
      int b = static_cast<int>(rng.uniform(0, height - 1));
      inst.edges.push_back({node(l, a), node(l + 1, b), rng.uniform(20, 100)});
    }
  }
  for (const auto &w : weights)
    inst.players.push_back({node(0, 0), node(layers - 1, 0), w});
  inst.validate();
  return inst;
}

NfgInstance nfg_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  try {
    NfgInstance inst;
    inst.num_vertices = j.at("V").get<int>();
    for (const auto &e : j.at("E"))
      inst.edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<std::int64_t>()});
    for (const auto &p : j.at("players"))
      inst.players.push_back({p.at("s").get<int>(), p.at("t").get<int>(),
                              Rational(p.value("w_num", std::int64_t(1)),
                                       p.value("w_den", std::int64_t(1)))});
    inst.validate();
    return inst;
  } catch (const json::exception &e) {
    throw InputError(std::string("bad nfg instance: ") + e.what());
  }
}

std::string nfg_to_json(const NfgInstance &inst) {
  json j;
  j["type"] = "nfg";
  j["V"] = inst.num_vertices;
  j["E"] = json::array();
  for (const auto &e : inst.edges)
    j["E"].push_back({e.from, e.to, e.cost});
  j["players"] = json::array();
  for (const auto &p : inst.players)
    j["players"].push_back(
        {{"s", p.source}, {"t", p.sink}, {"w_num", p.weight.num()}, {"w_den", p.weight.den()}});
  return j.dump(2);
}

} // namespace ipg

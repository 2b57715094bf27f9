// SPDX-License-Identifier: Apache-2.0
#include "ipg/cfld.hpp"

#include "ipg/errors.hpp"

#include <nlohmann/json.hpp>

namespace ipg {

using nlohmann::json;

int CfldInstance::var_index(int l, int r) const {
  int idx = 0;
  for (int ll = 0; ll < l; ++ll)
    idx += designs[ll];
  return idx + r;
}

int CfldInstance::total_vars() const {
  int t = 0;
  for (int d : designs)
    t += d;
  return t;
}

void CfldInstance::validate() const {
  const int n = num_players();
  if (n < 1 || num_locations < 1 || num_customers < 1)
    throw InputError("cfld needs players, locations and customers");
  if (static_cast<int>(designs.size()) != num_locations)
    throw InputError("cfld designs must list one count per location");
  for (int d : designs)
    if (d < 1)
      throw InputError("cfld locations need at least one design");
  if (static_cast<int>(demand.size()) != num_customers)
    throw InputError("cfld demand must have one entry per customer");
  for (const auto &w : demand)
    if (w < Rational(0))
      throw InputError("cfld demands must be nonnegative");
  if (static_cast<int>(outside.size()) != num_customers)
    throw InputError("cfld outside option must have one entry per customer");
  for (const auto &u0 : outside)
    if (!(u0 > Rational(0)))
      throw InputError("cfld outside option u0 must be positive "
                       "(the share denominators must never vanish)");
  if (static_cast<int>(utility.size()) != n || static_cast<int>(fixed_cost.size()) != n)
    throw InputError("cfld u and f must have one block per player");
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(utility[i].size()) != num_locations ||
        static_cast<int>(fixed_cost[i].size()) != num_locations)
      throw InputError("cfld u and f must have one block per location");
    for (int l = 0; l < num_locations; ++l) {
      if (static_cast<int>(utility[i][l].size()) != designs[l] ||
          static_cast<int>(fixed_cost[i][l].size()) != designs[l])
        throw InputError("cfld u and f must match the design counts");
      for (int r = 0; r < designs[l]; ++r) {
        if (static_cast<int>(utility[i][l][r].size()) != num_customers)
          throw InputError("cfld u entries must cover every customer");
        for (const auto &u : utility[i][l][r])
          if (u < Rational(0))
            throw InputError("cfld utilities must be nonnegative");
      }
    }
  }
}

namespace {

class ShareLift final : public CustomLift {
public:
  explicit ShareLift(CfldInstance inst) : inst_(std::move(inst)) {
    n_ = inst_.num_players();
  }

  void extend(LiftedModel &model) const override {
    const int J = inst_.num_customers;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < J; ++j) {
        int s_col = model.add_custom_column(
            "s_" + std::to_string(i) + "_" + std::to_string(j), false, 0.0, 1.0);
        // defining row: u0_j s + sum_k sum_lr u^k_ljr (s * x^k_lr)
        //             = sum_lr u^i_ljr x^i_lr
        RationalRow def;
        def.sense = RowSense::eq;
        def.rhs = 0;
        def.terms.emplace_back(s_col, inst_.outside[j]);
        for (int k = 0; k < n_; ++k) {
          for (int l = 0; l < inst_.num_locations; ++l) {
            for (int r = 0; r < inst_.designs[l]; ++r) {
              const Rational &u = inst_.utility[k][l][r][j];
              if (u.is_zero())
                continue;
              int x_col = model.encoding(k, inst_.var_index(l, r)).first_col;
              int y_col = model.add_custom_column("y_" + std::to_string(i) + "_" +
                                                      std::to_string(j) + "_" +
                                                      std::to_string(x_col),
                                                  false, 0.0, 1.0);
              // y = s * x exactly for binary x
              model.add_custom_row({{{y_col, 1}, {x_col, -1}}, RowSense::le, 0});
              model.add_custom_row({{{y_col, 1}, {s_col, -1}}, RowSense::le, 0});
              model.add_custom_row(
                  {{{y_col, 1}, {s_col, -1}, {x_col, -1}}, RowSense::ge, -1});
              def.terms.emplace_back(y_col, u);
              if (k == i)
                def.terms.emplace_back(x_col, -u);
            }
          }
        }
        model.add_custom_row(def);
        model.add_utility_term(i, s_col, inst_.demand[j]);
      }
    }
  }

  std::vector<Rational> induced_values(const GameInstance &game,
                                       const StrategyProfile &profile) const override {
    (void)game;
    std::vector<Rational> vals;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < inst_.num_customers; ++j) {
        Rational num = attraction(i, j, profile.x[i]);
        Rational den = inst_.outside[j];
        for (int k = 0; k < n_; ++k)
          den += attraction(k, j, profile.x[k]);
        Rational s = num / den;
        vals.push_back(s);
        for (int k = 0; k < n_; ++k)
          for (int l = 0; l < inst_.num_locations; ++l)
            for (int r = 0; r < inst_.designs[l]; ++r) {
              if (inst_.utility[k][l][r][j].is_zero())
                continue;
              vals.push_back(s * Rational(profile.x[k][inst_.var_index(l, r)]));
            }
      }
    }
    return vals;
  }

  DeviationExpr deviation_utility(const LiftedModel &model, int player,
                                  const std::vector<std::int64_t> &deviation) const override {
    // deviator's share of customer j solves
    //   t_j (u0_j + A_j + D_j(x^{-i})) = A_j ,  A_j constant
    // so each cut carries fresh t_j and product columns with their
    // defining rows.
    DeviationExpr dev;
    const int base = kAttachmentBase;
    int next = 0;
    struct ProductRef {
      int x_col;
      Rational u;
    };
    for (int j = 0; j < inst_.num_customers; ++j) {
      Rational a = attraction(player, j, deviation);
      if (a.is_zero())
        continue; // the deviation attracts nothing here: share is 0
      int t_col = base + next++;
      dev.new_columns.push_back({0.0, 1.0, false});
      RationalRow def;
      def.sense = RowSense::eq;
      def.rhs = a;
      def.terms.emplace_back(t_col, inst_.outside[j] + a);
      for (int k = 0; k < n_; ++k) {
        if (k == player)
          continue;
        for (int l = 0; l < inst_.num_locations; ++l)
          for (int r = 0; r < inst_.designs[l]; ++r) {
            const Rational &u = inst_.utility[k][l][r][j];
            if (u.is_zero())
              continue;
            int x_col = model.encoding(k, inst_.var_index(l, r)).first_col;
            int q_col = base + next++;
            dev.new_columns.push_back({0.0, 1.0, false});
            dev.new_rows.push_back({{{q_col, 1}, {x_col, -1}}, RowSense::le, 0});
            dev.new_rows.push_back({{{q_col, 1}, {t_col, -1}}, RowSense::le, 0});
            dev.new_rows.push_back(
                {{{q_col, 1}, {t_col, -1}, {x_col, -1}}, RowSense::ge, -1});
            def.terms.emplace_back(q_col, u);
          }
      }
      dev.new_rows.push_back(std::move(def));
      dev.expr.add_term(t_col, inst_.demand[j]);
    }
    CfldInstance inst = inst_;
    int n = n_;
    std::vector<std::int64_t> dev_copy = deviation;
    dev.attachment_values = [inst, n, player, dev_copy](const StrategyProfile &profile) {
      ShareLift helper(inst);
      std::vector<Rational> vals;
      for (int j = 0; j < inst.num_customers; ++j) {
        Rational a = helper.attraction(player, j, dev_copy);
        if (a.is_zero())
          continue;
        Rational den = inst.outside[j] + a;
        for (int k = 0; k < n; ++k)
          if (k != player)
            den += helper.attraction(k, j, profile.x[k]);
        Rational t = a / den;
        vals.push_back(t);
        for (int k = 0; k < n; ++k) {
          if (k == player)
            continue;
          for (int l = 0; l < inst.num_locations; ++l)
            for (int r = 0; r < inst.designs[l]; ++r) {
              if (inst.utility[k][l][r][j].is_zero())
                continue;
              vals.push_back(t * Rational(profile.x[k][inst.var_index(l, r)]));
            }
        }
      }
      return vals;
    };
    return dev;
  }

  Rational attraction(int player, int customer, const std::vector<std::int64_t> &x) const {
    Rational a = 0;
    for (int l = 0; l < inst_.num_locations; ++l)
      for (int r = 0; r < inst_.designs[l]; ++r)
        if (x[inst_.var_index(l, r)] != 0)
          a += inst_.utility[player][l][r][customer];
    return a;
  }

private:
  CfldInstance inst_;
  int n_ = 0;
};

} // namespace

CfldGame build_cfld(const CfldInstance &inst) {
  inst.validate();
  const int n = inst.num_players();
  CfldGame out;
  out.instance = inst;
  GameInstance &game = out.game;
  game.num_players = n;
  game.polynomial_payoffs = false;
  game.players.resize(n);
  const int vars = inst.total_vars();
  for (int i = 0; i < n; ++i) {
    PlayerProgram &p = game.players[i];
    p.num_vars = vars;
    p.domains.assign(vars, VarDomain::binary());
    p.utility.sense = Sense::maximize;
    Constraint budget;
    budget.coeffs.assign(vars, 0);
    for (int l = 0; l < inst.num_locations; ++l)
      for (int r = 0; r < inst.designs[l]; ++r)
        budget.coeffs[inst.var_index(l, r)] = inst.fixed_cost[i][l][r];
    budget.sense = RowSense::le;
    budget.rhs = inst.budget[i];
    p.constraints.push_back(std::move(budget));
    for (int l = 0; l < inst.num_locations; ++l) {
      Constraint one;
      one.coeffs.assign(vars, 0);
      for (int r = 0; r < inst.designs[l]; ++r)
        one.coeffs[inst.var_index(l, r)] = 1;
      one.sense = RowSense::le;
      one.rhs = 1;
      p.constraints.push_back(std::move(one));
    }
  }
  game.validate();
  out.lift = std::make_shared<ShareLift>(inst);
  return out;
}

Rational cfld_payoff(const CfldInstance &inst, int player, const StrategyProfile &profile) {
  Rational total = 0;
  const int n = inst.num_players();
  for (int j = 0; j < inst.num_customers; ++j) {
    Rational num = 0, den = inst.outside[j];
    for (int k = 0; k < n; ++k) {
      Rational a = 0;
      for (int l = 0; l < inst.num_locations; ++l)
        for (int r = 0; r < inst.designs[l]; ++r)
          if (profile.x[k][inst.var_index(l, r)] != 0)
            a += inst.utility[k][l][r][j];
      den += a;
      if (k == player)
        num = a;
    }
    total += inst.demand[j] * num / den;
  }
  return total;
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

} // namespace

CfldInstance cfld_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  try {
    CfldInstance inst;
    inst.num_locations = j.at("L").get<int>();
    inst.num_customers = j.at("J").get<int>();
    inst.designs = j.at("R").get<std::vector<int>>();
    for (const auto &v : j.at("w"))
      inst.demand.push_back(rational_from_json(v));
    for (const auto &pi : j.at("u")) {
      inst.utility.emplace_back();
      for (const auto &pl : pi) {
        inst.utility.back().emplace_back();
        for (const auto &pr : pl) {
          inst.utility.back().back().emplace_back();
          for (const auto &v : pr)
            inst.utility.back().back().back().push_back(rational_from_json(v));
        }
      }
    }
    inst.fixed_cost = j.at("f").get<std::vector<std::vector<std::vector<std::int64_t>>>>();
    inst.budget = j.at("B").get<std::vector<std::int64_t>>();
    for (const auto &v : j.at("u0"))
      inst.outside.push_back(rational_from_json(v));
    inst.validate();
    return inst;
  } catch (const json::exception &e) {
    throw InputError(std::string("bad cfld instance: ") + e.what());
  }
}

std::string cfld_to_json(const CfldInstance &inst) {
  json j;
  j["type"] = "cfld";
  j["L"] = inst.num_locations;
  j["J"] = inst.num_customers;
  j["R"] = inst.designs;
  j["w"] = json::array();
  for (const auto &v : inst.demand)
    j["w"].push_back(rational_to_json(v));
  j["u"] = json::array();
  for (const auto &pi : inst.utility) {
    json a = json::array();
    for (const auto &pl : pi) {
      json b = json::array();
      for (const auto &pr : pl) {
        json c = json::array();
        for (const auto &v : pr)
          c.push_back(rational_to_json(v));
        b.push_back(std::move(c));
      }
      a.push_back(std::move(b));
    }
    j["u"].push_back(std::move(a));
  }
  j["f"] = inst.fixed_cost;
  j["B"] = inst.budget;
  j["u0"] = json::array();
  for (const auto &v : inst.outside)
    j["u0"].push_back(rational_to_json(v));
  return j.dump(2);
}

} // namespace ipg

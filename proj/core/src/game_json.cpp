// SPDX-License-Identifier: Apache-2.0
#include "ipg/errors.hpp"
#include "ipg/game.hpp"

#include <nlohmann/json.hpp>

namespace ipg {

using nlohmann::json;

namespace {

RowSense sense_from_str(const std::string &s) {
  if (s == "<=")
    return RowSense::le;
  if (s == "=" || s == "==")
    return RowSense::eq;
  if (s == ">=")
    return RowSense::ge;
  throw InputError("unknown constraint sense '" + s + "'");
}

std::string sense_to_str(RowSense s) {
  switch (s) {
  case RowSense::le:
    return "<=";
  case RowSense::eq:
    return "=";
  default:
    return ">=";
  }
}

std::vector<LinearTerm> linear_from_json(const json &arr) {
  std::vector<LinearTerm> out;
  for (const auto &t : arr) {
    if (!t.is_array() || t.size() != 4)
      throw InputError("linear term must be [player,var,num,den]");
    out.push_back({{t[0].get<int>(), t[1].get<int>()},
                   Rational(t[2].get<std::int64_t>(), t[3].get<std::int64_t>())});
  }
  return out;
}

std::vector<Monomial2> quadratic_from_json(const json &arr) {
  std::vector<Monomial2> out;
  for (const auto &t : arr) {
    if (!t.is_array() || t.size() != 6)
      throw InputError("quadratic term must be [p,j,q,k,num,den]");
    Monomial2 m{{t[0].get<int>(), t[1].get<int>()},
                {t[2].get<int>(), t[3].get<int>()},
                Rational(t[4].get<std::int64_t>(), t[5].get<std::int64_t>())};
    m.canonicalize();
    out.push_back(m);
  }
  return out;
}

json linear_to_json(const std::vector<LinearTerm> &terms) {
  json arr = json::array();
  for (const auto &t : terms)
    arr.push_back({t.var.player, t.var.var, t.coeff.num(), t.coeff.den()});
  return arr;
}

json quadratic_to_json(const std::vector<Monomial2> &terms) {
  json arr = json::array();
  for (const auto &t : terms)
    arr.push_back({t.a.player, t.a.var, t.b.player, t.b.var, t.coeff.num(), t.coeff.den()});
  return arr;
}

} // namespace

GameInstance game_from_json_obj(const json &j);

GameInstance game_from_json_obj(const json &j) {
  GameInstance game;
  game.num_players = j.at("n").get<int>();
  for (const auto &pj : j.at("players")) {
    PlayerProgram p;
    p.num_vars = pj.at("m").get<int>();
    for (const auto &dj : pj.at("domains")) {
      VarDomain d;
      d.lower = dj.at("lb").get<std::int64_t>();
      d.upper = dj.at("ub").get<std::int64_t>();
      d.kind = dj.at("kind").get<std::string>() == "binary" ? VarDomain::Kind::binary
                                                            : VarDomain::Kind::integer;
      p.domains.push_back(d);
    }
    for (const auto &cj : pj.value("constraints", json::array())) {
      Constraint c;
      c.coeffs = cj.at("coeffs").get<std::vector<std::int64_t>>();
      c.sense = sense_from_str(cj.at("sense").get<std::string>());
      c.rhs = cj.at("rhs").get<std::int64_t>();
      p.constraints.push_back(std::move(c));
    }
    const auto &uj = pj.at("utility");
    p.utility.sense =
        uj.at("sense").get<std::string>() == "min" ? Sense::minimize : Sense::maximize;
    p.utility.linear = linear_from_json(uj.value("linear", json::array()));
    p.utility.quadratic = quadratic_from_json(uj.value("quadratic", json::array()));
    game.players.push_back(std::move(p));
  }
  const auto &wj = j.at("welfare");
  if (wj.is_string()) {
    if (wj.get<std::string>() != "sum")
      throw InputError("welfare must be \"sum\" or an object");
  } else {
    game.welfare.sum_of_utilities = false;
    game.welfare.linear = linear_from_json(wj.value("linear", json::array()));
    game.welfare.quadratic = quadratic_from_json(wj.value("quadratic", json::array()));
  }
  game.validate();
  return game;
}

GameInstance game_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  try {
    return game_from_json_obj(j);
  } catch (const json::exception &e) {
    throw InputError(std::string("bad game instance: ") + e.what());
  }
}

std::string game_to_json(const GameInstance &game) {
  json j;
  j["type"] = "game";
  j["n"] = game.num_players;
  j["players"] = json::array();
  for (const auto &p : game.players) {
    json pj;
    pj["m"] = p.num_vars;
    pj["domains"] = json::array();
    for (const auto &d : p.domains)
      pj["domains"].push_back(
          {{"lb", d.lower},
           {"ub", d.upper},
           {"kind", d.kind == VarDomain::Kind::binary ? "binary" : "integer"}});
    pj["constraints"] = json::array();
    for (const auto &c : p.constraints)
      pj["constraints"].push_back(
          {{"coeffs", c.coeffs}, {"sense", sense_to_str(c.sense)}, {"rhs", c.rhs}});
    pj["utility"] = {{"sense", p.utility.sense == Sense::minimize ? "min" : "max"},
                     {"linear", linear_to_json(p.utility.linear)},
                     {"quadratic", quadratic_to_json(p.utility.quadratic)}};
    j["players"].push_back(std::move(pj));
  }
  if (game.welfare.sum_of_utilities)
    j["welfare"] = "sum";
  else
    j["welfare"] = {{"linear", linear_to_json(game.welfare.linear)},
                    {"quadratic", quadratic_to_json(game.welfare.quadratic)}};
  return j.dump(2);
}

} // namespace ipg

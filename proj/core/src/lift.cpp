// SPDX-License-Identifier: Apache-2.0
#include "ipg/lift.hpp"

#include "ipg/errors.hpp"

#include <algorithm>
#include <ostream>

namespace ipg {

void LiftedExpr::add_term(int col, const Rational &c) {
  if (c.is_zero())
    return;
  for (auto &[existing, coeff] : terms) {
    if (existing == col) {
      coeff += c;
      return;
    }
  }
  terms.emplace_back(col, c);
}

Rational LiftedExpr::eval(const std::vector<Rational> &values) const {
  Rational v = constant;
  for (const auto &[col, coeff] : terms)
    v += coeff * values[col];
  return v;
}

SolverRow clear_row(const RationalRow &row) {
  std::int64_t lcm = row.rhs.den();
  for (const auto &[col, c] : row.terms)
    lcm = checked_lcm(lcm, c.den());
  SolverRow out;
  out.sense = row.sense;
  auto scaled = [&](const Rational &c) {
    __int128 v = (__int128)c.num() * (lcm / c.den());
    if (v > INT64_MAX || v < INT64_MIN)
      throw NumericalError("row coefficient overflow after clearing");
    return static_cast<std::int64_t>(v);
  };
  for (const auto &[col, c] : row.terms)
    if (!c.is_zero())
      out.coeffs.emplace_back(col, scaled(c));
  out.rhs = scaled(row.rhs);
  return out;
}

BitExpansion binary_expand(const VarDomain &domain) {
  domain.validate();
  BitExpansion e;
  e.offset = domain.lower;
  std::uint64_t range = static_cast<std::uint64_t>(domain.upper - domain.lower);
  if (range == 0)
    return e;
  int bits = 0;
  while ((1ULL << bits) <= range)
    ++bits;
  e.bits = bits;
  std::uint64_t full = (1ULL << bits) - 1;
  if (full != range) {
    e.needs_cap = true;
    e.cap = static_cast<std::int64_t>(range);
  }
  return e;
}

const VarEncoding &LiftedModel::encoding(int player, int var) const {
  return encodings_[player][var];
}

int LiftedModel::product_column(int bit_a, int bit_b) {
  auto key = std::minmax(bit_a, bit_b);
  auto it = product_cols_.find(key);
  if (it != product_cols_.end())
    return it->second;
  LiftedColumn zc;
  zc.kind = LiftedColumn::Kind::product;
  zc.bit_a = key.first;
  zc.bit_b = key.second;
  int col = num_cols();
  columns_.push_back(zc);
  product_cols_[key] = col;
  ++num_product_cols_;
  // z <= a, z <= b, z >= a + b - 1
  rows_.push_back({{{col, 1}, {key.first, -1}}, RowSense::le, 0});
  rows_.push_back({{{col, 1}, {key.second, -1}}, RowSense::le, 0});
  rows_.push_back({{{col, 1}, {key.first, -1}, {key.second, -1}}, RowSense::ge, -1});
  return col;
}

void LiftedModel::lift_polynomial(const std::vector<LinearTerm> &linear,
                                  const std::vector<Monomial2> &quadratic, LiftedExpr &out) {
  auto add_linear = [&](const VarRef &v, const Rational &coeff) {
    const VarEncoding &e = encodings_[v.player][v.var];
    out.constant += coeff * Rational(e.offset);
    for (int k = 0; k < e.bit_count; ++k)
      out.add_term(e.first_col + k, coeff * Rational(std::int64_t(1) << k));
  };
  for (const auto &t : linear)
    add_linear(t.var, t.coeff);
  for (const auto &q : quadratic) {
    const VarEncoding &ea = encodings_[q.a.player][q.a.var];
    const VarEncoding &eb = encodings_[q.b.player][q.b.var];
    // (off_a + sum 2^k a_k)(off_b + sum 2^l b_l)
    out.constant += q.coeff * Rational(ea.offset) * Rational(eb.offset);
    if (eb.offset != 0)
      for (int k = 0; k < ea.bit_count; ++k)
        out.add_term(ea.first_col + k,
                     q.coeff * Rational(eb.offset) * Rational(std::int64_t(1) << k));
    if (ea.offset != 0)
      for (int l = 0; l < eb.bit_count; ++l)
        out.add_term(eb.first_col + l,
                     q.coeff * Rational(ea.offset) * Rational(std::int64_t(1) << l));
    for (int k = 0; k < ea.bit_count; ++k) {
      for (int l = 0; l < eb.bit_count; ++l) {
        int ca = ea.first_col + k, cb = eb.first_col + l;
        Rational w = q.coeff * Rational(std::int64_t(1) << k) * Rational(std::int64_t(1) << l);
        if (ca == cb)
          out.add_term(ca, w); // b^2 = b for a binary bit
        else
          out.add_term(product_column(ca, cb), w);
      }
    }
  }
}

LiftedModel build_lifted_model(const GameInstance &game,
                               std::shared_ptr<const CustomLift> custom) {
  game.validate();
  LiftedModel m;
  m.game_ = std::make_shared<GameInstance>(game);
  m.custom_ = std::move(custom);
  m.encodings_.resize(game.num_players);
  m.player_bits_.resize(game.num_players);
  m.utilities_.resize(game.num_players);

  // expansion bits, per player and variable
  for (int i = 0; i < game.num_players; ++i) {
    const auto &p = game.players[i];
    m.encodings_[i].resize(p.num_vars);
    for (int v = 0; v < p.num_vars; ++v) {
      BitExpansion e = binary_expand(p.domains[v]);
      VarEncoding enc;
      enc.offset = e.offset;
      enc.first_col = m.num_cols();
      enc.bit_count = e.bits;
      for (int k = 0; k < e.bits; ++k) {
        LiftedColumn c;
        c.kind = LiftedColumn::Kind::bit;
        c.player = i;
        c.var = v;
        c.bit = k;
        m.columns_.push_back(c);
        m.player_bits_[i].push_back(enc.first_col + k);
      }
      if (e.needs_cap) {
        SolverRow cap;
        for (int k = 0; k < e.bits; ++k)
          cap.coeffs.emplace_back(enc.first_col + k, std::int64_t(1) << k);
        cap.sense = RowSense::le;
        cap.rhs = e.cap;
        m.rows_.push_back(std::move(cap));
      }
      m.encodings_[i][v] = enc;
    }
  }

  // player constraints re-expressed over bits
  for (int i = 0; i < game.num_players; ++i) {
    const auto &p = game.players[i];
    for (const auto &cons : p.constraints) {
      SolverRow row;
      __int128 rhs = cons.rhs;
      for (int v = 0; v < p.num_vars; ++v) {
        std::int64_t a = cons.coeffs[v];
        if (a == 0)
          continue;
        const VarEncoding &e = m.encodings_[i][v];
        rhs -= (__int128)a * e.offset;
        for (int k = 0; k < e.bit_count; ++k) {
          __int128 w = (__int128)a * (std::int64_t(1) << k);
          if (w > INT64_MAX || w < INT64_MIN)
            throw NumericalError("constraint coefficient overflow in expansion");
          row.coeffs.emplace_back(e.first_col + k, static_cast<std::int64_t>(w));
        }
      }
      if (rhs > INT64_MAX || rhs < INT64_MIN)
        throw NumericalError("constraint rhs overflow in expansion");
      row.rhs = static_cast<std::int64_t>(rhs);
      row.sense = cons.sense;
      m.rows_.push_back(std::move(row));
    }
  }

  // automatic monomial lifting of utilities and welfare
  for (int i = 0; i < game.num_players; ++i)
    m.lift_polynomial(game.players[i].utility.linear, game.players[i].utility.quadratic,
                      m.utilities_[i]);

  m.custom_col_start_ = m.num_cols();
  if (m.custom_)
    m.custom_->extend(m);

  if (game.welfare.sum_of_utilities) {
    for (int i = 0; i < game.num_players; ++i) {
      m.welfare_.constant += m.utilities_[i].constant;
      for (const auto &[col, c] : m.utilities_[i].terms)
        m.welfare_.add_term(col, c);
    }
  } else {
    m.lift_polynomial(game.welfare.linear, game.welfare.quadratic, m.welfare_);
  }
  return m;
}

int LiftedModel::add_custom_column(const std::string &label, bool integral, double lb,
                                   double ub) {
  LiftedColumn c;
  c.kind = LiftedColumn::Kind::custom;
  c.label = label;
  c.integral = integral;
  c.lb = lb;
  c.ub = ub;
  columns_.push_back(c);
  return num_cols() - 1;
}

void LiftedModel::add_custom_row(const RationalRow &row) { rows_.push_back(clear_row(row)); }

void LiftedModel::add_utility_term(int player, int col, const Rational &coeff) {
  utilities_[player].add_term(col, coeff);
}

void LiftedModel::add_utility_constant(int player, const Rational &c) {
  utilities_[player].constant += c;
}

std::vector<std::int64_t> LiftedModel::induced_ints(const StrategyProfile &profile) const {
  // integer part only: bits and products (custom columns may be
  // continuous and are left at zero here)
  check_profile(*game_, profile);
  std::vector<std::int64_t> vals(num_cols(), 0);
  for (int i = 0; i < game_->num_players; ++i) {
    for (int v = 0; v < game_->players[i].num_vars; ++v) {
      const VarEncoding &e = encodings_[i][v];
      std::int64_t x = profile.x[i][v];
      const VarDomain &d = game_->players[i].domains[v];
      if (x < d.lower || x > d.upper)
        throw InputError("profile value outside the variable domain");
      std::uint64_t rel = static_cast<std::uint64_t>(x - e.offset);
      for (int k = 0; k < e.bit_count; ++k)
        vals[e.first_col + k] = (rel >> k) & 1;
    }
  }
  for (const auto &[pair, col] : product_cols_)
    vals[col] = vals[pair.first] * vals[pair.second];
  return vals;
}

std::vector<Rational> LiftedModel::induced_point(const StrategyProfile &profile) const {
  std::vector<std::int64_t> ints = induced_ints(profile);
  std::vector<Rational> vals(num_cols());
  for (int c = 0; c < num_cols(); ++c)
    vals[c] = Rational(ints[c]);
  if (custom_) {
    std::vector<Rational> cv = custom_->induced_values(*game_, profile);
    if (static_cast<int>(cv.size()) != num_cols() - custom_col_start_)
      throw NumericalError("custom lift returned the wrong number of induced values");
    for (int k = 0; k < static_cast<int>(cv.size()); ++k)
      vals[custom_col_start_ + k] = cv[k];
  }
  return vals;
}

StrategyProfile LiftedModel::decode(const std::vector<std::int64_t> &ints) const {
  StrategyProfile p;
  p.x.resize(game_->num_players);
  for (int i = 0; i < game_->num_players; ++i) {
    p.x[i].resize(game_->players[i].num_vars);
    for (int v = 0; v < game_->players[i].num_vars; ++v) {
      const VarEncoding &e = encodings_[i][v];
      std::int64_t x = e.offset;
      for (int k = 0; k < e.bit_count; ++k)
        x += (ints[e.first_col + k] & 1) << k;
      p.x[i][v] = x;
    }
  }
  return p;
}

Rational LiftedModel::exact_payoff(int player, const StrategyProfile &profile) const {
  if (game_->polynomial_payoffs)
    return payoff(*game_, player, profile);
  return utilities_[player].eval(induced_point(profile));
}

Rational LiftedModel::exact_welfare(const StrategyProfile &profile) const {
  if (game_->polynomial_payoffs)
    return welfare(*game_, profile);
  if (game_->welfare.sum_of_utilities) {
    std::vector<Rational> point = induced_point(profile);
    Rational s = 0;
    for (int i = 0; i < game_->num_players; ++i)
      s += utilities_[i].eval(point);
    return s;
  }
  return welfare_.eval(induced_point(profile));
}

SolverModel LiftedModel::instantiate() const {
  SolverModel model;
  for (const auto &c : columns_)
    model.add_column(c.lb, c.ub, c.integral);
  for (const auto &r : rows_)
    model.add_row(r);
  return model;
}

bool row_holds(const SolverRow &row, const std::vector<Rational> &point) {
  Rational lhs = 0;
  for (auto [col, a] : row.coeffs)
    lhs += Rational(a) * point[col];
  switch (row.sense) {
  case RowSense::le:
    return lhs <= Rational(row.rhs);
  case RowSense::eq:
    return lhs == Rational(row.rhs);
  default:
    return lhs >= Rational(row.rhs);
  }
}

void LiftedModel::write_lp(std::ostream &os) const {
  auto col_name = [&](int c) {
    const LiftedColumn &lc = columns_[c];
    switch (lc.kind) {
    case LiftedColumn::Kind::bit:
      return "x_" + std::to_string(lc.player) + "_" + std::to_string(lc.var) + "_" +
             std::to_string(lc.bit);
    case LiftedColumn::Kind::product:
      return "z_" + std::to_string(c);
    default:
      return lc.label.empty() ? "c_" + std::to_string(c) : lc.label;
    }
  };
  auto write_expr = [&](const LiftedExpr &e) {
    bool first = true;
    for (const auto &[col, coeff] : e.terms) {
      os << (first ? "" : " + ") << coeff.str() << " " << col_name(col);
      first = false;
    }
    if (!e.constant.is_zero())
      os << (first ? "" : " + ") << e.constant.str();
  };
  os << "\\ lifted model: " << num_cols() << " cols, " << rows_.size() << " rows\n";
  os << "Maximize\n obj: ";
  write_expr(welfare_);
  os << "\nSubject To\n";
  int rn = 0;
  for (const auto &r : rows_) {
    os << " r" << rn++ << ": ";
    bool first = true;
    for (auto [col, a] : r.coeffs) {
      os << (first ? "" : " + ") << a << " " << col_name(col);
      first = false;
    }
    os << (r.sense == RowSense::le ? " <= " : r.sense == RowSense::eq ? " = " : " >= ")
       << r.rhs << "\n";
  }
  os << "Bounds\n";
  for (int c = 0; c < num_cols(); ++c)
    os << " " << columns_[c].lb << " <= " << col_name(c) << " <= " << columns_[c].ub << "\n";
  os << "Generals\n";
  for (int c = 0; c < num_cols(); ++c)
    if (columns_[c].integral)
      os << " " << col_name(c) << "\n";
  os << "End\n";
}

} // namespace ipg

// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp"
#include "ipg/rational.hpp"
#include "ipg/solver.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace ipg {

/// Rational linear expression over lifted columns.
struct LiftedExpr {
  Rational constant;
  std::vector<std::pair<int, Rational>> terms; // column -> coefficient, deduped

  void add_term(int col, const Rational &c);
  Rational eval(const std::vector<Rational> &values) const;
};

/// Linear row with rational data, cleared to integers when it reaches
/// the solver.
struct RationalRow {
  std::vector<std::pair<int, Rational>> terms;
  RowSense sense = RowSense::le;
  Rational rhs;
};

SolverRow clear_row(const RationalRow &row);

struct LiftedColumn {
  enum class Kind { bit, product, custom };
  Kind kind = Kind::bit;
  int player = -1, var = -1, bit = -1; // bit columns
  int bit_a = -1, bit_b = -1;          // product columns: the two bit columns
  double lb = 0.0, ub = 1.0;
  bool integral = true;
  std::string label; // custom columns
};

/// How one bounded integer variable maps onto expansion bits.
struct VarEncoding {
  std::int64_t offset = 0; // lower bound
  int first_col = -1;
  int bit_count = 0;
};

struct BitExpansion {
  int bits = 0;
  std::int64_t offset = 0;
  bool needs_cap = false;
  std::int64_t cap = 0; // sum of bit weights <= cap, when needed
};

/// bits = ceil(log2(upper-lower+1)); a cap row is emitted when the
/// range is not a power of two so the encoding stays a bijection.
BitExpansion binary_expand(const VarDomain &domain);

class LiftedModel;

/// Placeholder index space for columns a cut brings along; consumers
/// remap kAttachmentBase + k onto their own models.
inline constexpr int kAttachmentBase = 1 << 30;

/// Equilibrium-cut left side for a fixed deviation, possibly with
/// fresh columns and defining rows (fractional objectives need them).
struct DeviationExpr {
  LiftedExpr expr;
  struct NewColumn {
    double lb = 0.0, ub = 1.0;
    bool integral = false;
  };
  std::vector<NewColumn> new_columns;
  std::vector<RationalRow> new_rows;
  /// Exact values of new_columns at an integer profile (for validity
  /// checks); empty function when there are no new columns.
  std::function<std::vector<Rational>(const StrategyProfile &)> attachment_values;
};

/// Model-provided lift: extra columns with semantic labels, extra
/// linking rows, and per-player utility expressions that replace
/// automatic monomial lifting for the terms they cover.
class CustomLift {
public:
  virtual ~CustomLift() = default;

  /// Append columns/rows and utility contributions. Runs once, after
  /// all bit columns exist.
  virtual void extend(LiftedModel &model) const = 0;

  /// Exact values of the custom columns at an integer profile, in
  /// append order.
  virtual std::vector<Rational> induced_values(const GameInstance &game,
                                               const StrategyProfile &profile) const = 0;

  /// u^i(deviation, x^{-i}) as a linear expression over lifted columns.
  virtual DeviationExpr deviation_utility(const LiftedModel &model, int player,
                                          const std::vector<std::int64_t> &deviation) const = 0;
};

/// The lifted set K: expansion bits, one auxiliary column per binary
/// product, the linking rows that tie them together, and linearized
/// utilities/welfare. Immutable after build; safe to share across
/// threads.
class LiftedModel {
public:
  int num_cols() const { return static_cast<int>(columns_.size()); }
  const std::vector<LiftedColumn> &columns() const { return columns_; }
  const std::vector<SolverRow> &rows() const { return rows_; }
  const VarEncoding &encoding(int player, int var) const;
  const LiftedExpr &utility(int player) const { return utilities_[player]; }
  const std::vector<LiftedExpr> &utilities() const { return utilities_; }
  const LiftedExpr &welfare_expr() const { return welfare_; }
  const GameInstance &game() const { return *game_; }
  const CustomLift *custom() const { return custom_.get(); }
  int custom_col_start() const { return custom_col_start_; }
  int num_product_cols() const { return num_product_cols_; }

  /// All bit columns of one player, in (var, bit) order.
  const std::vector<int> &player_bits(int player) const { return player_bits_[player]; }

  /// Full exact column assignment induced by a profile: bits from the
  /// expansion, products as exact products, custom columns through the
  /// custom lift.
  std::vector<Rational> induced_point(const StrategyProfile &profile) const;

  /// Integer column assignment for games without continuous custom
  /// columns (and the integer part otherwise).
  std::vector<std::int64_t> induced_ints(const StrategyProfile &profile) const;

  /// Profile encoded by the bit columns of an integer assignment.
  StrategyProfile decode(const std::vector<std::int64_t> &ints) const;

  /// Exact utility of player i at a profile. Polynomial games evaluate
  /// the game directly; custom-lift games go through the lifted
  /// expression.
  Rational exact_payoff(int player, const StrategyProfile &profile) const;
  Rational exact_welfare(const StrategyProfile &profile) const;

  /// Fresh solver model holding exactly the columns and rows of K.
  SolverModel instantiate() const;

  /// LP-text debug dump (objective, rows, bounds, integrality) for
  /// external cross-checks.
  void write_lp(std::ostream &os) const;

  // build-time interface (used by build_lifted_model and CustomLift)
  int add_custom_column(const std::string &label, bool integral, double lb, double ub);
  void add_custom_row(const RationalRow &row);
  void add_utility_term(int player, int col, const Rational &coeff);
  void add_utility_constant(int player, const Rational &c);

private:
  friend LiftedModel build_lifted_model(const GameInstance &game,
                                        std::shared_ptr<const CustomLift> custom);

  void lift_polynomial(const std::vector<LinearTerm> &linear,
                       const std::vector<Monomial2> &quadratic, LiftedExpr &out);
  int product_column(int bit_a, int bit_b);

  std::shared_ptr<const GameInstance> game_;
  std::shared_ptr<const CustomLift> custom_;
  std::vector<LiftedColumn> columns_;
  std::vector<SolverRow> rows_;
  std::vector<std::vector<VarEncoding>> encodings_;
  std::vector<std::vector<int>> player_bits_;
  std::vector<LiftedExpr> utilities_;
  LiftedExpr welfare_;
  std::map<std::pair<int, int>, int> product_cols_;
  int custom_col_start_ = 0;
  int num_product_cols_ = 0;
};

/// Build the lifted set K for a game. Monomials over bounded integer
/// variables get binary expansion + one product column per bit pair
/// (z <= a, z <= b, z >= a+b-1); squares of binaries collapse onto the
/// binary itself. A custom lift, when given, appends its own columns,
/// rows and utility expressions.
LiftedModel build_lifted_model(const GameInstance &game,
                               std::shared_ptr<const CustomLift> custom = nullptr);

/// Exact evaluation of an integer row at a rational point.
bool row_holds(const SolverRow &row, const std::vector<Rational> &point);

} // namespace ipg

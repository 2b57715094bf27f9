// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "ipg/game.hpp" // RowSense
#include "ipg/rational.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ipg {

/// One linear row with exact integer coefficients. Callers clear
/// rational denominators before building rows.
struct SolverRow {
  std::vector<std::pair<int, std::int64_t>> coeffs; // (column, coefficient)
  RowSense sense = RowSense::le;
  std::int64_t rhs = 0;
};

struct SolveOutcome {
  enum class Status { optimal, infeasible, time_limit_with_incumbent, time_limit_no_incumbent };
  Status status = Status::infeasible;

  std::vector<double> values;            // full column assignment
  std::vector<std::int64_t> int_values;  // rounded values, valid for integral columns

  /// Exact objective value, defined when every objective coefficient
  /// sits on an integral column.
  Rational objective_exact;
  bool objective_is_exact = false;
  double objective_value = 0.0;
  double best_bound = 0.0;

  std::int64_t nodes = 0;
  std::int64_t lp_pivots = 0;

  bool has_incumbent() const {
    return status == Status::optimal || status == Status::time_limit_with_incumbent;
  }
};

/// Mixed-integer model with monotone row accumulation: rows are never
/// removed, so objective values can only degrade across re-solves.
/// A model is confined to one thread at a time; distinct models may
/// solve concurrently.
///
/// The engine is selected with the IPG_MILP_ENGINE environment variable
/// (built-in "bnb": bounded-variable dual simplex + branch and bound).
/// Every incumbent is rounded to exact integers and re-verified against
/// all integer-supported rows in exact arithmetic before it is returned.
/// Set IPG_MILP_LOG=1 for per-solve key=value log lines on stderr.
class SolverModel {
public:
  SolverModel();
  ~SolverModel();
  SolverModel(SolverModel &&) noexcept;
  SolverModel &operator=(SolverModel &&) noexcept;

  int add_column(double lb, double ub, bool integral);
  void set_bounds(int col, double lb, double ub);
  double lower_bound(int col) const;
  double upper_bound(int col) const;
  int num_cols() const;
  int num_rows() const;

  void add_row(SolverRow row);
  void add_rows(std::vector<SolverRow> rows);

  void set_objective(Sense sense, std::vector<Rational> coeffs);

  /// Deterministic tie handling: for integral objectives, a second
  /// search over the optimal face picks, among equal-objective optima,
  /// one maximizing the sum over pref_cols.
  void set_tie_preference(std::vector<int> pref_cols);

  /// time_limit_seconds <= 0 means no limit.
  SolveOutcome solve(double time_limit_seconds);

  /// Evaluate an accumulated row at an exact integer point (columns
  /// missing from the point count as zero).
  static bool row_satisfied(const SolverRow &row, const std::vector<std::int64_t> &point);

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace ipg

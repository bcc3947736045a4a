#pragma once

// Exact rational linear programming: dense-tableau two-phase primal simplex.

#include "ordertope/exact.hpp"

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ordertope::lp {

enum class Sense { maximize, minimize };
enum class Relation { less_equal, greater_equal, equal };
enum class Status { optimal, infeasible, unbounded };

const char* to_string(Status status);

struct Term {
  std::size_t var;
  Rational coef;
};

struct Constraint {
  std::vector<Term> terms;
  Relation relation = Relation::less_equal;
  Rational rhs;
  std::string label;
};

struct Variable {
  std::string name;
  std::optional<Rational> lower = Rational(0);
  std::optional<Rational> upper;
};

class LPModel {
 public:
  std::size_t add_variable(std::string name, std::optional<Rational> lower = Rational(0),
                           std::optional<Rational> upper = std::nullopt);
  void add_constraint(std::vector<Term> terms, Relation relation, Rational rhs, std::string label = {});

  std::size_t num_variables() const { return variables_.size(); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }

  // Labels of constraints and bounds that x violates (empty when feasible).
  std::vector<std::string> violations(const RationalVector& x) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
};

struct LPSolution {
  Status status = Status::infeasible;
  RationalVector values;  // one per model variable, only when optimal
  Rational objective;
};

// Phase 1 runs once in the constructor; every solve() starts from the basis
// the previous solve ended in, so a sequence of related objectives is cheap.
class SimplexSolver {
 public:
  explicit SimplexSolver(const LPModel& model);
  ~SimplexSolver();
  SimplexSolver(SimplexSolver&&) noexcept;
  SimplexSolver& operator=(SimplexSolver&&) noexcept;

  bool feasible() const;
  LPSolution solve(const RationalVector& objective, Sense sense);
  std::size_t pivots() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

LPSolution solve_lp(const LPModel& model, const RationalVector& objective, Sense sense);

}  // namespace ordertope::lp

#include "ordertope/lp.hpp"

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace ordertope::lp {

const char* to_string(Status status) {
  switch (status) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::unbounded:
      return "unbounded";
  }
  return "unknown";
}

std::size_t LPModel::add_variable(std::string name, std::optional<Rational> lower, std::optional<Rational> upper) {
  if (lower && upper && *lower > *upper) throw std::invalid_argument("variable " + name + ": lower bound exceeds upper");
  variables_.push_back(Variable{std::move(name), std::move(lower), std::move(upper)});
  return variables_.size() - 1;
}

void LPModel::add_constraint(std::vector<Term> terms, Relation relation, Rational rhs, std::string label) {
  for (const auto& t : terms) {
    if (t.var >= variables_.size()) throw std::out_of_range("constraint refers to an unknown variable");
  }
  constraints_.push_back(Constraint{std::move(terms), relation, std::move(rhs), std::move(label)});
}

std::vector<std::string> LPModel::violations(const RationalVector& x) const {
  std::vector<std::string> out;
  if (x.size() != variables_.size()) {
    out.push_back("dimension mismatch");
    return out;
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (variables_[v].lower && x[v] < *variables_[v].lower) out.push_back("lower bound of " + variables_[v].name);
    if (variables_[v].upper && x[v] > *variables_[v].upper) out.push_back("upper bound of " + variables_[v].name);
  }
  for (std::size_t c = 0; c < constraints_.size(); ++c) {
    const auto& con = constraints_[c];
    Rational lhs = 0;
    for (const auto& t : con.terms) lhs += t.coef * x[t.var];
    bool ok = con.relation == Relation::less_equal      ? lhs <= con.rhs
              : con.relation == Relation::greater_equal ? lhs >= con.rhs
                                                        : lhs == con.rhs;
    if (!ok) out.push_back(con.label.empty() ? "constraint " + std::to_string(c) : con.label);
  }
  return out;
}

namespace {

// x_v = shift + y[pos] - y[neg]  (neg optional), or shift - y[pos] when flipped.
struct VarMap {
  Rational shift;
  std::size_t pos = 0;
  int pos_sign = 1;
  std::optional<std::size_t> neg;
};

constexpr std::size_t kDegenerateStreak = 50;

}  // namespace

// Rows are integer vectors; row i stands for itself divided by its entry in
// the basic column, which is kept positive. The cost row likewise stands for
// cost / cost_scale. Dividing out each row's content after a pivot keeps the
// entries small without per-entry gcds.
struct SimplexSolver::Impl {
  std::size_t num_model_vars = 0;
  std::vector<VarMap> map;
  std::size_t cols = 0;  // structural + slack columns after phase 1
  std::vector<IntegerVector> rows;  // each has cols + 1 entries, the last is the rhs
  std::vector<std::size_t> basis;
  bool is_feasible = false;
  bool bland = false;
  std::size_t degenerate_run = 0;
  std::size_t pivot_count = 0;

  struct CostRow {
    IntegerVector v;
    Integer scale = 1;
  };

  static void remove_content(IntegerVector& row, Integer* scale = nullptr) {
    Integer g = scale ? *scale : Integer(0);
    for (const auto& x : row) {
      if (g == 1) return;
      if (sgn(x) != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    }
    if (g == 1 || g == 0) return;
    for (auto& x : row) {
      if (sgn(x) != 0) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
    }
    if (scale) mpz_divexact(scale->get_mpz_t(), scale->get_mpz_t(), g.get_mpz_t());
  }

  // target <- p * target - a * source, where p > 0.
  static void combine(IntegerVector& target, const Integer& p, const Integer& a, const IntegerVector& source) {
    const bool unit = p == 1;
    for (std::size_t j = 0; j < target.size(); ++j) {
      mpz_ptr t = target[j].get_mpz_t();
      if (!unit && sgn(target[j]) != 0) mpz_mul(t, t, p.get_mpz_t());
      if (sgn(source[j]) != 0) mpz_submul(t, a.get_mpz_t(), source[j].get_mpz_t());
    }
  }

  void pivot(std::size_t r, std::size_t c, CostRow& cost) {
    IntegerVector& pr = rows[r];
    if (sgn(pr[c]) < 0) {
      for (auto& x : pr) x = -x;
    }
    const Integer p = pr[c];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || sgn(rows[i][c]) == 0) continue;
      const Integer a = rows[i][c];
      combine(rows[i], p, a, pr);
      remove_content(rows[i]);
    }
    if (sgn(cost.v[c]) != 0) {
      const Integer a = cost.v[c];
      combine(cost.v, p, a, pr);
      cost.scale *= p;
      remove_content(cost.v, &cost.scale);
    }
    basis[r] = c;
    ++pivot_count;
  }

  // Maximizes with the reduced-cost row (entries > 0 are improving, the last
  // one is minus the objective value). `allowed` masks columns that may enter.
  Status run(CostRow& cost, std::size_t allowed) {
    const std::size_t rhs = cost.v.size() - 1;
    while (true) {
      std::optional<std::size_t> enter;
      if (bland) {
        for (std::size_t j = 0; j < allowed; ++j) {
          if (sgn(cost.v[j]) > 0) {
            enter = j;
            break;
          }
        }
      } else {
        for (std::size_t j = 0; j < allowed; ++j) {
          if (sgn(cost.v[j]) > 0 && (!enter || cost.v[j] > cost.v[*enter])) enter = j;
        }
      }
      if (!enter) return Status::optimal;
      const std::size_t c = *enter;
      // smallest rhs_i / a_ic over a_ic > 0, compared by cross-multiplication
      std::optional<std::size_t> leave;
      Integer lhs, rhs_prod;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (sgn(rows[i][c]) <= 0) continue;
        if (!leave) {
          leave = i;
          continue;
        }
        const auto& b = rows[*leave];
        mpz_mul(lhs.get_mpz_t(), rows[i][rhs].get_mpz_t(), b[c].get_mpz_t());
        mpz_mul(rhs_prod.get_mpz_t(), b[rhs].get_mpz_t(), rows[i][c].get_mpz_t());
        int cmp = mpz_cmp(lhs.get_mpz_t(), rhs_prod.get_mpz_t());
        if (cmp < 0 || (cmp == 0 && basis[i] < basis[*leave])) leave = i;
      }
      if (!leave) return Status::unbounded;
      if (sgn(rows[*leave][rhs]) == 0) {
        if (++degenerate_run > kDegenerateStreak) bland = true;
      } else {
        degenerate_run = 0;
      }
      pivot(*leave, c, cost);
    }
  }

  // Integer cost row for `col_cost` (one entry per column, rhs excluded)
  // reduced against the current basis.
  CostRow reduced_costs(const RationalVector& col_cost, std::size_t width) {
    CostRow cost;
    cost.scale = common_denominator(col_cost);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Rational& cb = col_cost[basis[i]];
      if (sgn(cb) == 0) continue;
      Rational f = cb / rows[i][basis[i]];
      mpz_lcm(cost.scale.get_mpz_t(), cost.scale.get_mpz_t(), f.get_den_mpz_t());
    }
    cost.v.assign(width + 1, Integer(0));
    for (std::size_t j = 0; j < width; ++j) {
      if (sgn(col_cost[j]) != 0) cost.v[j] = Rational(col_cost[j] * cost.scale).get_num();
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Rational& cb = col_cost[basis[i]];
      if (sgn(cb) == 0) continue;
      Integer f = Rational(cb * cost.scale / rows[i][basis[i]]).get_num();
      for (std::size_t j = 0; j <= width; ++j) {
        if (sgn(rows[i][j]) != 0) mpz_submul(cost.v[j].get_mpz_t(), f.get_mpz_t(), rows[i][j].get_mpz_t());
      }
    }
    remove_content(cost.v, &cost.scale);
    return cost;
  }

  void build(const LPModel& model) {
    num_model_vars = model.num_variables();
    std::size_t next = 0;
    struct BoundRow {
      std::size_t col;
      Rational limit;
    };
    std::vector<BoundRow> bound_rows;
    for (const auto& var : model.variables()) {
      VarMap m;
      if (var.lower) {
        m.shift = *var.lower;
        m.pos = next++;
        if (var.upper) bound_rows.push_back({m.pos, *var.upper - *var.lower});
      } else if (var.upper) {
        m.shift = *var.upper;
        m.pos = next++;
        m.pos_sign = -1;
      } else {
        m.shift = 0;
        m.pos = next++;
        m.neg = next++;
      }
      map.push_back(std::move(m));
    }
    const std::size_t structural = next;

    struct Row {
      RationalVector coef;  // over structural columns
      Relation relation;
      Rational rhs;
    };
    std::vector<Row> raw;
    for (const auto& con : model.constraints()) {
      Row row{RationalVector(structural, Rational(0)), con.relation, con.rhs};
      for (const auto& t : con.terms) {
        const VarMap& m = map[t.var];
        row.rhs -= t.coef * m.shift;
        row.coef[m.pos] += t.coef * m.pos_sign;
        if (m.neg) row.coef[*m.neg] -= t.coef;
      }
      raw.push_back(std::move(row));
    }
    for (const auto& b : bound_rows) {
      Row row{RationalVector(structural, Rational(0)), Relation::less_equal, b.limit};
      row.coef[b.col] = 1;
      raw.push_back(std::move(row));
    }
    for (auto& row : raw) {
      if (sgn(row.rhs) < 0) {
        for (auto& x : row.coef) x = -x;
        row.rhs = -row.rhs;
        if (row.relation == Relation::less_equal) {
          row.relation = Relation::greater_equal;
        } else if (row.relation == Relation::greater_equal) {
          row.relation = Relation::less_equal;
        }
      }
    }

    std::size_t slack_count = 0;
    std::size_t artificial_count = 0;
    for (const auto& row : raw) {
      if (row.relation != Relation::equal) ++slack_count;
      if (row.relation != Relation::less_equal) ++artificial_count;
    }
    const std::size_t total = structural + slack_count + artificial_count;
    const std::size_t first_artificial = structural + slack_count;
    rows.assign(raw.size(), IntegerVector(total + 1, Integer(0)));
    basis.assign(raw.size(), 0);
    std::size_t slack = structural;
    std::size_t art = first_artificial;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      RationalVector all = raw[i].coef;
      all.push_back(raw[i].rhs);
      const Integer scale = common_denominator(all);
      for (std::size_t j = 0; j < structural; ++j) {
        if (sgn(raw[i].coef[j]) != 0) rows[i][j] = Rational(raw[i].coef[j] * scale).get_num();
      }
      rows[i][total] = Rational(raw[i].rhs * scale).get_num();
      switch (raw[i].relation) {
        case Relation::less_equal:
          rows[i][slack] = scale;
          basis[i] = slack++;
          break;
        case Relation::greater_equal:
          rows[i][slack++] = -scale;
          rows[i][art] = scale;
          basis[i] = art++;
          break;
        case Relation::equal:
          rows[i][art] = scale;
          basis[i] = art++;
          break;
      }
      remove_content(rows[i]);
    }

    // phase 1: maximize -(sum of artificials)
    RationalVector phase1(total, Rational(0));
    for (std::size_t j = first_artificial; j < total; ++j) phase1[j] = -1;
    CostRow cost = reduced_costs(phase1, total);
    run(cost, first_artificial);
    is_feasible = sgn(cost.v[total]) == 0;
    if (!is_feasible) return;

    // drive remaining (zero-level) artificials out of the basis
    for (std::size_t i = 0; i < rows.size();) {
      if (basis[i] < first_artificial) {
        ++i;
        continue;
      }
      std::optional<std::size_t> col;
      for (std::size_t j = 0; j < first_artificial; ++j) {
        if (sgn(rows[i][j]) != 0) {
          col = j;
          break;
        }
      }
      if (col) {
        pivot(i, *col, cost);
        ++i;
      } else {
        // redundant equality
        rows.erase(rows.begin() + static_cast<long>(i));
        basis.erase(basis.begin() + static_cast<long>(i));
      }
    }
    cols = first_artificial;
    for (auto& row : rows) {
      Integer rhs_value = row[total];
      row.resize(cols + 1);
      row[cols] = rhs_value;
      remove_content(row);
    }
  }

  LPSolution solve(const RationalVector& objective, Sense sense) {
    LPSolution out;
    if (objective.size() != num_model_vars) throw std::invalid_argument("objective dimension mismatch");
    if (!is_feasible) {
      out.status = Status::infeasible;
      return out;
    }
    const int flip = sense == Sense::maximize ? 1 : -1;
    RationalVector col_cost(cols, Rational(0));
    Rational constant = 0;
    for (std::size_t v = 0; v < num_model_vars; ++v) {
      if (sgn(objective[v]) == 0) continue;
      const VarMap& m = map[v];
      Rational c = objective[v] * flip;
      constant += c * m.shift;
      col_cost[m.pos] += c * m.pos_sign;
      if (m.neg) col_cost[*m.neg] -= c;
    }
    CostRow cost = reduced_costs(col_cost, cols);
    out.status = run(cost, cols);
    if (out.status != Status::optimal) return out;
    RationalVector y(cols, Rational(0));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      Rational v(rows[i][cols], rows[i][basis[i]]);
      v.canonicalize();
      y[basis[i]] = v;
    }
    out.values.resize(num_model_vars);
    for (std::size_t v = 0; v < num_model_vars; ++v) {
      const VarMap& m = map[v];
      Rational x = m.shift + m.pos_sign * y[m.pos];
      if (m.neg) x -= y[*m.neg];
      out.values[v] = x;
    }
    Rational value(cost.v[cols], cost.scale);
    value.canonicalize();
    out.objective = (constant - value) * flip;
    return out;
  }
};

SimplexSolver::SimplexSolver(const LPModel& model) : impl_(std::make_unique<Impl>()) { impl_->build(model); }
SimplexSolver::~SimplexSolver() = default;
SimplexSolver::SimplexSolver(SimplexSolver&&) noexcept = default;
SimplexSolver& SimplexSolver::operator=(SimplexSolver&&) noexcept = default;

bool SimplexSolver::feasible() const { return impl_->is_feasible; }

LPSolution SimplexSolver::solve(const RationalVector& objective, Sense sense) {
  return impl_->solve(objective, sense);
}

std::size_t SimplexSolver::pivots() const { return impl_->pivot_count; }

LPSolution solve_lp(const LPModel& model, const RationalVector& objective, Sense sense) {
  SimplexSolver solver(model);
  return solver.solve(objective, sense);
}

}  // namespace ordertope::lp

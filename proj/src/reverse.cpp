#include "ordertope/reverse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace ordertope::reverse {

std::vector<std::size_t> PublishedData::known_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < known.size(); ++j) {
    if (known[j]) out.push_back(j);
  }
  return out;
}

std::vector<std::size_t> PublishedData::unknown_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < known.size(); ++j) {
    if (!known[j]) out.push_back(j);
  }
  return out;
}

bool is_competition_ranking(const std::vector<long>& ranks) {
  std::vector<long> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    // first entity of each tie group sits at position rank - 1
    if (i == 0 || sorted[i] != sorted[i - 1]) {
      if (sorted[i] != static_cast<long>(i) + 1) return false;
    }
  }
  return true;
}

std::vector<long> competition_ranks(const RationalVector& column) {
  std::vector<long> out(column.size());
  for (std::size_t i = 0; i < column.size(); ++i) {
    long better = 0;
    for (const auto& x : column) better += x > column[i];
    out[i] = better + 1;
  }
  return out;
}

PublishedData publish(const ScoreMatrix& truth, const RationalVector& weights, const std::vector<bool>& known) {
  truth.validate();
  PublishedData data;
  data.names = truth.names;
  data.categories = truth.categories;
  data.known = known;
  data.weights = weights;
  if (known.size() != truth.dim() || weights.size() != truth.dim()) {
    throw std::invalid_argument("weights and known flags must have one entry per category");
  }
  const std::size_t n = truth.size();
  data.known_scores.assign(n, {});
  data.ranks.assign(n, {});
  for (std::size_t i = 0; i < n; ++i) {
    data.overall.push_back(dot(weights, truth.rows[i]));
    for (std::size_t j = 0; j < truth.dim(); ++j) {
      if (known[j]) data.known_scores[i].push_back(truth.rows[i][j]);
    }
  }
  for (std::size_t j = 0; j < truth.dim(); ++j) {
    if (known[j]) continue;
    RationalVector column;
    for (const auto& row : truth.rows) column.push_back(row[j]);
    auto r = competition_ranks(column);
    for (std::size_t i = 0; i < n; ++i) data.ranks[i].push_back(r[i]);
  }
  data.validate();
  return data;
}

RationalVector hide_category(PublishedData& data, std::size_t category) {
  if (category >= data.categories.size() || !data.known[category]) {
    throw std::invalid_argument("category to hide must be a published score column");
  }
  std::size_t kpos = 0;
  std::size_t upos = 0;
  for (std::size_t j = 0; j < category; ++j) (data.known[j] ? kpos : upos)++;
  RationalVector column;
  for (auto& row : data.known_scores) {
    column.push_back(row[kpos]);
    row.erase(row.begin() + static_cast<long>(kpos));
  }
  auto r = competition_ranks(column);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data.ranks[i].insert(data.ranks[i].begin() + static_cast<long>(upos), r[i]);
  }
  data.known[category] = false;
  data.validate();
  return column;
}

void PublishedData::validate() const {
  const std::size_t n = names.size();
  const std::size_t d = categories.size();
  if (n == 0) throw std::invalid_argument("published data has no entities");
  if (known.size() != d) throw std::invalid_argument("known flags do not match the categories");
  if (weights.size() != d) {
    throw std::invalid_argument("expected " + std::to_string(d) + " weights, got " + std::to_string(weights.size()));
  }
  Rational total = 0;
  for (const auto& w : weights) {
    if (sgn(w) < 0) throw std::invalid_argument("weights must be non-negative");
    total += w;
  }
  if (total != 1) throw std::invalid_argument("weights sum to " + to_exact_string(total) + ", not 1");
  if (overall.size() != n || known_scores.size() != n || ranks.size() != n) {
    throw std::invalid_argument("published columns have inconsistent lengths");
  }
  const std::size_t nk = known_indices().size();
  const std::size_t nu = d - nk;
  for (std::size_t i = 0; i < n; ++i) {
    if (known_scores[i].size() != nk || ranks[i].size() != nu) {
      throw std::invalid_argument("row " + std::to_string(i + 1) + " (" + names[i] + ") has the wrong number of fields");
    }
  }
  auto unknown = unknown_indices();
  for (std::size_t u = 0; u < nu; ++u) {
    std::vector<long> column;
    for (std::size_t i = 0; i < n; ++i) column.push_back(ranks[i][u]);
    if (!is_competition_ranking(column)) {
      throw std::invalid_argument("rank column " + categories[unknown[u]] + " is not a valid ranking");
    }
  }
}

namespace {

// Entities of one unknown category grouped by rank, best group first.
struct Chain {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> group_of;  // per entity, 0-based
};

std::vector<Chain> make_chains(const PublishedData& data) {
  const std::size_t n = data.size();
  const std::size_t nu = data.unknown_indices().size();
  std::vector<Chain> chains(nu);
  for (std::size_t u = 0; u < nu; ++u) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.ranks[a][u] < data.ranks[b][u]; });
    Chain& c = chains[u];
    c.group_of.assign(n, 0);
    for (std::size_t pos = 0; pos < n; ++pos) {
      std::size_t i = order[pos];
      if (pos == 0 || data.ranks[i][u] != data.ranks[order[pos - 1]][u]) c.groups.emplace_back();
      c.groups.back().push_back(i);
      c.group_of[i] = c.groups.size() - 1;
    }
  }
  return chains;
}

void check_chain_room(const PublishedData& data, const std::vector<Chain>& chains, const ReverseOptions& options) {
  if (sgn(options.epsilon) <= 0) throw std::invalid_argument("epsilon must be positive");
  if (options.lower > options.upper) throw std::invalid_argument("lower bound exceeds upper bound");
  auto unknown = data.unknown_indices();
  std::vector<std::string> bad;
  for (std::size_t u = 0; u < chains.size(); ++u) {
    Rational span = options.epsilon * static_cast<long>(chains[u].groups.size() - 1);
    if (span > options.upper - options.lower) bad.push_back("rank chain of " + data.categories[unknown[u]]);
  }
  if (!bad.empty()) throw Infeasible("rank gaps do not fit between the score bounds", bad);
}

// Overall score minus the known part.
RationalVector unknown_part(const PublishedData& data) {
  auto known = data.known_indices();
  RationalVector rhs(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    rhs[i] = data.overall[i];
    for (std::size_t k = 0; k < known.size(); ++k) rhs[i] -= data.weights[known[k]] * data.known_scores[i][k];
  }
  return rhs;
}

}  // namespace

lp::LPModel build_lp(const PublishedData& data, const ReverseOptions& options) {
  data.validate();
  auto chains = make_chains(data);
  check_chain_room(data, chains, options);
  const std::size_t n = data.size();
  auto unknown = data.unknown_indices();
  const std::size_t nu = unknown.size();

  lp::LPModel model;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t u = 0; u < nu; ++u) {
      model.add_variable(data.names[i] + ":" + data.categories[unknown[u]], options.lower, options.upper);
    }
  }
  RationalVector rhs = unknown_part(data);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<lp::Term> terms;
    for (std::size_t u = 0; u < nu; ++u) {
      if (sgn(data.weights[unknown[u]]) != 0) terms.push_back({i * nu + u, data.weights[unknown[u]]});
    }
    model.add_constraint(std::move(terms), lp::Relation::equal, rhs[i], "overall score of " + data.names[i]);
  }
  for (std::size_t u = 0; u < nu; ++u) {
    std::vector<std::size_t> order;
    for (const auto& g : chains[u].groups) order.insert(order.end(), g.begin(), g.end());
    for (std::size_t pos = 0; pos + 1 < order.size(); ++pos) {
      std::size_t a = order[pos];
      std::size_t b = order[pos + 1];
      const std::string& cat = data.categories[unknown[u]];
      if (chains[u].group_of[a] == chains[u].group_of[b]) {
        model.add_constraint({{a * nu + u, Rational(1)}, {b * nu + u, Rational(-1)}}, lp::Relation::equal, 0,
                             cat + ": " + data.names[a] + " ties " + data.names[b]);
      } else {
        model.add_constraint({{a * nu + u, Rational(1)}, {b * nu + u, Rational(-1)}}, lp::Relation::greater_equal,
                             options.epsilon, cat + ": " + data.names[a] + " above " + data.names[b]);
      }
    }
  }
  return model;
}

Estimate estimate_scores(const PublishedData& data, const ReverseOptions& options) {
  lp::LPModel explicit_model = build_lp(data, options);
  auto chains = make_chains(data);
  const std::size_t n = data.size();
  auto unknown = data.unknown_indices();
  auto known = data.known_indices();
  const std::size_t nu = unknown.size();
  const Rational room = options.upper - options.lower;

  // Reduced form: per category a base b >= 0 and one slack g_s >= 0 per gap
  // between consecutive rank groups, so that the entity in group t scores
  //   lower + (T - 1 - t) eps + b + g_t + ... + g_{T-2}.
  lp::LPModel reduced;
  std::vector<std::size_t> base(nu);
  std::vector<std::size_t> first_gap(nu);
  for (std::size_t u = 0; u < nu; ++u) {
    const std::string& cat = data.categories[unknown[u]];
    base[u] = reduced.add_variable(cat + ":base");
    first_gap[u] = reduced.num_variables();
    for (std::size_t s = 0; s + 1 < chains[u].groups.size(); ++s) reduced.add_variable(cat + ":gap" + std::to_string(s));
  }
  auto offset = [&](std::size_t u, std::size_t t) -> Rational {
    return options.lower + options.epsilon * static_cast<long>(chains[u].groups.size() - 1 - t);
  };
  auto x_terms = [&](std::size_t u, std::size_t t, const Rational& coef, std::vector<lp::Term>& terms) {
    terms.push_back({base[u], coef});
    for (std::size_t s = t; s + 1 < chains[u].groups.size(); ++s) terms.push_back({first_gap[u] + s, coef});
  };
  RationalVector rhs = unknown_part(data);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<lp::Term> terms;
    Rational r = rhs[i];
    for (std::size_t u = 0; u < nu; ++u) {
      const Rational& w = data.weights[unknown[u]];
      if (sgn(w) == 0) continue;
      std::size_t t = chains[u].group_of[i];
      r -= w * offset(u, t);
      x_terms(u, t, w, terms);
    }
    reduced.add_constraint(std::move(terms), lp::Relation::equal, r, "overall score of " + data.names[i]);
  }
  for (std::size_t u = 0; u < nu; ++u) {
    std::vector<lp::Term> terms;
    x_terms(u, 0, Rational(1), terms);
    reduced.add_constraint(std::move(terms), lp::Relation::less_equal,
                           room - options.epsilon * static_cast<long>(chains[u].groups.size() - 1),
                           "upper bound of " + data.categories[unknown[u]]);
  }

  lp::SimplexSolver solver(reduced);
  if (!solver.feasible()) {
    std::vector<std::string> culprits;
    for (std::size_t i = 0; i < n; ++i) {
      Rational lo_sum = 0;
      Rational hi_sum = 0;
      for (std::size_t u = 0; u < nu; ++u) {
        const Rational& w = data.weights[unknown[u]];
        std::size_t t = chains[u].group_of[i];
        lo_sum += w * offset(u, t);
        hi_sum += w * (options.upper - options.epsilon * static_cast<long>(t));
      }
      if (rhs[i] < lo_sum || rhs[i] > hi_sum) culprits.push_back("overall score of " + data.names[i]);
    }
    if (culprits.empty()) culprits.push_back("overall-score equalities together with the rank constraints");
    throw Infeasible("published data admits no consistent unknown scores", culprits);
  }

  Estimate est;
  est.unknown.assign(n, RationalVector(nu, Rational(0)));
  est.low.assign(n, RationalVector(nu));
  est.high.assign(n, RationalVector(nu));

  std::vector<std::vector<Rational>> group_value(nu);
  auto expand = [&](const RationalVector& y) {
    // per category: value of each rank group from the base and suffix sums of gaps
    for (std::size_t u = 0; u < nu; ++u) {
      const std::size_t groups = chains[u].groups.size();
      group_value[u].assign(groups, Rational(0));
      Rational suffix = 0;
      for (std::size_t t = groups; t-- > 0;) {
        if (t + 1 < groups) suffix += y[first_gap[u] + t];
        group_value[u][t] = offset(u, t) + y[base[u]] + suffix;
      }
    }
  };

  // Neighbouring groups differ in one gap, so sweeping each category in rank
  // order keeps the warm-started solves short.
  for (lp::Sense sense : {lp::Sense::maximize, lp::Sense::minimize}) {
    for (std::size_t u = 0; u < nu; ++u) {
      for (std::size_t t = 0; t < chains[u].groups.size(); ++t) {
        RationalVector objective(reduced.num_variables(), Rational(0));
        objective[base[u]] = 1;
        for (std::size_t s = t; s + 1 < chains[u].groups.size(); ++s) objective[first_gap[u] + s] = 1;
        auto sol = solver.solve(objective, sense);
        if (sol.status != lp::Status::optimal) throw std::logic_error("bounded reverse-engineering program not optimal");
        expand(sol.values);
        // every entity of the group shares this objective, so the solve counts once per entity
        const long multiplicity = static_cast<long>(chains[u].groups[t].size());
        est.lp_solves += static_cast<std::size_t>(multiplicity);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t v = 0; v < nu; ++v) est.unknown[i][v] += group_value[v][chains[v].group_of[i]] * multiplicity;
        }
        for (std::size_t i : chains[u].groups[t]) {
          (sense == lp::Sense::maximize ? est.high : est.low)[i][u] = group_value[u][t];
        }
      }
    }
  }
  est.pivots = solver.pivots();
  for (auto& row : est.unknown) {
    for (auto& x : row) x /= static_cast<long>(est.lp_solves);
  }

  RationalVector flat;
  for (const auto& row : est.unknown) flat.insert(flat.end(), row.begin(), row.end());
  est.residual_violations = explicit_model.violations(flat);

  est.scores.names = data.names;
  est.scores.categories = data.categories;
  for (std::size_t i = 0; i < n; ++i) {
    RationalVector row(data.categories.size());
    for (std::size_t k = 0; k < known.size(); ++k) row[known[k]] = data.known_scores[i][k];
    for (std::size_t u = 0; u < nu; ++u) row[unknown[u]] = est.unknown[i][u];
    est.scores.rows.push_back(std::move(row));
  }
  return est;
}

namespace {

std::vector<double> standardize(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / n);
  std::vector<double> out;
  out.reserve(x.size());
  for (double v : x) out.push_back(sd > 0 ? (v - mean) / sd : 0.0);
  return out;
}

double mean_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace

ControlReport validate_control(const RationalVector& truth, const RationalVector& estimate, std::size_t trials,
                               std::uint64_t seed) {
  if (truth.size() != estimate.size() || truth.size() < 2) {
    throw std::invalid_argument("control vectors must have equal length of at least 2");
  }
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  std::vector<double> a;
  std::vector<double> ahat;
  for (const auto& x : truth) a.push_back(x.get_d());
  for (const auto& x : estimate) ahat.push_back(x.get_d());
  const std::size_t n = a.size();

  ControlReport report;
  report.trials = trials;
  report.seed = seed;
  std::vector<double> za = standardize(a);
  report.mean_abs_error = mean_abs_diff(za, standardize(ahat));

  double mean = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (double v : a) ss += (v - mean) * (v - mean);
  double sd = std::sqrt(ss / static_cast<double>(n));

  // positions of the truth from smallest to largest
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a[x] < a[y]; });

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(mean, sd);
  std::vector<double> scores(trials);
  std::vector<double> draw(n);
  std::vector<double> placed(n);
  for (std::size_t t = 0; t < trials; ++t) {
    for (auto& v : draw) v = normal(rng);
    std::sort(draw.begin(), draw.end());
    for (std::size_t r = 0; r < n; ++r) placed[order[r]] = draw[r];
    scores[t] = mean_abs_diff(za, standardize(placed));
  }
  report.baseline_mean = std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(trials);
  std::sort(scores.begin(), scores.end());
  report.baseline_min = scores.front();
  report.baseline_p95 = scores[trials / 20];
  return report;
}

}  // namespace ordertope::reverse

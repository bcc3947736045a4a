#include "ordertope/ordertope.hpp"

#include "ordertope/lp.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>

namespace ordertope {

namespace {

constexpr int kMaxRebuilds = 4;

// Scores scaled to integers (raw = L u) and translated so that every
// coordinate is at least 1 (shifted = raw + s).
struct IntegerData {
  Integer scale;
  Integer shift;
  std::vector<IntegerVector> raw;
  std::vector<IntegerVector> shifted;
  std::vector<std::size_t> lex_rank;
};

IntegerData integerize(const ScoreMatrix& m) {
  IntegerData out;
  RationalVector all;
  for (const auto& row : m.rows) all.insert(all.end(), row.begin(), row.end());
  out.scale = common_denominator(all);
  Integer lowest;
  bool first = true;
  for (const auto& row : m.rows) {
    IntegerVector r;
    for (const auto& x : row) {
      Rational scaled = x * out.scale;
      r.push_back(scaled.get_num());
      if (first || r.back() < lowest) lowest = r.back();
      first = false;
    }
    out.raw.push_back(std::move(r));
  }
  out.shift = lowest < 1 ? Integer(1 - lowest) : Integer(0);
  for (const auto& r : out.raw) {
    IntegerVector s = r;
    for (auto& x : s) x += out.shift;
    out.shifted.push_back(std::move(s));
  }
  out.lex_rank = lexicographic_ranks(m.rows);
  return out;
}

RankPrefix top_k_integer(const std::vector<IntegerVector>& rows, const std::vector<std::size_t>& lex_rank,
                         const IntegerVector& c, std::size_t k) {
  std::vector<Integer> value(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    Integer v = 0;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (sgn(c[j]) != 0) v += c[j] * rows[i][j];
    }
    value[i] = std::move(v);
  }
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(k), order.end(), [&](std::size_t a, std::size_t b) {
    int cmp_value = cmp(value[a], value[b]);
    if (cmp_value != 0) return cmp_value > 0;
    return lex_rank[a] < lex_rank[b];
  });
  order.resize(k);
  return order;
}

RationalVector prefix_point(const ScoreMatrix& m, const RankPrefix& sigma, const RationalVector& alpha) {
  RationalVector p(m.dim(), Rational(0));
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    for (std::size_t j = 0; j < m.dim(); ++j) p[j] += alpha[i] * m.rows[sigma[i]][j];
  }
  return p;
}

// Largest s such that some c >= 0 with sum 1 separates consecutive prefix
// entries, and the last one from every other entity, by at least s.
struct Margin {
  Rational value;
  RationalVector weights;
};

Margin certify_margin(const std::vector<IntegerVector>& raw, const RankPrefix& sigma) {
  const std::size_t d = raw.front().size();
  lp::LPModel model;
  for (std::size_t j = 0; j < d; ++j) model.add_variable("c" + std::to_string(j));
  const std::size_t s = model.add_variable("s", std::nullopt, std::nullopt);
  auto gap_row = [&](std::size_t better, std::size_t worse) {
    std::vector<lp::Term> terms{{s, Rational(1)}};
    for (std::size_t j = 0; j < d; ++j) {
      Integer diff = raw[better][j] - raw[worse][j];
      if (sgn(diff) != 0) terms.push_back({j, Rational(-diff)});
    }
    model.add_constraint(std::move(terms), lp::Relation::less_equal, 0);
  };
  for (std::size_t i = 0; i + 1 < sigma.size(); ++i) gap_row(sigma[i], sigma[i + 1]);
  std::vector<bool> in_prefix(raw.size(), false);
  for (auto i : sigma) in_prefix[i] = true;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    if (!in_prefix[j]) gap_row(sigma.back(), j);
  }
  std::vector<lp::Term> total;
  for (std::size_t j = 0; j < d; ++j) total.push_back({j, Rational(1)});
  model.add_constraint(std::move(total), lp::Relation::equal, 1);

  RationalVector objective(d + 1, Rational(0));
  objective[s] = 1;
  auto sol = lp::solve_lp(model, objective, lp::Sense::maximize);
  if (sol.status == lp::Status::unbounded) return {Rational(1), RationalVector(d, Rational(1, static_cast<long>(d)))};
  if (sol.status != lp::Status::optimal) throw std::logic_error("certification program has no optimum");
  sol.values.pop_back();
  return {sol.objective, std::move(sol.values)};
}

void check_prefix(const ScoreMatrix& m, const RankPrefix& sigma) {
  if (sigma.empty()) throw std::invalid_argument("empty rank prefix");
  std::set<std::size_t> seen;
  for (auto i : sigma) {
    if (i >= m.size()) throw std::out_of_range("rank prefix index out of range");
    if (!seen.insert(i).second) throw std::invalid_argument("rank prefix repeats an entity");
  }
}

Rational default_magnitude(const ScoreMatrix& m) {
  Rational largest = 0;
  for (const auto& row : m.rows) {
    for (const auto& x : row) largest = std::max(largest, Rational(abs(x)));
  }
  return largest * 1000;
}

}  // namespace

OrdertopeConfig OrdertopeConfig::make(std::size_t k, AlphaMode mode) {
  OrdertopeConfig cfg;
  cfg.k = k;
  for (std::size_t i = 0; i < k; ++i) {
    if (mode == AlphaMode::linear) {
      cfg.alpha.emplace_back(static_cast<long>(k - i));
    } else {
      Integer p;
      mpz_ui_pow_ui(p.get_mpz_t(), 2, k - i);
      cfg.alpha.emplace_back(p);
    }
  }
  cfg.sentinel_magnitude = 0;
  return cfg;
}

void OrdertopeConfig::validate(std::size_t n) const {
  if (k < 1 || k > n) throw std::invalid_argument("k must lie in [1, n]");
  if (alpha.size() != k) throw std::invalid_argument("alpha must have exactly k entries");
  for (std::size_t i = 0; i < k; ++i) {
    if (sgn(alpha[i]) <= 0) throw std::invalid_argument("alpha entries must be positive");
    if (i > 0 && alpha[i] >= alpha[i - 1]) throw std::invalid_argument("alpha must be strictly decreasing");
  }
  if (sgn(sentinel_magnitude) < 0) throw std::invalid_argument("sentinel magnitude must be positive");
}

RankPrefix top_k_prefix(const ScoreMatrix& m, const RationalVector& c, std::size_t k) {
  if (c.size() != m.dim()) throw std::invalid_argument("functional dimension does not match the score matrix");
  if (k < 1 || k > m.size()) throw std::invalid_argument("k must lie in [1, n]");
  std::vector<Rational> value(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) value[i] = dot(c, m.rows[i]);
  auto lex = lexicographic_ranks(m.rows);
  std::vector<std::size_t> order(m.size());
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<long>(k), order.end(), [&](std::size_t a, std::size_t b) {
    if (value[a] != value[b]) return value[a] > value[b];
    return lex[a] < lex[b];
  });
  order.resize(k);
  return order;
}

OracleAnswer oracle_top_k(const ScoreMatrix& m, const RationalVector& c, const OrdertopeConfig& cfg) {
  cfg.validate(m.size());
  OracleAnswer out;
  out.prefix = top_k_prefix(m, c, cfg.k);
  out.point = prefix_point(m, out.prefix, cfg.alpha);
  return out;
}

RationalVector augmented_oracle(const ScoreMatrix& m, const RationalVector& c, const OrdertopeConfig& cfg) {
  OracleAnswer best = oracle_top_k(m, c, cfg);
  Rational n = sgn(cfg.sentinel_magnitude) > 0 ? cfg.sentinel_magnitude : default_magnitude(m);
  std::size_t j = static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
  if (-n * c[j] >= dot(c, best.point)) {
    RationalVector sentinel(m.dim(), Rational(0));
    sentinel[j] = -n;
    return sentinel;
  }
  return best.point;
}

EnvelopePolytope nonneg_envelope(const ScoreMatrix& m, OrdertopeConfig cfg) {
  m.validate();
  cfg.validate(m.size());
  const std::size_t d = m.dim();
  const IntegerData data = integerize(m);

  // alpha' = A alpha is integral; hull points are sum alpha'_i shifted_{s_i}.
  const Integer alpha_scale = common_denominator(cfg.alpha);
  IntegerVector alpha_int;
  Integer alpha_sum = 0;
  for (const auto& a : cfg.alpha) {
    alpha_int.push_back(Rational(a * alpha_scale).get_num());
    alpha_sum += alpha_int.back();
  }
  const Integer frame_scale = alpha_scale * data.scale;  // score units -> hull units

  Integer magnitude;
  if (sgn(cfg.sentinel_magnitude) > 0) {
    Rational scaled = cfg.sentinel_magnitude * frame_scale;
    mpz_cdiv_q(magnitude.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  } else {
    Integer largest = 0;
    for (const auto& row : data.shifted) {
      for (const auto& x : row) largest = std::max(largest, Integer(abs(x)));
    }
    magnitude = 1000 * largest * alpha_sum;
  }

  for (int attempt = 0;; ++attempt) {
    std::map<IntegerVector, RankPrefix> prefix_of;
    std::set<std::pair<RankPrefix, RankPrefix>> collisions;

    hull::VertexOracle oracle = [&](const hull::Functional& c) {
      RankPrefix sigma = top_k_integer(data.raw, data.lex_rank, c, cfg.k);
      IntegerVector point(d, Integer(0));
      for (std::size_t i = 0; i < sigma.size(); ++i) {
        for (std::size_t j = 0; j < d; ++j) point[j] += alpha_int[i] * data.shifted[sigma[i]][j];
      }
      Integer value = 0;
      for (std::size_t j = 0; j < d; ++j) value += c[j] * point[j];
      std::size_t jmin = static_cast<std::size_t>(std::min_element(c.begin(), c.end()) - c.begin());
      hull::Point out(d, Rational(0));
      if (-magnitude * c[jmin] >= value) {
        out[jmin] = -magnitude;
        return out;
      }
      auto [it, fresh] = prefix_of.emplace(point, sigma);
      if (!fresh && it->second != sigma) collisions.emplace(it->second, sigma);
      for (std::size_t j = 0; j < d; ++j) out[j] = point[j];
      return out;
    };

    hull::HullPolytope h = hull::build_hull(oracle, d);

    EnvelopePolytope env;
    env.config = cfg;
    env.config.sentinel_magnitude = Rational(magnitude) / frame_scale;
    env.oracle_queries = h.oracle_queries;
    env.hull_vertices = h.vertices.size();
    env.hull_facets = h.facets.size();
    env.rebuilds = static_cast<std::size_t>(attempt);
    for (const auto& [kept, other] : collisions) env.collisions.push_back({kept, other});

    std::vector<bool> sentinel(h.vertices.size(), false);
    std::vector<bool> dropped(h.vertices.size(), false);
    bool certified = true;
    for (std::size_t v = 0; v < h.vertices.size(); ++v) {
      IntegerVector key;
      for (const auto& x : h.vertices[v]) key.push_back(x.get_num());
      auto it = prefix_of.find(key);
      if (it == prefix_of.end()) {
        sentinel[v] = true;
        continue;
      }
      Margin margin = certify_margin(data.raw, it->second);
      if (sgn(margin.value) < 0) {
        certified = false;
        break;
      }
      if (sgn(margin.value) == 0) {
        // the normal cone only touches the orthant boundary; no N removes it
        dropped[v] = true;
        ++env.boundary_vertices;
        continue;
      }
      env.vertices.push_back({prefix_point(m, it->second, cfg.alpha), it->second, std::move(margin.weights)});
    }
    if (!certified) {
      if (attempt >= kMaxRebuilds) {
        throw CertificationFailure("envelope vertex failed certification after " + std::to_string(kMaxRebuilds) +
                                   " enlargements of the sentinel magnitude");
      }
      magnitude *= 1000;
      continue;
    }

    // back to score units: hull point = frame_scale x + shift sum(alpha') 1
    const Integer translation = data.shift * alpha_sum;
    std::vector<std::size_t> remap(h.vertices.size(), 0);
    std::size_t next = 0;
    for (std::size_t v = 0; v < h.vertices.size(); ++v) {
      if (!sentinel[v] && !dropped[v]) remap[v] = next++;
    }
    for (const auto& f : h.facets) {
      bool touches_sentinel = std::any_of(f.incident_vertices.begin(), f.incident_vertices.end(),
                                          [&](std::size_t v) { return sentinel[v] || dropped[v]; });
      if (touches_sentinel) continue;
      hull::Facet out;
      out.normal = f.normal;
      Rational normal_sum = 0;
      for (const auto& x : f.normal) normal_sum += x;
      out.offset = (f.offset - normal_sum * translation) / frame_scale;
      for (auto v : f.incident_vertices) out.incident_vertices.push_back(remap[v]);
      env.facets.push_back(std::move(out));
    }
    return env;
  }
}

std::optional<RationalVector> certify_reasonable(const ScoreMatrix& m, const RankPrefix& sigma) {
  check_prefix(m, sigma);
  Margin margin = certify_margin(integerize(m).raw, sigma);
  if (sgn(margin.value) <= 0) return std::nullopt;
  return margin.weights;
}

}  // namespace ordertope

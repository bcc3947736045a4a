#include "ordertope/rankserve.hpp"

#include <map>

namespace ordertope::serve {

namespace {

json exact_strings(const RationalVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_exact_string(x));
  return a;
}

const EnvelopePolytope* find_envelope(const io::AnalysisBundle& b, std::size_t k) {
  for (const auto& e : b.envelopes) {
    if (e.config.k == k) return &e;
  }
  return nullptr;
}

json envelope_match(const EnvelopePolytope& env, const RankPrefix& top) {
  RankPrefix prefix(top.begin(), top.begin() + static_cast<long>(std::min(env.config.k, top.size())));
  for (std::size_t v = 0; v < env.vertices.size(); ++v) {
    if (env.vertices[v].prefix == prefix) return {{"k", env.config.k}, {"in_envelope", true}, {"vertex", v}};
  }
  return {{"k", env.config.k}, {"in_envelope", false}, {"vertex", nullptr}};
}

}  // namespace

RankService::RankService(io::AnalysisBundle bundle) : bundle_(std::move(bundle)) {
  bundle_.scores.validate();
  if (bundle_.tally) cached_intervals_ = io::intervals_json(*bundle_.tally, bundle_.scores.names, bundle_.coverage);
}

std::size_t RankService::entity(const std::string& name) const {
  auto i = bundle_.scores.find(name);
  if (!i) throw QueryError(404, "unknown_entity", "no entity named '" + name + "'");
  return *i;
}

const cone::RankTally& RankService::tally() const {
  if (!bundle_.tally) throw QueryError(404, "no_tally", "the bundle has no rank tally");
  return *bundle_.tally;
}

json RankService::rank(const RationalVector& weights, std::optional<std::size_t> k) const {
  const ScoreMatrix& m = bundle_.scores;
  if (weights.size() != m.dim()) {
    throw QueryError(400, "bad_weights",
                     "expected " + std::to_string(m.dim()) + " weights, got " + std::to_string(weights.size()));
  }
  Rational total = 0;
  for (const auto& w : weights) {
    if (sgn(w) < 0) {
      throw QueryError(400, "negative_weight",
                       "weights must be non-negative: a higher score in a category may never lower the overall score");
    }
    total += w;
  }
  if (sgn(total) == 0) throw QueryError(400, "zero_weights", "at least one weight must be positive");
  if (k && (*k == 0 || *k > m.size())) {
    throw QueryError(400, "bad_k", "k must be between 1 and " + std::to_string(m.size()));
  }
  RationalVector c(weights.size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = weights[j] / total;

  const std::size_t shown = k.value_or(m.size());
  RankPrefix order = top_k_prefix(m, c, shown);
  json ranking = json::array();
  for (std::size_t r = 0; r < order.size(); ++r) {
    Rational score = dot(c, m.rows[order[r]]);
    ranking.push_back({{"rank", r + 1},
                       {"name", m.names[order[r]]},
                       {"index", order[r]},
                       {"score", to_exact_string(score)},
                       {"value", score.get_d()}});
  }
  json matches = json::array();
  if (k) {
    if (const auto* env = find_envelope(bundle_, *k)) matches.push_back(envelope_match(*env, order));
  } else {
    for (const auto& env : bundle_.envelopes) matches.push_back(envelope_match(env, order));
  }
  json out = {{"weights", exact_strings(c)}, {"ranking", ranking}, {"envelope", matches}};
  out["k"] = k ? json(*k) : json(nullptr);
  return out;
}

json RankService::intervals(std::optional<Rational> coverage, const std::optional<std::string>& name) const {
  const auto& t = tally();
  if (coverage && (sgn(*coverage) <= 0 || *coverage > 1)) {
    throw QueryError(400, "bad_coverage", "coverage must lie in (0, 1]");
  }
  json all = !coverage || *coverage == bundle_.coverage ? cached_intervals_
                                                        : io::intervals_json(t, bundle_.scores.names, *coverage);
  if (!name) return all;
  std::size_t i = entity(*name);
  json one = all;
  one.erase("mean_width");
  one["entities"] = json::array({all["entities"][i]});
  return one;
}

json RankService::pairwise(const std::string& a, const std::string& b) const {
  const auto& t = tally();
  std::size_t ia = entity(a);
  std::size_t ib = entity(b);
  if (ia == ib) throw QueryError(400, "same_entity", "an entity cannot be compared with itself");
  if (!t.has_pairwise()) throw QueryError(404, "no_pairwise", "the bundle tally has no pairwise counts");
  auto pe = cone::pairwise_fraction(t, ia, ib);
  return {{"a", a},
          {"b", b},
          {"wins", pe.hits},
          {"samples", pe.samples},
          {"fraction", pe.fraction()},
          {"std_error", pe.std_error()}};
}

json RankService::envelope(std::optional<std::size_t> k) const {
  if (k) {
    const auto* env = find_envelope(bundle_, *k);
    if (!env) throw QueryError(404, "no_envelope", "no envelope stored for k = " + std::to_string(*k));
    return io::to_json(*env, bundle_.scores, bundle_.alpha_mode);
  }
  json list = json::array();
  for (const auto& env : bundle_.envelopes) {
    list.push_back({{"k", env.config.k}, {"vertices", env.vertices.size()}, {"facets", env.facets.size()}});
  }
  return {{"envelopes", list}};
}

json RankService::meta() const {
  const ScoreMatrix& m = bundle_.scores;
  json ks = json::array();
  for (const auto& env : bundle_.envelopes) ks.push_back(env.config.k);
  json out = {{"schema_version", io::kSchemaVersion},
              {"provenance", bundle_.provenance},
              {"n", m.size()},
              {"d", m.dim()},
              {"names", m.names},
              {"categories", m.categories},
              {"reference_weights", exact_strings(bundle_.reference_weights)},
              {"envelope_k", ks},
              {"coverage", to_exact_string(bundle_.coverage)},
              {"extra", bundle_.extra}};
  if (bundle_.tally) {
    out["tally"] = {{"samples", bundle_.tally->samples},
                    {"seed", bundle_.tally->seed},
                    {"pairwise", bundle_.tally->has_pairwise()}};
  } else {
    out["tally"] = nullptr;
  }
  return out;
}

RationalVector parse_weight_param(const std::string& text) {
  if (text.empty()) throw QueryError(400, "bad_weights", "missing weights");
  try {
    return io::parse_weights(text);
  } catch (const std::exception& e) {
    throw QueryError(400, "bad_weights", e.what());
  }
}

std::size_t parse_count_param(const std::string& name, const std::string& text) {
  std::size_t value = 0;
  std::size_t used = 0;
  try {
    if (!text.empty() && text[0] != '-') value = std::stoul(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw QueryError(400, "bad_" + name, name + " must be a non-negative integer, got '" + text + "'");
  }
  return value;
}

}  // namespace ordertope::serve

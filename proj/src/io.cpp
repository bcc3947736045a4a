#include "ordertope/io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ordertope::io {

namespace {

std::string location(const std::string& source, std::size_t line) { return source + ":" + std::to_string(line) + ": "; }

// Lines without the trailing CR; blank lines are dropped but counted.
std::vector<std::pair<std::size_t, std::string>> read_lines(std::istream& in) {
  std::vector<std::pair<std::size_t, std::string>> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (number == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    out.emplace_back(number, line);
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return in;
}

json strings(const RationalVector& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_exact_string(x));
  return a;
}

RationalVector rationals(const json& a) {
  RationalVector v;
  for (const auto& x : a) v.push_back(parse_rational(x.get<std::string>()));
  return v;
}

json header(const std::string& kind) { return json{{"schema_version", kSchemaVersion}, {"kind", kind}}; }

void expect_kind(const json& j, const std::string& kind) {
  if (!j.is_object() || !j.contains("schema_version") || !j.contains("kind")) {
    throw std::invalid_argument("not an artifact: missing schema_version or kind");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw std::invalid_argument("unsupported schema_version " + j.at("schema_version").dump());
  }
  if (j.at("kind").get<std::string>() != kind) {
    throw std::invalid_argument("expected a " + kind + " artifact, got " + j.at("kind").get<std::string>());
  }
}

const char* mode_name(AlphaMode mode) { return mode == AlphaMode::linear ? "linear" : "geometric"; }

AlphaMode mode_from(const std::string& s) {
  if (s == "linear") return AlphaMode::linear;
  if (s == "geometric") return AlphaMode::geometric;
  throw std::invalid_argument("unknown alpha mode '" + s + "'");
}

json prefix_names(const RankPrefix& p, const ScoreMatrix& m) {
  json a = json::array();
  for (std::size_t i : p) a.push_back(m.names.at(i));
  return a;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
      was_quoted = true;
    } else if (ch == ',') {
      fields.push_back(was_quoted ? cur : trim(cur));
      cur.clear();
      was_quoted = false;
    } else {
      cur += ch;
    }
  }
  if (quoted) throw ParseError("unterminated quoted field");
  fields.push_back(was_quoted ? cur : trim(cur));
  return fields;
}

ScoreMatrix parse_scores_csv(std::istream& in, const std::string& source) {
  auto lines = read_lines(in);
  if (lines.empty()) throw ParseError(source + ": empty file");
  std::vector<std::string> head;
  try {
    head = split_csv_line(lines[0].second);
  } catch (const ParseError& e) {
    throw ParseError(location(source, lines[0].first) + e.what());
  }
  if (head.size() < 2 || head[0] != "name") {
    throw ParseError(location(source, lines[0].first) + "header must be 'name' followed by at least one category");
  }
  ScoreMatrix m;
  m.categories.assign(head.begin() + 1, head.end());
  std::map<std::string, std::size_t> name_line;
  std::map<RationalVector, std::size_t> row_line;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, text] = lines[li];
    std::vector<std::string> fields;
    try {
      fields = split_csv_line(text);
    } catch (const ParseError& e) {
      throw ParseError(location(source, number) + e.what());
    }
    if (fields.size() != head.size()) {
      throw ParseError(location(source, number) + "expected " + std::to_string(head.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    if (fields[0].empty()) throw ParseError(location(source, number) + "empty name");
    RationalVector row;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      try {
        row.push_back(parse_rational(fields[c]));
      } catch (const ParseError&) {
        throw ParseError(location(source, number) + "column " + std::to_string(c + 1) + " (" + head[c] +
                         "): malformed number '" + fields[c] + "'");
      }
    }
    if (auto [it, fresh] = name_line.emplace(fields[0], number); !fresh) {
      throw ParseError(location(source, number) + "duplicate name '" + fields[0] + "' (first on line " +
                       std::to_string(it->second) + ")");
    }
    if (auto [it, fresh] = row_line.emplace(row, number); !fresh) {
      throw ParseError(location(source, number) + "scores of '" + fields[0] + "' duplicate line " +
                       std::to_string(it->second));
    }
    m.names.push_back(fields[0]);
    m.rows.push_back(std::move(row));
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(source + ": " + e.what());
  }
  return m;
}

ScoreMatrix read_scores_csv(const std::string& path) {
  auto in = open_in(path);
  return parse_scores_csv(in, path);
}

void write_scores_csv(std::ostream& out, const ScoreMatrix& m) {
  out << "name";
  for (const auto& c : m.categories) out << ',' << csv_field(c);
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << csv_field(m.names[i]);
    for (const auto& x : m.rows[i]) out << ',' << to_exact_string(x);
    out << '\n';
  }
}

void write_scores_csv(const std::string& path, const ScoreMatrix& m) {
  auto out = open_out(path);
  write_scores_csv(out, m);
}

RationalVector parse_weights(const std::string& text) {
  RationalVector w;
  for (const auto& f : split_csv_line(text)) {
    try {
      w.push_back(parse_rational(f));
    } catch (const ParseError&) {
      throw ParseError("malformed weight '" + f + "'");
    }
  }
  return w;
}

reverse::PublishedData parse_published_csv(std::istream& in, const RationalVector& weights, const std::string& source) {
  auto lines = read_lines(in);
  if (lines.empty()) throw ParseError(source + ": empty file");
  auto head = split_csv_line(lines[0].second);
  const std::string where = location(source, lines[0].first);
  if (head.size() < 3 || head[0] != "name" || head[1] != "overall") {
    throw ParseError(where + "header must start with 'name,overall' followed by category columns");
  }
  reverse::PublishedData data;
  for (std::size_t c = 2; c < head.size(); ++c) {
    auto colon = head[c].rfind(':');
    std::string kind = colon == std::string::npos ? "" : head[c].substr(colon + 1);
    if (kind != "score" && kind != "rank") {
      throw ParseError(where + "column " + std::to_string(c + 1) + " '" + head[c] +
                       "' must be '<category>:score' or '<category>:rank'");
    }
    data.categories.push_back(head[c].substr(0, colon));
    data.known.push_back(kind == "score");
  }
  if (weights.size() != data.categories.size()) {
    throw std::invalid_argument(source + ": " + std::to_string(data.categories.size()) + " categories but " +
                                std::to_string(weights.size()) + " weights");
  }
  data.weights = weights;
  std::map<std::string, std::size_t> name_line;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto& [number, text] = lines[li];
    auto fields = split_csv_line(text);
    if (fields.size() != head.size()) {
      throw ParseError(location(source, number) + "expected " + std::to_string(head.size()) + " fields, got " +
                       std::to_string(fields.size()));
    }
    if (auto [it, fresh] = name_line.emplace(fields[0], number); !fresh) {
      throw ParseError(location(source, number) + "duplicate name '" + fields[0] + "' (first on line " +
                       std::to_string(it->second) + ")");
    }
    data.names.push_back(fields[0]);
    RationalVector known;
    std::vector<long> ranks;
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const std::string col = "column " + std::to_string(c + 1) + " (" + head[c] + ")";
      bool is_rank = c >= 2 && !data.known[c - 2];
      if (is_rank) {
        std::size_t used = 0;
        long r = 0;
        try {
          r = std::stol(fields[c], &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != fields[c].size() || used == 0 || r < 1) {
          throw ParseError(location(source, number) + col + ": malformed rank '" + fields[c] + "'");
        }
        ranks.push_back(r);
      } else {
        Rational v;
        try {
          v = parse_rational(fields[c]);
        } catch (const ParseError&) {
          throw ParseError(location(source, number) + col + ": malformed number '" + fields[c] + "'");
        }
        if (c == 1) data.overall.push_back(v);
        else known.push_back(v);
      }
    }
    data.known_scores.push_back(std::move(known));
    data.ranks.push_back(std::move(ranks));
  }
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(source + ": " + e.what());
  }
  return data;
}

reverse::PublishedData read_published_csv(const std::string& path, const RationalVector& weights) {
  auto in = open_in(path);
  return parse_published_csv(in, weights, path);
}

void write_published_csv(std::ostream& out, const reverse::PublishedData& data) {
  out << "name,overall";
  for (std::size_t j = 0; j < data.categories.size(); ++j) {
    out << ',' << csv_field(data.categories[j] + (data.known[j] ? ":score" : ":rank"));
  }
  out << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    out << csv_field(data.names[i]) << ',' << to_exact_string(data.overall[i]);
    std::size_t k = 0, u = 0;
    for (std::size_t j = 0; j < data.categories.size(); ++j) {
      if (data.known[j]) out << ',' << to_exact_string(data.known_scores[i][k++]);
      else out << ',' << data.ranks[i][u++];
    }
    out << '\n';
  }
}

void write_published_csv(const std::string& path, const reverse::PublishedData& data) {
  auto out = open_out(path);
  write_published_csv(out, data);
}

json to_json(const ScoreMatrix& m) {
  json j = header("scores");
  j["names"] = m.names;
  j["categories"] = m.categories;
  json rows = json::array();
  for (const auto& r : m.rows) rows.push_back(strings(r));
  j["rows"] = rows;
  return j;
}

ScoreMatrix scores_from_json(const json& j) {
  expect_kind(j, "scores");
  ScoreMatrix m;
  m.names = j.at("names").get<std::vector<std::string>>();
  m.categories = j.at("categories").get<std::vector<std::string>>();
  for (const auto& r : j.at("rows")) m.rows.push_back(rationals(r));
  m.validate();
  return m;
}

json to_json(const EnvelopePolytope& env, const ScoreMatrix& m, AlphaMode mode) {
  json j = header("envelope");
  j["names"] = m.names;
  j["categories"] = m.categories;
  j["config"] = {{"k", env.config.k},
                 {"alpha", strings(env.config.alpha)},
                 {"alpha_mode", mode_name(mode)},
                 {"sentinel_magnitude", to_exact_string(env.config.sentinel_magnitude)}};
  j["stats"] = {{"vertices", env.vertices.size()},
                {"facets", env.facets.size()},
                {"oracle_queries", env.oracle_queries},
                {"hull_vertices", env.hull_vertices},
                {"hull_facets", env.hull_facets},
                {"rebuilds", env.rebuilds},
                {"boundary_vertices", env.boundary_vertices},
                {"collisions", env.collisions.size()}};
  json vs = json::array();
  for (const auto& v : env.vertices) {
    vs.push_back({{"prefix", v.prefix},
                  {"prefix_names", prefix_names(v.prefix, m)},
                  {"point", strings(v.point)},
                  {"certificate", strings(v.certificate)}});
  }
  j["vertices"] = vs;
  json fs = json::array();
  for (const auto& f : env.facets) {
    fs.push_back({{"normal", strings(f.normal)}, {"offset", to_exact_string(f.offset)}, {"incident", f.incident_vertices}});
  }
  j["facets"] = fs;
  json cs = json::array();
  for (const auto& c : env.collisions) cs.push_back({{"kept", c.kept}, {"other", c.other}});
  j["collisions"] = cs;
  return j;
}

EnvelopePolytope envelope_from_json(const json& j) {
  expect_kind(j, "envelope");
  EnvelopePolytope env;
  const json& cfg = j.at("config");
  env.config.k = cfg.at("k").get<std::size_t>();
  env.config.alpha = rationals(cfg.at("alpha"));
  env.config.sentinel_magnitude = parse_rational(cfg.at("sentinel_magnitude").get<std::string>());
  const json& st = j.at("stats");
  env.oracle_queries = st.at("oracle_queries").get<std::size_t>();
  env.hull_vertices = st.at("hull_vertices").get<std::size_t>();
  env.hull_facets = st.at("hull_facets").get<std::size_t>();
  env.rebuilds = st.at("rebuilds").get<std::size_t>();
  env.boundary_vertices = st.at("boundary_vertices").get<std::size_t>();
  for (const auto& v : j.at("vertices")) {
    env.vertices.push_back(
        {rationals(v.at("point")), v.at("prefix").get<RankPrefix>(), rationals(v.at("certificate"))});
  }
  for (const auto& f : j.at("facets")) {
    env.facets.push_back({rationals(f.at("normal")), parse_rational(f.at("offset").get<std::string>()),
                          f.at("incident").get<std::vector<std::size_t>>()});
  }
  for (const auto& c : j.at("collisions")) {
    env.collisions.push_back({c.at("kept").get<RankPrefix>(), c.at("other").get<RankPrefix>()});
  }
  return env;
}

json to_json(const cone::RankTally& t, const ScoreMatrix& m) {
  json j = header("tally");
  j["names"] = m.names;
  j["seed"] = t.seed;
  j["samples"] = t.samples;
  json counts = json::array();
  json pairwise = json::array();
  for (std::size_t i = 0; i < t.n; ++i) {
    counts.push_back(std::vector<std::uint64_t>(t.counts.begin() + i * t.n, t.counts.begin() + (i + 1) * t.n));
    if (t.has_pairwise()) {
      pairwise.push_back(std::vector<std::uint64_t>(t.pairwise.begin() + i * t.n, t.pairwise.begin() + (i + 1) * t.n));
    }
  }
  j["counts"] = counts;
  j["pairwise"] = t.has_pairwise() ? pairwise : json(nullptr);
  return j;
}

cone::RankTally tally_from_json(const json& j) {
  expect_kind(j, "tally");
  cone::RankTally t;
  t.seed = j.at("seed").get<std::uint64_t>();
  t.samples = j.at("samples").get<std::uint64_t>();
  const json& counts = j.at("counts");
  t.n = counts.size();
  for (const auto& row : counts) {
    if (row.size() != t.n) throw std::invalid_argument("tally counts are not square");
    for (const auto& x : row) t.counts.push_back(x.get<std::uint64_t>());
  }
  if (!j.at("pairwise").is_null()) {
    for (const auto& row : j.at("pairwise")) {
      if (row.size() != t.n) throw std::invalid_argument("pairwise counts are not square");
      for (const auto& x : row) t.pairwise.push_back(x.get<std::uint64_t>());
    }
    if (t.pairwise.size() != t.n * t.n) throw std::invalid_argument("pairwise counts are not square");
  }
  t.check_conservation();
  return t;
}

json intervals_json(const cone::RankTally& t, const std::vector<std::string>& names, const Rational& coverage) {
  if (names.size() != t.n) throw std::invalid_argument("name list does not match the tally");
  json j = header("intervals");
  j["coverage"] = to_exact_string(coverage);
  j["seed"] = t.seed;
  j["samples"] = t.samples;
  json es = json::array();
  double total = 0;
  for (std::size_t i = 0; i < t.n; ++i) {
    auto ri = cone::ranking_interval(t, i, coverage);
    total += static_cast<double>(ri.width());
    es.push_back({{"name", names[i]},
                  {"lo", ri.lo},
                  {"hi", ri.hi},
                  {"width", ri.width()},
                  {"mass", ri.mass},
                  {"histogram", std::vector<std::uint64_t>(t.counts.begin() + i * t.n, t.counts.begin() + (i + 1) * t.n)}});
  }
  j["mean_width"] = t.n ? total / static_cast<double>(t.n) : 0.0;
  j["entities"] = es;
  return j;
}

json pairwise_json(const cone::RankTally& t, const std::vector<std::string>& names) {
  if (!t.has_pairwise()) throw std::invalid_argument("tally has no pairwise counts");
  if (names.size() != t.n) throw std::invalid_argument("name list does not match the tally");
  json j = header("pairwise");
  j["names"] = names;
  j["seed"] = t.seed;
  j["samples"] = t.samples;
  json wins = json::array();
  json frac = json::array();
  for (std::size_t a = 0; a < t.n; ++a) {
    json wr = json::array();
    json fr = json::array();
    for (std::size_t b = 0; b < t.n; ++b) {
      wr.push_back(t.wins(a, b));
      fr.push_back(static_cast<double>(t.wins(a, b)) / static_cast<double>(t.samples));
    }
    wins.push_back(wr);
    frac.push_back(fr);
  }
  j["wins"] = wins;
  j["fraction"] = frac;
  return j;
}

json to_json(const synth::ExperimentReport& r) {
  json j = header("experiment");
  const auto& c = r.config;
  j["config"] = {{"n", c.n},
                 {"d", c.d},
                 {"p", c.p},
                 {"trials", c.trials},
                 {"coverage", to_exact_string(c.coverage)},
                 {"samples_per_trial", c.samples_per_trial},
                 {"seed", c.seed}};
  j["trial_mean_widths"] = r.trial_mean_widths;
  j["trial_spearman"] = r.trial_spearman;
  j["overall_mean"] = r.overall_mean;
  j["min"] = r.min;
  j["max"] = r.max;
  j["mean_spearman"] = r.mean_spearman;
  return j;
}

synth::ExperimentReport experiment_from_json(const json& j) {
  expect_kind(j, "experiment");
  synth::ExperimentReport r;
  const json& c = j.at("config");
  r.config.n = c.at("n").get<std::size_t>();
  r.config.d = c.at("d").get<std::size_t>();
  r.config.p = c.at("p").get<double>();
  r.config.trials = c.at("trials").get<std::size_t>();
  r.config.coverage = parse_rational(c.at("coverage").get<std::string>());
  r.config.samples_per_trial = c.at("samples_per_trial").get<std::uint64_t>();
  r.config.seed = c.at("seed").get<std::uint64_t>();
  r.trial_mean_widths = j.at("trial_mean_widths").get<std::vector<double>>();
  r.trial_spearman = j.at("trial_spearman").get<std::vector<double>>();
  r.overall_mean = j.at("overall_mean").get<double>();
  r.min = j.at("min").get<double>();
  r.max = j.at("max").get<double>();
  r.mean_spearman = j.at("mean_spearman").get<double>();
  return r;
}

json to_json(const reverse::Estimate& e, const reverse::PublishedData& data, const reverse::ReverseOptions& options) {
  json j = header("reverse_estimate");
  j["epsilon"] = to_exact_string(options.epsilon);
  j["lower"] = to_exact_string(options.lower);
  j["upper"] = to_exact_string(options.upper);
  j["lp_solves"] = e.lp_solves;
  j["pivots"] = e.pivots;
  j["residual_violations"] = e.residual_violations;
  json cats = json::array();
  for (std::size_t u : data.unknown_indices()) cats.push_back(data.categories[u]);
  j["unknown_categories"] = cats;
  json es = json::array();
  for (std::size_t i = 0; i < data.size(); ++i) {
    es.push_back({{"name", data.names[i]},
                  {"estimate", strings(e.unknown[i])},
                  {"low", strings(e.low[i])},
                  {"high", strings(e.high[i])}});
  }
  j["entities"] = es;
  return j;
}

json to_json(const reverse::ControlReport& r) {
  json j = header("control");
  j["mean_abs_error"] = r.mean_abs_error;
  j["baseline_mean"] = r.baseline_mean;
  j["baseline_p95"] = r.baseline_p95;
  j["baseline_min"] = r.baseline_min;
  j["trials"] = r.trials;
  j["seed"] = r.seed;
  j["beats_baseline"] = r.beats_baseline();
  return j;
}

reverse::ControlReport control_from_json(const json& j) {
  expect_kind(j, "control");
  reverse::ControlReport r;
  r.mean_abs_error = j.at("mean_abs_error").get<double>();
  r.baseline_mean = j.at("baseline_mean").get<double>();
  r.baseline_p95 = j.at("baseline_p95").get<double>();
  r.baseline_min = j.at("baseline_min").get<double>();
  r.trials = j.at("trials").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  return r;
}

json to_json(const AnalysisBundle& b) {
  json j = header("bundle");
  j["provenance"] = b.provenance;
  j["scores"] = to_json(b.scores);
  j["reference_weights"] = strings(b.reference_weights);
  j["alpha_mode"] = mode_name(b.alpha_mode);
  json envs = json::array();
  for (const auto& e : b.envelopes) envs.push_back(to_json(e, b.scores, b.alpha_mode));
  j["envelopes"] = envs;
  j["tally"] = b.tally ? to_json(*b.tally, b.scores) : json(nullptr);
  j["coverage"] = to_exact_string(b.coverage);
  j["extra"] = b.extra;
  return j;
}

AnalysisBundle bundle_from_json(const json& j) {
  expect_kind(j, "bundle");
  AnalysisBundle b;
  b.provenance = j.at("provenance").get<std::string>();
  b.scores = scores_from_json(j.at("scores"));
  b.reference_weights = rationals(j.at("reference_weights"));
  b.alpha_mode = mode_from(j.at("alpha_mode").get<std::string>());
  for (const auto& e : j.at("envelopes")) b.envelopes.push_back(envelope_from_json(e));
  if (!j.at("tally").is_null()) {
    b.tally = tally_from_json(j.at("tally"));
    if (b.tally->n != b.scores.size()) throw std::invalid_argument("bundle tally does not match its scores");
  }
  b.coverage = parse_rational(j.at("coverage").get<std::string>());
  b.extra = j.value("extra", json::object());
  return b;
}

json read_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

}  // namespace ordertope::io

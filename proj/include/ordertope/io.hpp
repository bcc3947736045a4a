#pragma once

// CSV ingestion and JSON artifacts. Exact values are written as decimal (or
// fraction) strings so every artifact reads back to the same rationals.

#include "json.hpp"

#include "ordertope/conemeasure.hpp"
#include "ordertope/ordertope.hpp"
#include "ordertope/reverse.hpp"
#include "ordertope/scores.hpp"
#include "ordertope/synth.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace ordertope::io {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

// Splits one CSV record; double quotes protect commas and "" is a quote.
std::vector<std::string> split_csv_line(const std::string& line);

// Header: name, then one column per category. Errors name the source, line
// and column.
ScoreMatrix parse_scores_csv(std::istream& in, const std::string& source = "<input>");
ScoreMatrix read_scores_csv(const std::string& path);
void write_scores_csv(std::ostream& out, const ScoreMatrix& m);
void write_scores_csv(const std::string& path, const ScoreMatrix& m);

// "0.25,0.20,..." to exact rationals.
RationalVector parse_weights(const std::string& text);

// Header: name, overall, then one column per category written as
// "<category>:score" (published) or "<category>:rank" (unpublished). The
// weights follow the header's category order.
reverse::PublishedData parse_published_csv(std::istream& in, const RationalVector& weights,
                                           const std::string& source = "<input>");
reverse::PublishedData read_published_csv(const std::string& path, const RationalVector& weights);
void write_published_csv(std::ostream& out, const reverse::PublishedData& data);
void write_published_csv(const std::string& path, const reverse::PublishedData& data);

// Artifacts. Every to_json() output carries "schema_version" and "kind";
// from_json() checks both.
json to_json(const ScoreMatrix& m);
ScoreMatrix scores_from_json(const json& j);

json to_json(const EnvelopePolytope& env, const ScoreMatrix& m, AlphaMode mode);
EnvelopePolytope envelope_from_json(const json& j);

json to_json(const cone::RankTally& t, const ScoreMatrix& m);
cone::RankTally tally_from_json(const json& j);

// Intervals with their histograms, plus the mean width.
json intervals_json(const cone::RankTally& t, const std::vector<std::string>& names, const Rational& coverage);
json pairwise_json(const cone::RankTally& t, const std::vector<std::string>& names);

json to_json(const synth::ExperimentReport& r);
synth::ExperimentReport experiment_from_json(const json& j);

json to_json(const reverse::Estimate& e, const reverse::PublishedData& data, const reverse::ReverseOptions& options);
json to_json(const reverse::ControlReport& r);
reverse::ControlReport control_from_json(const json& j);

struct AnalysisBundle {
  std::string provenance = "raw";  // raw | estimated | synthetic
  ScoreMatrix scores;
  RationalVector reference_weights;  // optional default functional
  AlphaMode alpha_mode = AlphaMode::linear;
  std::vector<EnvelopePolytope> envelopes;  // k = 1, 2, ...
  std::optional<cone::RankTally> tally;
  Rational coverage{19, 20};
  json extra = json::object();  // free-form config echo
};

json to_json(const AnalysisBundle& b);
AnalysisBundle bundle_from_json(const json& j);

json read_json(const std::string& path);
// Writes j with two-space indentation and a trailing newline.
void write_json(const std::string& path, const json& j);

}  // namespace ordertope::io

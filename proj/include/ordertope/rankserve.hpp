#pragma once

// Read-only queries over a loaded AnalysisBundle. Every method is const and
// touches no shared mutable state, so one service can answer requests from
// any number of threads.

#include "ordertope/io.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace ordertope::serve {

using io::json;

// Carries an HTTP status and a short machine-readable code.
class QueryError : public std::runtime_error {
 public:
  QueryError(int status, std::string code, const std::string& message)
      : std::runtime_error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }
  json body() const { return {{"code", code_}, {"message", what()}}; }

 private:
  int status_;
  std::string code_;
};

class RankService {
 public:
  explicit RankService(io::AnalysisBundle bundle);

  const io::AnalysisBundle& bundle() const { return bundle_; }
  std::size_t entity(const std::string& name) const;  // throws QueryError 404

  // Weights are normalized to sum 1; negative or all-zero weights are
  // rejected. With k the ranking is cut to the top k.
  json rank(const RationalVector& weights, std::optional<std::size_t> k = std::nullopt) const;
  json intervals(std::optional<Rational> coverage = std::nullopt,
                 const std::optional<std::string>& entity = std::nullopt) const;
  json pairwise(const std::string& a, const std::string& b) const;
  json envelope(std::optional<std::size_t> k = std::nullopt) const;
  json meta() const;

 private:
  const cone::RankTally& tally() const;

  io::AnalysisBundle bundle_;
  json cached_intervals_;  // at the bundle's coverage
};

// Query-string helpers; both throw QueryError 400.
RationalVector parse_weight_param(const std::string& text);
std::size_t parse_count_param(const std::string& name, const std::string& text);

struct ServerOptions {
  std::vector<std::string> allow_origins;  // "*" allows any origin
};

// GET /rank /intervals /pairwise /envelope /meta. Errors are JSON bodies
// {code, message}.
void mount(httplib::Server& server, const RankService& service, const ServerOptions& options = {});

}  // namespace ordertope::serve

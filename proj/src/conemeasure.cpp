#include "ordertope/conemeasure.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>

namespace ordertope::cone {

GaussianOrthantSampler::GaussianOrthantSampler(std::size_t dim, std::uint64_t seed, std::uint64_t stream_id)
    : dim_(dim) {
  if (dim == 0) throw std::invalid_argument("sampler dimension must be at least 1");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
  rng_.seed(seq);
}

void GaussianOrthantSampler::sample_into(std::vector<double>& out) {
  out.resize(dim_);
  for (auto& x : out) {
    do {
      x = std::fabs(normal_(rng_));
    } while (x == 0.0);
  }
}

std::vector<double> GaussianOrthantSampler::sample() {
  std::vector<double> out;
  sample_into(out);
  return out;
}

void RankTally::check_conservation() const {
  if (counts.size() != n * n) throw std::logic_error("tally counts have the wrong shape");
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t row = 0;
    std::uint64_t col = 0;
    for (std::size_t r = 0; r < n; ++r) {
      row += counts[i * n + r];
      col += counts[r * n + i];
    }
    if (row != samples) throw std::logic_error("rank counts of entity " + std::to_string(i) + " do not sum to samples");
    if (col != samples) throw std::logic_error("counts at rank " + std::to_string(i + 1) + " do not sum to samples");
  }
  if (!has_pairwise()) return;
  if (pairwise.size() != n * n) throw std::logic_error("pairwise counts have the wrong shape");
  for (std::size_t i = 0; i < n; ++i) {
    if (pairwise[i * n + i] != 0) throw std::logic_error("entity compared with itself");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (pairwise[i * n + j] + pairwise[j * n + i] != samples) {
        throw std::logic_error("pairwise counts of " + std::to_string(i) + " and " + std::to_string(j) + " do not sum to samples");
      }
    }
  }
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ORDERTOPE_THREADS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw std::invalid_argument(std::string("ORDERTOPE_THREADS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void rank_order(const std::vector<std::vector<double>>& rows, const std::vector<std::size_t>& lex_rank,
                const std::vector<double>& c, std::vector<std::size_t>& order) {
  const std::size_t n = rows.size();
  thread_local std::vector<double> score;
  score.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0;
    for (std::size_t j = 0; j < c.size(); ++j) s += c[j] * rows[i][j];
    score[i] = s;
  }
  order.resize(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return lex_rank[a] < lex_rank[b];
  });
}

namespace {

// Splits `samples` into fixed-size streams and runs them on a worker pool.
// Each worker folds its streams into a private State; states are merged in
// worker order, and merge must be commutative for the result to ignore the
// worker count.
template <typename State, typename Init, typename Body, typename Merge>
State run_streams(const TallyOptions& options, Init init, Body body, Merge merge) {
  if (options.samples == 0) throw std::invalid_argument("samples must be at least 1");
  if (options.chunk == 0) throw std::invalid_argument("chunk must be at least 1");
  const std::uint64_t streams = (options.samples + options.chunk - 1) / options.chunk;
  const std::size_t workers = std::min<std::uint64_t>(resolve_threads(options.threads), streams);
  std::vector<State> states;
  for (std::size_t w = 0; w < workers; ++w) states.push_back(init());
  std::atomic<std::uint64_t> next{0};
  auto work = [&](std::size_t w) {
    for (std::uint64_t s = next++; s < streams; s = next++) {
      std::uint64_t count = std::min(options.chunk, options.samples - s * options.chunk);
      body(states[w], s, count);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (std::size_t w = 1; w < workers; ++w) merge(states[0], states[w]);
  return std::move(states[0]);
}

}  // namespace

RankTally tally_rankings(const ScoreMatrix& m, const TallyOptions& options) {
  const std::size_t n = m.size();
  const std::size_t d = m.dim();
  auto rows = m.as_doubles();
  auto lex = lexicographic_ranks(m.rows);
  auto init = [&] {
    RankTally t;
    t.n = n;
    t.counts.assign(n * n, 0);
    if (options.pairwise) t.pairwise.assign(n * n, 0);
    return t;
  };
  auto body = [&](RankTally& t, std::uint64_t stream, std::uint64_t count) {
    GaussianOrthantSampler sampler(d, options.seed, stream);
    std::vector<double> c;
    std::vector<std::size_t> order;
    for (std::uint64_t s = 0; s < count; ++s) {
      sampler.sample_into(c);
      rank_order(rows, lex, c, order);
      for (std::size_t r = 0; r < n; ++r) ++t.counts[order[r] * n + r];
      if (options.pairwise) {
        for (std::size_t a = 0; a < n; ++a) {
          std::uint64_t* row = t.pairwise.data() + order[a] * n;
          for (std::size_t b = a + 1; b < n; ++b) ++row[order[b]];
        }
      }
    }
    t.samples += count;
  };
  auto merge = [](RankTally& into, const RankTally& other) {
    for (std::size_t i = 0; i < into.counts.size(); ++i) into.counts[i] += other.counts[i];
    for (std::size_t i = 0; i < into.pairwise.size(); ++i) into.pairwise[i] += other.pairwise[i];
    into.samples += other.samples;
  };
  RankTally t = run_streams<RankTally>(options, init, body, merge);
  t.seed = options.seed;
  return t;
}

RankingInterval ranking_interval(const std::uint64_t* histogram, std::size_t n, std::uint64_t samples,
                                 const Rational& coverage) {
  if (samples == 0) throw std::invalid_argument("empty tally");
  if (sgn(coverage) <= 0 || coverage > 1) throw std::invalid_argument("coverage must lie in (0, 1]");
  // mass >= coverage * samples, compared exactly
  Rational target = coverage * Rational(Integer(std::to_string(samples), 10));
  std::vector<std::uint64_t> prefix(n + 1, 0);
  for (std::size_t r = 0; r < n; ++r) prefix[r + 1] = prefix[r] + histogram[r];
  for (std::size_t w = 1; w <= n; ++w) {
    for (std::size_t lo = 0; lo + w <= n; ++lo) {
      std::uint64_t mass = prefix[lo + w] - prefix[lo];
      if (Rational(Integer(std::to_string(mass), 10)) >= target) {
        return RankingInterval{lo + 1, lo + w, coverage, mass};
      }
    }
  }
  throw std::logic_error("histogram holds less than the requested coverage");
}

RankingInterval ranking_interval(const RankTally& t, std::size_t entity, const Rational& coverage) {
  if (entity >= t.n) throw std::out_of_range("entity index out of range");
  return ranking_interval(t.counts.data() + entity * t.n, t.n, t.samples, coverage);
}

WidthStats interval_width_stats(const RankTally& t, const Rational& coverage,
                                const std::optional<std::vector<std::size_t>>& subgroup) {
  WidthStats stats;
  double total = 0;
  for (std::size_t i = 0; i < t.n; ++i) {
    std::size_t w = ranking_interval(t, i, coverage).width();
    stats.widths.push_back(w);
    total += static_cast<double>(w);
  }
  stats.mean = t.n ? total / static_cast<double>(t.n) : 0.0;
  if (subgroup) {
    std::vector<bool> in(t.n, false);
    for (std::size_t i : *subgroup) {
      if (i >= t.n) throw std::out_of_range("subgroup index out of range");
      in[i] = true;
    }
    double a = 0, b = 0;
    std::size_t na = 0, nb = 0;
    for (std::size_t i = 0; i < t.n; ++i) {
      if (in[i]) {
        a += static_cast<double>(stats.widths[i]);
        ++na;
      } else {
        b += static_cast<double>(stats.widths[i]);
        ++nb;
      }
    }
    if (na) stats.subgroup_mean = a / static_cast<double>(na);
    if (nb) stats.rest_mean = b / static_cast<double>(nb);
  }
  return stats;
}

double binomial_std_error(std::uint64_t hits, std::uint64_t samples) {
  if (samples == 0) return 0.0;
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  return std::sqrt(p * (1 - p) / static_cast<double>(samples));
}

std::map<RankPrefix, std::uint64_t> prefix_counts(const ScoreMatrix& m, std::size_t k, const TallyOptions& options) {
  if (k == 0 || k > m.size()) throw std::invalid_argument("prefix length must be between 1 and n");
  auto rows = m.as_doubles();
  auto lex = lexicographic_ranks(m.rows);
  using Counts = std::map<RankPrefix, std::uint64_t>;
  auto body = [&](Counts& counts, std::uint64_t stream, std::uint64_t count) {
    GaussianOrthantSampler sampler(m.dim(), options.seed, stream);
    std::vector<double> c;
    std::vector<std::size_t> order;
    for (std::uint64_t s = 0; s < count; ++s) {
      sampler.sample_into(c);
      rank_order(rows, lex, c, order);
      ++counts[RankPrefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k))];
    }
  };
  auto merge = [](Counts& into, const Counts& other) {
    for (const auto& [p, c] : other) into[p] += c;
  };
  return run_streams<Counts>(options, [] { return Counts{}; }, body, merge);
}

PrefixEstimate prefix_probability(const ScoreMatrix& m, const RankPrefix& sigma, const TallyOptions& options) {
  std::vector<bool> seen(m.size(), false);
  for (std::size_t i : sigma) {
    if (i >= m.size() || seen[i]) throw std::invalid_argument("prefix indices must be distinct and in range");
    seen[i] = true;
  }
  auto counts = prefix_counts(m, sigma.size(), options);
  auto it = counts.find(sigma);
  return PrefixEstimate{it == counts.end() ? 0 : it->second, options.samples};
}

PrefixEstimate pairwise_fraction(const RankTally& t, std::size_t a, std::size_t b) {
  if (!t.has_pairwise()) throw std::invalid_argument("tally has no pairwise counts");
  if (a >= t.n || b >= t.n) throw std::out_of_range("entity index out of range");
  if (a == b) throw std::invalid_argument("an entity cannot be compared with itself");
  return PrefixEstimate{t.wins(a, b), t.samples};
}

}  // namespace ordertope::cone

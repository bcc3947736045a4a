#include "doctest.h"

#include "ordertope/conemeasure.hpp"
#include "support/fixtures.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace ordertope;
using namespace ordertope::cone;

namespace {

TallyOptions opts(std::uint64_t samples, std::uint64_t seed, std::size_t threads = 1) {
  TallyOptions o;
  o.samples = samples;
  o.seed = seed;
  o.threads = threads;
  return o;
}

// Shortest, then leftmost, window by scanning every (lo, hi).
// Coverage is twentieths / 20.
std::pair<std::size_t, std::size_t> scan_interval(const std::vector<std::uint64_t>& h, std::uint64_t twentieths,
                                                  std::uint64_t samples) {
  std::size_t best_lo = 0, best_hi = h.size() - 1;
  for (std::size_t lo = 0; lo < h.size(); ++lo) {
    std::uint64_t mass = 0;
    for (std::size_t hi = lo; hi < h.size(); ++hi) {
      mass += h[hi];
      if (mass * 20 >= twentieths * samples) {
        if (hi - lo < best_hi - best_lo) {
          best_lo = lo;
          best_hi = hi;
        }
        break;
      }
    }
  }
  return {best_lo + 1, best_hi + 1};
}

}  // namespace

TEST_CASE("sampler draws strictly positive coordinates deterministically") {
  GaussianOrthantSampler a(7, 42, 3);
  GaussianOrthantSampler b(7, 42, 3);
  GaussianOrthantSampler c(7, 42, 4);
  auto x = a.sample();
  CHECK(x.size() == 7);
  for (double v : x) CHECK(v > 0);
  CHECK(x == b.sample());
  CHECK(x != c.sample());
  CHECK_THROWS(GaussianOrthantSampler(0, 1));
}

TEST_CASE("half-normal mean and exchangeability") {
  GaussianOrthantSampler one(1, 9);
  double sum = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) sum += one.sample()[0];
  CHECK(std::fabs(sum / n - std::sqrt(2.0 / M_PI)) < 0.01);

  GaussianOrthantSampler two(2, 10);
  int first = 0;
  for (int i = 0; i < n; ++i) {
    auto c = two.sample();
    first += c[0] > c[1];
  }
  double sigma = std::sqrt(0.25 / n);
  CHECK(std::fabs(static_cast<double>(first) / n - 0.5) < 3 * sigma);
}

TEST_CASE("symmetric pair splits the top spot evenly") {
  auto m = fixtures::matrix({{1, 0}, {0, 1}});
  auto t = tally_rankings(m, opts(100000, 5));
  t.check_conservation();
  double f = static_cast<double>(t.count(0, 0)) / 100000.0;
  CHECK(std::fabs(f - 0.5) < 3 * std::sqrt(0.25 / 100000.0));
  auto pe = prefix_probability(m, {1}, opts(100000, 5));
  CHECK(std::fabs(pe.fraction() - 0.5) < 3 * pe.std_error() + 1e-12);
}

TEST_CASE("dominance is absolute") {
  auto m = fixtures::matrix({{3, 2, 5}, {1, 2, 4}, {0, 9, 1}});
  auto t = tally_rankings(m, opts(5000, 1));
  CHECK(t.wins(0, 1) == t.samples);
  CHECK(t.wins(1, 0) == 0);
  CHECK(pairwise_fraction(t, 0, 1).fraction() == 1.0);
  CHECK_THROWS(pairwise_fraction(t, 2, 2));
  CHECK(prefix_probability(m, {1}, opts(5000, 1)).hits == 0);
}

TEST_CASE("tally matches exact rankings of the same functionals") {
  std::mt19937_64 rng(8);
  auto m = fixtures::random_matrix(rng, 9, 3, 0, 10, 1);  // integer grid, so ties occur
  TallyOptions o = opts(250, 77);
  o.chunk = 100;
  auto t = tally_rankings(m, o);
  std::vector<std::uint64_t> expect(81, 0);
  for (std::uint64_t stream = 0; stream < 3; ++stream) {
    GaussianOrthantSampler s(3, 77, stream);
    for (int i = 0; i < (stream < 2 ? 100 : 50); ++i) {
      auto c = s.sample();
      RationalVector cq(c.begin(), c.end());
      auto order = top_k_prefix(m, cq, 9);
      for (std::size_t r = 0; r < 9; ++r) ++expect[order[r] * 9 + r];
    }
  }
  CHECK(t.counts == expect);
}

TEST_CASE("tally is reproducible and independent of the worker count") {
  std::mt19937_64 rng(12);
  auto m = fixtures::random_matrix(rng, 15, 4, 0, 100, 10);
  auto a = tally_rankings(m, opts(30000, 3, 1));
  auto b = tally_rankings(m, opts(30000, 3, 3));
  auto c = tally_rankings(m, opts(30000, 3, 1));
  auto d = tally_rankings(m, opts(30000, 4, 1));
  CHECK(a.counts == b.counts);
  CHECK(a.pairwise == b.pairwise);
  CHECK(a.counts == c.counts);
  CHECK(a.counts != d.counts);
  a.check_conservation();
  CHECK(a.seed == 3);
}

TEST_CASE("ranking interval examples") {
  std::vector<std::uint64_t> h = {60, 35, 5};
  auto ri = ranking_interval(h.data(), 3, 100, Rational(19, 20));
  CHECK(ri.lo == 1);
  CHECK(ri.hi == 2);

  std::vector<std::uint64_t> uniform(20, 5);
  ri = ranking_interval(uniform.data(), 20, 100, Rational(19, 20));
  CHECK(ri.lo == 1);
  CHECK(ri.hi == 19);

  std::vector<std::uint64_t> point = {0, 0, 7, 0};
  ri = ranking_interval(point.data(), 4, 7, Rational(1));
  CHECK(ri.width() == 1);
  CHECK(ri.lo == 3);

  CHECK_THROWS(ranking_interval(h.data(), 3, 100, Rational(0)));
  CHECK_THROWS(ranking_interval(h.data(), 3, 100, Rational(3, 2)));
}

TEST_CASE("ranking intervals are minimal and leftmost") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 1 + rng() % 12;
    std::vector<std::uint64_t> h(n);
    std::uint64_t total = 0;
    for (auto& x : h) {
      x = rng() % 4 == 0 ? 0 : rng() % 50;
      total += x;
    }
    if (total == 0) continue;
    std::uint64_t cov = 1 + rng() % 20;
    auto ri = ranking_interval(h.data(), n, total, Rational(static_cast<long>(cov), 20));
    auto [lo, hi] = scan_interval(h, cov, total);
    CHECK(ri.lo == lo);
    CHECK(ri.hi == hi);
  }
}

TEST_CASE("width statistics") {
  auto m = fixtures::matrix({{3, 3}, {2, 2}, {1, 1}});
  auto t = tally_rankings(m, opts(2000, 2));
  auto s = interval_width_stats(t, Rational(19, 20), std::vector<std::size_t>{0});
  CHECK(s.mean == 1.0);
  CHECK(s.subgroup_mean == 1.0);
  CHECK(s.rest_mean == 1.0);

  auto sym = fixtures::matrix({{1, 0}, {0, 1}});
  auto ts = tally_rankings(sym, opts(2000, 2));
  auto w = interval_width_stats(ts, Rational(19, 20));
  CHECK(w.widths == std::vector<std::size_t>{2, 2});
}

TEST_CASE("sampled prefixes agree with the envelope") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 4; ++trial) {
    auto m = fixtures::random_matrix(rng, 6, 3, 0, 40, 4);
    auto env = nonneg_envelope(m, OrdertopeConfig::make(2));
    std::set<RankPrefix> vertices;
    for (const auto& v : env.vertices) vertices.insert(v.prefix);
    auto counts = prefix_counts(m, 2, opts(100000, 17 + trial));
    std::uint64_t total = 0;
    for (const auto& [p, c] : counts) {
      total += c;
      CHECK(certify_reasonable(m, p).has_value());
      if (c > 1000) CHECK(vertices.count(p) == 1);
    }
    CHECK(total == 100000);
  }
}

TEST_CASE("thread count resolution") {
  CHECK(resolve_threads(3) == 3);
  CHECK(resolve_threads(0) >= 1);
}

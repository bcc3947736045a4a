#include "ordertope/synth.hpp"

#include "ordertope/conemeasure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string>

namespace ordertope::synth {

namespace {

constexpr std::uint32_t kDataDomain = 0x5d47a1u;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string padded(const std::string& prefix, std::size_t i, std::size_t total) {
  std::string digits = std::to_string(i + 1);
  std::size_t width = std::to_string(total).size();
  return prefix + std::string(width - digits.size(), '0') + digits;
}

std::vector<double> ranks_of(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(x.size());
  for (std::size_t pos = 0; pos < order.size();) {
    std::size_t end = pos;
    while (end + 1 < order.size() && x[order[end + 1]] == x[order[pos]]) ++end;
    double avg = (static_cast<double>(pos) + static_cast<double>(end)) / 2.0 + 1.0;
    for (std::size_t q = pos; q <= end; ++q) r[order[q]] = avg;
    pos = end + 1;
  }
  return r;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

void SynthConfig::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  if (n < 2) throw std::invalid_argument("n must be at least 2");
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  if (trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (samples_per_trial < 1) throw std::invalid_argument("samples_per_trial must be at least 1");
  if (sgn(coverage) <= 0 || coverage > 1) throw std::invalid_argument("coverage must lie in (0, 1]");
}

ScoreMatrix generate(const SynthConfig& cfg, std::size_t trial) {
  cfg.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), kDataDomain};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal;
  ScoreMatrix m;
  std::set<RationalVector> seen;
  while (m.rows.size() < cfg.n) {
    double t = normal(rng);
    RationalVector row;
    for (std::size_t j = 0; j < cfg.d; ++j) {
      double e = normal(rng);
      row.emplace_back(cfg.p * t + (1.0 - cfg.p) * e);
    }
    if (!seen.insert(row).second) continue;
    m.rows.push_back(std::move(row));
  }
  for (std::size_t i = 0; i < cfg.n; ++i) m.names.push_back(padded("entity_", i, cfg.n));
  for (std::size_t j = 0; j < cfg.d; ++j) m.categories.push_back(padded("cat_", j, cfg.d));
  return m;
}

std::uint64_t trial_seed(std::uint64_t seed, std::size_t trial) { return splitmix(seed ^ splitmix(trial)); }

double mean_spearman(const ScoreMatrix& m) {
  auto rows = m.as_doubles();
  std::vector<std::vector<double>> ranks;
  for (std::size_t j = 0; j < m.dim(); ++j) {
    std::vector<double> col;
    for (const auto& r : rows) col.push_back(r[j]);
    ranks.push_back(ranks_of(col));
  }
  double total = 0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < ranks.size(); ++a) {
    for (std::size_t b = a + 1; b < ranks.size(); ++b) {
      total += pearson(ranks[a], ranks[b]);
      ++pairs;
    }
  }
  return pairs ? total / static_cast<double>(pairs) : 1.0;
}

ExperimentReport run_experiment(const SynthConfig& cfg) {
  cfg.validate();
  ExperimentReport report;
  report.config = cfg;
  for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
    ScoreMatrix m = generate(cfg, trial);
    cone::TallyOptions opt;
    opt.samples = cfg.samples_per_trial;
    opt.seed = trial_seed(cfg.seed, trial);
    opt.pairwise = false;
    opt.threads = cfg.threads;
    auto tally = cone::tally_rankings(m, opt);
    report.trial_mean_widths.push_back(cone::interval_width_stats(tally, cfg.coverage).mean);
    report.trial_spearman.push_back(mean_spearman(m));
  }
  const auto& w = report.trial_mean_widths;
  report.overall_mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  report.min = *std::min_element(w.begin(), w.end());
  report.max = *std::max_element(w.begin(), w.end());
  const auto& s = report.trial_spearman;
  report.mean_spearman = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
  return report;
}

TrendReport width_trend(const SynthConfig& cfg, const std::vector<double>& ps) {
  TrendReport trend;
  trend.ps = ps;
  for (double p : ps) {
    SynthConfig c = cfg;
    c.p = p;
    trend.means.push_back(run_experiment(c).overall_mean);
  }
  for (std::size_t i = 0; i + 1 < trend.means.size(); ++i) {
    if (trend.ps[i + 1] > trend.ps[i] && trend.means[i + 1] > trend.means[i]) ++trend.inversions;
  }
  return trend;
}

}  // namespace ordertope::synth

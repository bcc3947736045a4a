#include "CLI11.hpp"

#include "ordertope/cli.hpp"
#include "ordertope/io.hpp"

#include <chrono>
#include <fstream>
#include <functional>
#include <map>

namespace ordertope::cli {

namespace {

using io::json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

AlphaMode alpha_mode(const std::string& s) {
  if (s == "linear") return AlphaMode::linear;
  if (s == "geometric") return AlphaMode::geometric;
  throw CLI::ValidationError("--alpha-mode", "expected linear or geometric, got '" + s + "'");
}

Rational exact_flag(const std::string& flag, const std::string& text) {
  try {
    return parse_rational(text);
  } catch (const std::exception&) {
    throw CLI::ValidationError(flag, "malformed number '" + text + "'");
  }
}

std::vector<std::string> tally_names(const json& j) {
  if (!j.contains("names")) throw std::invalid_argument("tally file has no entity names");
  return j.at("names").get<std::vector<std::string>>();
}

std::string flag_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Expands `--config FILE` into long flags, skipping any flag already given.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 == args.size()) throw CLI::ArgumentMismatch("--config needs a file");
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
    }
  }
  if (path.empty()) return out;
  json cfg = io::read_json(path);
  if (!cfg.is_object()) throw std::invalid_argument(path + ": config must be a JSON object");
  auto given = [&](const std::string& flag) {
    for (const auto& a : out) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };
  for (const auto& [key, value] : cfg.items()) {
    const std::string flag = "--" + key;
    if (given(flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        out.push_back(flag);
        out.push_back(flag_value(v));
      }
    } else {
      out.push_back(flag);
      out.push_back(flag_value(value));
    }
  }
  return out;
}

struct EnvelopeArgs {
  std::string scores, out, mode = "linear", sentinel;
  std::size_t k = 1;
};

struct SampleArgs {
  std::string scores, out;
  std::uint64_t samples = 100000, seed = 1;
  std::size_t threads = 0;
  bool no_pairwise = false;
};

struct IntervalArgs {
  std::string tally, out, coverage = "0.95";
};

struct ReverseArgs {
  std::string published, weights, out, report, control;
  std::string epsilon = "0.001", lower = "0", upper = "100";
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  int decimals = -1;
};

struct SimulateArgs {
  std::string out, coverage = "0.95";
  synth::SynthConfig cfg;
};

struct BundleArgs {
  std::string scores, out, provenance = "raw", tally, coverage = "0.95", weights, mode = "linear";
  std::vector<std::string> envelopes;
  std::vector<std::size_t> ks;
};

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Envelope, sampling and reverse-estimation tools for weighted rankings", "ordertope"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  std::function<void()> action;

  EnvelopeArgs ea;
  auto* env_cmd = app.add_subcommand("envelope", "Non-negative envelope of the k-ordertope");
  env_cmd->add_option("--scores", ea.scores, "Score CSV")->required()->check(CLI::ExistingFile);
  env_cmd->add_option("--k", ea.k, "Prefix length")->required()->check(CLI::PositiveNumber);
  env_cmd->add_option("--alpha-mode", ea.mode, "linear (k..1) or geometric (2^k..2)");
  env_cmd->add_option("--sentinel", ea.sentinel, "Sentinel magnitude N (default from the data)");
  env_cmd->add_option("--out", ea.out, "Output JSON")->required();
  env_cmd->callback([&] {
    action = [&] {
      auto m = io::read_scores_csv(ea.scores);
      AlphaMode mode = alpha_mode(ea.mode);
      auto cfg = OrdertopeConfig::make(ea.k, mode);
      if (!ea.sentinel.empty()) cfg.sentinel_magnitude = exact_flag("--sentinel", ea.sentinel);
      auto t0 = std::chrono::steady_clock::now();
      auto env = nonneg_envelope(m, cfg);
      double secs = seconds_since(t0);
      io::write_json(ea.out, io::to_json(env, m, mode));
      out << "k=" << ea.k << " vertices=" << env.vertices.size() << " facets=" << env.facets.size()
          << " oracle_queries=" << env.oracle_queries << " seconds=" << secs << '\n';
    };
  });

  SampleArgs sa;
  auto* sample_cmd = app.add_subcommand("sample", "Rank tally over random non-negative weights");
  sample_cmd->add_option("--scores", sa.scores, "Score CSV")->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--samples", sa.samples, "Number of weight vectors")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", sa.seed, "RNG seed");
  sample_cmd->add_option("--threads", sa.threads, "Worker threads (0: ORDERTOPE_THREADS or all cores)");
  sample_cmd->add_flag("--no-pairwise", sa.no_pairwise, "Skip the pairwise matrix");
  sample_cmd->add_option("--out", sa.out, "Output JSON")->required();
  sample_cmd->callback([&] {
    action = [&] {
      auto m = io::read_scores_csv(sa.scores);
      cone::TallyOptions o;
      o.samples = sa.samples;
      o.seed = sa.seed;
      o.threads = sa.threads;
      o.pairwise = !sa.no_pairwise;
      auto t0 = std::chrono::steady_clock::now();
      auto t = cone::tally_rankings(m, o);
      double secs = seconds_since(t0);
      io::write_json(sa.out, io::to_json(t, m));
      out << "seed=" << t.seed << " samples=" << t.samples << " threads=" << cone::resolve_threads(sa.threads)
          << " seconds=" << secs << '\n';
    };
  });

  IntervalArgs ia;
  auto* int_cmd = app.add_subcommand("intervals", "Shortest ranking intervals from a tally");
  int_cmd->add_option("--tally", ia.tally, "Tally JSON")->required()->check(CLI::ExistingFile);
  int_cmd->add_option("--coverage", ia.coverage, "Coverage in (0, 1]");
  int_cmd->add_option("--out", ia.out, "Output JSON")->required();
  int_cmd->callback([&] {
    action = [&] {
      json j = io::read_json(ia.tally);
      auto t = io::tally_from_json(j);
      auto iv = io::intervals_json(t, tally_names(j), exact_flag("--coverage", ia.coverage));
      io::write_json(ia.out, iv);
      out << "coverage=" << ia.coverage << " mean_width=" << iv["mean_width"].get<double>() << '\n';
    };
  });

  IntervalArgs pa;
  auto* pair_cmd = app.add_subcommand("pairwise", "Pairwise win fractions from a tally");
  pair_cmd->add_option("--tally", pa.tally, "Tally JSON")->required()->check(CLI::ExistingFile);
  pair_cmd->add_option("--out", pa.out, "Output JSON")->required();
  pair_cmd->callback([&] {
    action = [&] {
      json j = io::read_json(pa.tally);
      io::write_json(pa.out, io::pairwise_json(io::tally_from_json(j), tally_names(j)));
    };
  });

  ReverseArgs ra;
  auto* rev_cmd = app.add_subcommand("reverse", "Estimate unpublished category scores");
  rev_cmd->add_option("--published", ra.published, "Published CSV")->required()->check(CLI::ExistingFile);
  rev_cmd->add_option("--weights", ra.weights, "Comma-separated weights in header order")->required();
  rev_cmd->add_option("--epsilon", ra.epsilon, "Minimum gap between distinct ranks");
  rev_cmd->add_option("--lower", ra.lower, "Lower score bound");
  rev_cmd->add_option("--upper", ra.upper, "Upper score bound");
  rev_cmd->add_option("--out", ra.out, "Output score CSV")->required();
  rev_cmd->add_option("--report", ra.report, "Estimate report JSON");
  rev_cmd->add_option("--decimals", ra.decimals, "Round written estimates to this many places (default exact)")
      ->check(CLI::Range(0, 30));
  auto* control = rev_cmd->add_option("--control", ra.control, "Published category to hide and check against");
  rev_cmd->add_option("--trials", ra.trials, "Baseline trials for --control")->needs(control);
  rev_cmd->add_option("--seed", ra.seed, "Baseline seed for --control")->needs(control);
  rev_cmd->callback([&] {
    action = [&] {
      reverse::ReverseOptions opt;
      opt.epsilon = exact_flag("--epsilon", ra.epsilon);
      opt.lower = exact_flag("--lower", ra.lower);
      opt.upper = exact_flag("--upper", ra.upper);
      auto data = io::read_published_csv(ra.published, io::parse_weights(ra.weights));
      std::optional<std::size_t> control_col;
      RationalVector truth;
      if (!ra.control.empty()) {
        auto it = std::find(data.categories.begin(), data.categories.end(), ra.control);
        if (it == data.categories.end()) throw CLI::ValidationError("--control", "no category '" + ra.control + "'");
        control_col = static_cast<std::size_t>(it - data.categories.begin());
        if (!data.known[*control_col]) {
          throw CLI::ValidationError("--control", "'" + ra.control + "' must be a published score column");
        }
        truth = reverse::hide_category(data, *control_col);
      }
      auto t0 = std::chrono::steady_clock::now();
      auto est = reverse::estimate_scores(data, opt);
      double secs = seconds_since(t0);
      if (ra.decimals >= 0) {
        for (auto& row : est.scores.rows) {
          for (auto u : data.unknown_indices()) row[u] = parse_rational(to_fixed_string(row[u], ra.decimals));
        }
        est.scores.validate();
      }
      io::write_scores_csv(ra.out, est.scores);
      json report = io::to_json(est, data, opt);
      out << "lp_solves=" << est.lp_solves << " pivots=" << est.pivots
          << " violations=" << est.residual_violations.size() << " seconds=" << secs << '\n';
      if (control_col) {
        RationalVector estimate;
        for (const auto& row : est.scores.rows) estimate.push_back(row[*control_col]);
        auto cr = reverse::validate_control(truth, estimate, ra.trials, ra.seed);
        report["control"] = io::to_json(cr);
        report["control"]["category"] = ra.control;
        out << "control=" << ra.control << " seed=" << cr.seed << " error=" << cr.mean_abs_error
            << " baseline_p95=" << cr.baseline_p95 << " beats_baseline=" << (cr.beats_baseline() ? "yes" : "no")
            << '\n';
      }
      if (!ra.report.empty()) io::write_json(ra.report, report);
    };
  });

  SimulateArgs sm;
  auto* sim_cmd = app.add_subcommand("simulate", "Synthetic interval-width experiment");
  sim_cmd->add_option("--n", sm.cfg.n, "Entities");
  sim_cmd->add_option("--d", sm.cfg.d, "Categories");
  sim_cmd->add_option("--p", sm.cfg.p, "Weight of the shared component");
  sim_cmd->add_option("--trials", sm.cfg.trials, "Trials");
  sim_cmd->add_option("--samples", sm.cfg.samples_per_trial, "Weight vectors per trial");
  sim_cmd->add_option("--coverage", sm.coverage, "Interval coverage");
  sim_cmd->add_option("--seed", sm.cfg.seed, "RNG seed");
  sim_cmd->add_option("--threads", sm.cfg.threads, "Worker threads");
  sim_cmd->add_option("--out", sm.out, "Output JSON")->required();
  sim_cmd->callback([&] {
    action = [&] {
      sm.cfg.coverage = exact_flag("--coverage", sm.coverage);
      sm.cfg.validate();
      auto t0 = std::chrono::steady_clock::now();
      auto r = synth::run_experiment(sm.cfg);
      double secs = seconds_since(t0);
      io::write_json(sm.out, io::to_json(r));
      out << "seed=" << sm.cfg.seed << " overall_mean_width=" << r.overall_mean << " min=" << r.min
          << " max=" << r.max << " seconds=" << secs << '\n';
    };
  });

  BundleArgs ba;
  auto* bundle_cmd = app.add_subcommand("bundle", "Assemble an analysis bundle for the query service");
  bundle_cmd->add_option("--scores", ba.scores, "Score CSV")->required()->check(CLI::ExistingFile);
  bundle_cmd->add_option("--provenance", ba.provenance, "raw, estimated or synthetic")
      ->check(CLI::IsMember({"raw", "estimated", "synthetic"}));
  bundle_cmd->add_option("--envelope", ba.envelopes, "Envelope JSON (repeatable)")->check(CLI::ExistingFile);
  bundle_cmd->add_option("--k", ba.ks, "Compute the envelope for this k (repeatable)")->check(CLI::PositiveNumber);
  bundle_cmd->add_option("--alpha-mode", ba.mode, "Alpha mode for --k");
  bundle_cmd->add_option("--tally", ba.tally, "Tally JSON")->check(CLI::ExistingFile);
  bundle_cmd->add_option("--coverage", ba.coverage, "Default interval coverage");
  bundle_cmd->add_option("--weights", ba.weights, "Reference weights");
  bundle_cmd->add_option("--out", ba.out, "Output JSON")->required();
  bundle_cmd->callback([&] {
    action = [&] {
      io::AnalysisBundle b;
      b.provenance = ba.provenance;
      b.scores = io::read_scores_csv(ba.scores);
      b.alpha_mode = alpha_mode(ba.mode);
      b.coverage = exact_flag("--coverage", ba.coverage);
      if (!ba.weights.empty()) {
        b.reference_weights = io::parse_weights(ba.weights);
        if (b.reference_weights.size() != b.scores.dim()) {
          throw std::invalid_argument("--weights needs one entry per category");
        }
      }
      json config = json::object();
      for (const auto& path : ba.envelopes) {
        json j = io::read_json(path);
        if (j.at("names") != json(b.scores.names)) throw std::invalid_argument(path + ": entities differ from --scores");
        b.alpha_mode = alpha_mode(j.at("config").at("alpha_mode").get<std::string>());
        b.envelopes.push_back(io::envelope_from_json(j));
      }
      for (std::size_t k : ba.ks) b.envelopes.push_back(nonneg_envelope(b.scores, OrdertopeConfig::make(k, b.alpha_mode)));
      std::sort(b.envelopes.begin(), b.envelopes.end(),
                [](const auto& x, const auto& y) { return x.config.k < y.config.k; });
      if (!ba.tally.empty()) {
        json j = io::read_json(ba.tally);
        if (tally_names(j) != b.scores.names) throw std::invalid_argument(ba.tally + ": entities differ from --scores");
        b.tally = io::tally_from_json(j);
        config["tally_seed"] = b.tally->seed;
        config["tally_samples"] = b.tally->samples;
      }
      config["scores"] = ba.scores;
      b.extra = config;
      io::write_json(ba.out, io::to_json(b));
      out << "entities=" << b.scores.size() << " envelopes=" << b.envelopes.size()
          << " tally=" << (b.tally ? "yes" : "no") << '\n';
    };
  });

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  std::vector<const char*> argv{"ordertope"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (action) action();
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const reverse::Infeasible& e) {
    err << "error: " << e.what() << '\n';
    for (const auto& c : e.constraints()) err << "  " << c << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace ordertope::cli

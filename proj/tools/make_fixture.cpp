// Writes a synthetic full score matrix for a list of entity names and the
// published view of it. Scores come from the shared-component model, are
// mapped to [0, 100] with one decimal, and names are handed out in order of
// the weighted overall score so the first name ranks first.

#include "CLI11.hpp"

#include "ordertope/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

using namespace ordertope;

int main(int argc, char** argv) {
  CLI::App app{"Synthetic scores and published data for a name list", "make_fixture"};
  std::string names_path, truth_path, published_path, weights_text, known_text;
  std::string categories_text = "peer,retention,graduation,faculty,selectivity,financial,alumni";
  synth::SynthConfig cfg;
  double center = 50, spread = 15;
  app.add_option("--names", names_path, "One entity name per line")->required()->check(CLI::ExistingFile);
  app.add_option("--categories", categories_text, "Comma-separated category names");
  app.add_option("--weights", weights_text, "Weights in category order")->required();
  app.add_option("--known", known_text, "Comma-separated published categories")->required();
  app.add_option("--p", cfg.p, "Weight of the shared component");
  app.add_option("--seed", cfg.seed, "RNG seed");
  app.add_option("--center", center, "Score of a standard-normal zero");
  app.add_option("--spread", spread, "Score units per standard deviation");
  app.add_option("--truth", truth_path, "Output score CSV")->required();
  app.add_option("--published", published_path, "Output published CSV")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<std::string> names;
    std::ifstream in(names_path);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) names.push_back(line);
    }
    auto categories = io::split_csv_line(categories_text);
    auto weights = io::parse_weights(weights_text);
    auto known_names = io::split_csv_line(known_text);
    cfg.n = names.size();
    cfg.d = categories.size();
    cfg.validate();

    ScoreMatrix raw = synth::generate(cfg, 0);
    ScoreMatrix m;
    m.categories = categories;
    for (const auto& row : raw.rows) {
      RationalVector r;
      for (const auto& x : row) {
        double v = std::clamp(center + spread * x.get_d(), 0.0, 100.0);
        r.emplace_back(std::lround(v * 10), 10);
      }
      m.rows.push_back(r);
    }
    m.names.assign(m.rows.size(), "");
    auto order = top_k_prefix(m, weights, m.size());
    ScoreMatrix named;
    named.categories = categories;
    for (std::size_t r = 0; r < order.size(); ++r) {
      named.names.push_back(names[r]);
      named.rows.push_back(m.rows[order[r]]);
    }
    named.validate();

    std::vector<bool> known(categories.size(), false);
    for (const auto& k : known_names) {
      auto it = std::find(categories.begin(), categories.end(), k);
      if (it == categories.end()) throw std::invalid_argument("unknown category '" + k + "'");
      known[static_cast<std::size_t>(it - categories.begin())] = true;
    }
    io::write_scores_csv(truth_path, named);
    io::write_published_csv(published_path, reverse::publish(named, weights, known));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

#include "pkgpulse/urgency.hpp"

#include <cmath>

#include "pkgpulse/error.hpp"
#include "pkgpulse/parallel.hpp"

namespace pkgpulse {

std::string to_string(FeatureMode mode) { return mode == FeatureMode::Auto ? "auto" : "auto+depn"; }

std::optional<FeatureMode> parse_feature_mode(std::string_view text) {
  if (text == "auto") return FeatureMode::Auto;
  if (text == "auto+depn") return FeatureMode::AutoDepn;
  return std::nullopt;
}

std::vector<std::string> eligible_packages(const Corpus& corpus, int t, int window) {
  const Snapshot& snap = corpus.at(t);
  const auto w = clamp_window(corpus, t - window, t - 1);
  std::vector<std::string> out;
  if (!w) return out;
  for (const auto& name : snap.package_names()) {
    std::size_t total = 0;
    for (int tau = w->first; tau <= w->second && total == 0; ++tau) total += corpus.at(tau).bug_count(name);
    if (total > 0) out.push_back(name);
  }
  return out;
}

FeatureVector urgency_features(const Corpus& corpus, std::string_view package, int t, FeatureMode mode,
                               const UrgencyFeatureOptions& options) {
  FeatureVector f = urgency_auto_features(corpus, package, t);
  if (mode == FeatureMode::AutoDepn) f.append(urgency_dep_features(corpus, package, t, options));
  return f;
}

namespace {

void append_rows(const Corpus& corpus, int tau, const std::vector<std::string>& packages, const UrgencyConfig& cfg,
                 DesignMatrix& X) {
  std::vector<FeatureVector> rows(packages.size());
  parallel_for(packages.size(),
               [&](std::size_t i) { rows[i] = urgency_features(corpus, packages[i], tau, cfg.mode, cfg.dep_options); });
  for (const auto& r : rows) X.append(r);
}

std::optional<double> guarded(double (*fn)(std::span<const double>, std::span<const double>),
                              std::span<const double> a, std::span<const double> b) {
  try {
    const double v = fn(a, b);
    if (std::isnan(v)) return std::nullopt;
    return v;
  } catch (const UndefinedCorrelation&) {
    return std::nullopt;
  }
}

void at_k_into(std::span<const double> gold, std::span<const double> pred, std::size_t k, TopKBy by,
               std::optional<double>& rho, std::optional<double>& tau) {
  if (gold.size() < k || k < 2) return;
  const auto idx = top_k_indices(by == TopKBy::Gold ? gold : pred, k);
  std::vector<double> g, p;
  for (auto i : idx) {
    g.push_back(gold[i]);
    p.push_back(pred[i]);
  }
  rho = guarded(&spearman_rho, g, p);
  tau = guarded(&kendall_tau, g, p);
}

}  // namespace

TrainingSet build_training_set(const Corpus& corpus, int from, int to, const UrgencyConfig& config) {
  TrainingSet ts;
  for (int tau = from; tau <= to; ++tau) {
    const auto pkgs = eligible_packages(corpus, tau, config.filter_window);
    append_rows(corpus, tau, pkgs, config, ts.X);
    const Snapshot& snap = corpus.at(tau);
    for (const auto& p : pkgs) {
      ts.y.push_back(static_cast<double>(snap.bug_count(p)));
      ts.packages.push_back(p);
      ts.horizons.push_back(tau);
    }
  }
  return ts;
}

UrgencyRun run_urgency(const Corpus& corpus, int t, const UrgencyConfig& config) {
  if (!corpus.has_index(t)) throw RangeError("test distribution index " + std::to_string(t) + " not in corpus");
  if (config.k_train < 1) throw std::invalid_argument("k_train must be at least 1");
  if (!corpus.has_index(t - config.k_train - 2))
    throw InsufficientHistory("need " + std::to_string(config.k_train + 2) + " distributions before the test one");

  UrgencyRun run;
  run.test_distribution = corpus.at(t).distribution();
  run.config = config;
  const std::vector<ForestHyper> grid = config.grid.empty() ? default_forest_grid() : config.grid;

  const int first = t - config.k_train;
  run.chosen = grid.front();
  if (config.grid_search && grid.size() > 1 && config.k_train >= 2) {
    const TrainingSet inner = build_training_set(corpus, first, t - 2, config);
    const TrainingSet valid = build_training_set(corpus, t - 1, t - 1, config);
    if (!inner.y.empty() && !valid.y.empty()) {
      auto result = grid_search(grid, inner.X, inner.y, valid.X, valid.y);
      run.chosen = result.best;
      run.grid_table = std::move(result.table);
    }
  }

  const TrainingSet train = build_training_set(corpus, first, t - 1, config);
  if (train.y.empty()) throw InsufficientHistory("no eligible packages in the training horizons");
  run.training_rows = train.y.size();
  run.feature_names = train.X.names();
  run.forest = forest_fit(train.X, train.y, run.chosen);

  run.packages = eligible_packages(corpus, t, config.filter_window);
  DesignMatrix test_X;
  append_rows(corpus, t, run.packages, config, test_X);
  run.predictions = run.forest.predict(test_X);
  const Snapshot& snap = corpus.at(t);
  for (const auto& p : run.packages) run.gold.push_back(static_cast<double>(snap.bug_count(p)));

  if (!run.packages.empty()) {
    run.gold_ranks = average_ranks(run.gold, true);
    run.predicted_ranks = average_ranks(run.predictions, true);
    for (std::size_t i = 0; i < run.packages.size(); ++i)
      run.rank_errors.push_back(std::abs(run.gold_ranks[i] - run.predicted_ranks[i]));
  }
  if (run.packages.size() >= 2) {
    run.rho = guarded(&spearman_rho, run.gold, run.predictions);
    run.tau = guarded(&kendall_tau, run.gold, run.predictions);
  }
  at_k_into(run.gold, run.predictions, config.top_k, TopKBy::Gold, run.rho_at_k, run.tau_at_k);
  at_k_into(run.gold, run.predictions, config.top_k, TopKBy::Predicted, run.rho_at_k_pred, run.tau_at_k_pred);
  return run;
}

}  // namespace pkgpulse

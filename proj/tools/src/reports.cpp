#include "reports.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "config.hpp"
#include "pkgpulse/metrics.hpp"

namespace pkgpulse::cli {

using nlohmann::json;

json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

namespace {

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json mwu_json(const MannWhitneyResult& r) {
  return {{"u", r.u}, {"p_two_sided", number_or_null(r.p_two_sided)}, {"exact", r.exact}};
}

json distribution_json(const DistributionId& d) { return {{"name", d.name}, {"index", d.index}}; }

json summary_json(const RecommendationSummary& s) {
  return {{"queries", s.queries},
          {"with_candidates", s.with_candidates},
          {"coverage", s.coverage},
          {"mrr", s.mrr},
          {"mrr_covered", s.mrr_covered}};
}

json query_rows(std::span<const Recommendation> recs) {
  json rows = json::array();
  for (const auto& r : recs) {
    rows.push_back({{"package", r.package},
                    {"gold", std::vector<std::string>(r.gold.begin(), r.gold.end())},
                    {"candidates", r.ranked.items.size()},
                    {"best_position", r.best_position ? json(*r.best_position) : json(nullptr)},
                    {"reciprocal_rank", r.best_position ? 1.0 / static_cast<double>(*r.best_position) : 0.0}});
  }
  return rows;
}

std::string recommendations_tsv(std::span<const Recommendation> recs) {
  std::ostringstream os;
  os.precision(17);
  os << "package\trank\tdeveloper\tscore\n";
  for (const auto& r : recs)
    for (const auto& item : r.ranked.items)
      os << r.package << '\t' << item.position << '\t' << item.id << '\t' << item.score << '\n';
  return os.str();
}

}  // namespace

RunFiles urgency_report(const Corpus& corpus, const UrgencyRun& run, const json& config,
                        const std::string& dataset_id) {
  json j;
  j["kind"] = "urgency";
  j["config"] = config;
  j["dataset"] = dataset_id;
  j["test_distribution"] = distribution_json(run.test_distribution);
  j["eligible_packages"] = run.packages.size();
  j["training_rows"] = run.training_rows;
  j["feature_names"] = run.feature_names;
  j["chosen_hyperparameters"] = hyper_to_json(run.chosen);
  json grid = json::array();
  for (const auto& e : run.grid_table) {
    json row = hyper_to_json(e.hyper);
    row["score"] = number_or_null(e.score);
    grid.push_back(std::move(row));
  }
  j["grid"] = std::move(grid);
  j["metrics"] = {{"k", run.config.top_k},
                  {"rho", number_or_null(run.rho)},
                  {"tau", number_or_null(run.tau)},
                  {"rho_at_k", number_or_null(run.rho_at_k)},
                  {"tau_at_k", number_or_null(run.tau_at_k)},
                  {"rho_at_k_predicted_top", number_or_null(run.rho_at_k_pred)},
                  {"tau_at_k_predicted_top", number_or_null(run.tau_at_k_pred)}};

  // Rank errors against the previous release's counts used as the forecast.
  if (run.packages.size() >= 2) {
    const Snapshot& prev = corpus.at(run.test_distribution.index - 1);
    std::vector<double> carried;
    for (const auto& p : run.packages) carried.push_back(static_cast<double>(prev.bug_count(p)));
    const auto carried_ranks = average_ranks(carried, true);
    std::vector<double> carried_errors;
    for (std::size_t i = 0; i < run.packages.size(); ++i)
      carried_errors.push_back(std::abs(run.gold_ranks[i] - carried_ranks[i]));
    j["significance"] = {{"sample", "per-package |gold rank - predicted rank|"},
                         {"against", "previous-release bug counts"},
                         {"mann_whitney", mwu_json(mann_whitney_u(run.rank_errors, carried_errors))}};
  } else {
    j["significance"] = nullptr;
  }

  json rows = json::array();
  for (std::size_t i = 0; i < run.packages.size(); ++i)
    rows.push_back({{"package", run.packages[i]},
                    {"gold", run.gold[i]},
                    {"predicted", run.predictions[i]},
                    {"gold_rank", run.gold_ranks[i]},
                    {"predicted_rank", run.predicted_ranks[i]},
                    {"rank_error", run.rank_errors[i]}});
  j["packages"] = std::move(rows);

  std::ostringstream top;
  top.precision(17);
  top << "rank\tpackage\tpredicted\tgold\n";
  const auto order = top_k_indices(run.predictions, run.config.top_k);
  for (std::size_t r = 0; r < order.size(); ++r)
    top << r + 1 << '\t' << run.packages[order[r]] << '\t' << run.predictions[order[r]] << '\t' << run.gold[order[r]]
        << '\n';

  return {{"report.json", dump(j)}, {"top_k.tsv", top.str()}, {"model.json", to_json(run.forest) + "\n"}};
}

RunFiles devrec_report(const DevrecRun& run, const json& config, const std::string& dataset_id) {
  json j;
  j["kind"] = "devrec";
  j["config"] = config;
  j["dataset"] = dataset_id;
  j["test_distribution"] = distribution_json(run.test_distribution);
  j["feature_names"] = run.feature_names;
  j["training"] = {{"instances", run.training_instances},
                   {"pairs", run.training_pairs},
                   {"initial_loss", run.training.initial_loss},
                   {"epoch_losses", run.training.epoch_losses}};
  j["summary"] = summary_json(run.summary);
  j["queries"] = query_rows(run.recommendations);
  return {{"report.json", dump(j)},
          {"recommendations.tsv", recommendations_tsv(run.recommendations)},
          {"model.json", to_json(run.training.model, run.config.sgd) + "\n"}};
}

RunFiles baseline_report(const BaselineRun& run, const std::vector<std::pair<double, double>>& sweep,
                         const json& config, const std::string& dataset_id) {
  json j;
  j["kind"] = "baseline";
  j["method"] = run.method;
  j["config"] = config;
  j["dataset"] = dataset_id;
  j["test_distribution"] = distribution_json(run.test_distribution);
  if (run.method == "seq_of_sets") {
    j["p_corr"] = run.p_corr;
    json table = json::array();
    for (const auto& [p, m] : sweep) table.push_back({{"p_corr", p}, {"mrr", m}});
    j["sweep"] = std::move(table);
  }
  j["summary"] = summary_json(run.summary);
  j["queries"] = query_rows(run.recommendations);
  return {{"report.json", dump(j)}, {"recommendations.tsv", recommendations_tsv(run.recommendations)}};
}

namespace {

std::optional<double> opt_number(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) return std::nullopt;
  return j.at(key).get<double>();
}

json delta(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return nullptr;
  return *b - *a;
}

std::vector<double> column(const json& rows, const char* key) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.at(key).get<double>());
  return out;
}

}  // namespace

json compare_reports(const json& a, const json& b) {
  const auto family = [](const json& r) {
    const auto kind = r.at("kind").get<std::string>();
    return kind == "urgency" ? std::string("urgency") : std::string("recommendation");
  };
  if (family(a) != family(b)) throw std::invalid_argument("cannot compare urgency and recommendation reports");
  json out;
  out["family"] = family(a);
  out["a"] = {{"kind", a.at("kind")}, {"config", a.at("config")}};
  out["b"] = {{"kind", b.at("kind")}, {"config", b.at("config")}};
  if (family(a) == "urgency") {
    json metrics;
    for (const char* key : {"rho", "tau", "rho_at_k", "tau_at_k", "rho_at_k_predicted_top", "tau_at_k_predicted_top"}) {
      const auto va = opt_number(a.at("metrics"), key), vb = opt_number(b.at("metrics"), key);
      metrics[key] = {{"a", number_or_null(va)}, {"b", number_or_null(vb)}, {"delta", delta(va, vb)}};
    }
    out["metrics"] = std::move(metrics);
    const auto ea = column(a.at("packages"), "rank_error"), eb = column(b.at("packages"), "rank_error");
    out["significance"] = ea.empty() || eb.empty()
                              ? json(nullptr)
                              : json{{"sample", "per-package rank errors"},
                                     {"mann_whitney", mwu_json(mann_whitney_u(ea, eb))}};
  } else {
    const auto va = opt_number(a.at("summary"), "mrr"), vb = opt_number(b.at("summary"), "mrr");
    out["metrics"] = {{"mrr", {{"a", number_or_null(va)}, {"b", number_or_null(vb)}, {"delta", delta(va, vb)}}}};
    const auto ra = column(a.at("queries"), "reciprocal_rank"), rb = column(b.at("queries"), "reciprocal_rank");
    out["significance"] = ra.empty() || rb.empty()
                              ? json(nullptr)
                              : json{{"sample", "per-package reciprocal ranks"},
                                     {"mann_whitney", mwu_json(mann_whitney_u(ra, rb))}};
  }
  return out;
}

}  // namespace pkgpulse::cli

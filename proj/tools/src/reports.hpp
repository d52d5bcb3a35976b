#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pkgpulse/baselines.hpp"
#include "pkgpulse/devrec.hpp"
#include "pkgpulse/urgency.hpp"

namespace pkgpulse::cli {

/// File name -> contents, written together into one run directory.
using RunFiles = std::vector<std::pair<std::string, std::string>>;

RunFiles urgency_report(const Corpus& corpus, const UrgencyRun& run, const nlohmann::json& config,
                        const std::string& dataset_id);
RunFiles devrec_report(const DevrecRun& run, const nlohmann::json& config, const std::string& dataset_id);
RunFiles baseline_report(const BaselineRun& run, const std::vector<std::pair<double, double>>& sweep,
                         const nlohmann::json& config, const std::string& dataset_id);

/// Compares two report.json documents of the same family (urgency, or
/// devrec/baseline). Throws std::invalid_argument on a family mismatch.
nlohmann::json compare_reports(const nlohmann::json& a, const nlohmann::json& b);

/// JSON number, or null for nullopt and non-finite values.
nlohmann::json number_or_null(std::optional<double> v);

}  // namespace pkgpulse::cli

#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>

#include "pkgpulse/baselines.hpp"
#include "pkgpulse/devrec.hpp"
#include "pkgpulse/urgency.hpp"

namespace pkgpulse::cli {

/// Invalid or unknown configuration keys and values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct UrgencyJob {
  std::string test;
  UrgencyConfig config;
};

struct DevrecJob {
  std::string test;
  DevrecConfig config;
};

struct BaselineJob {
  std::string test;
  std::string method = "upper_bound";
  CandidatePolicy policy = CandidatePolicy::Main;
  int window = 5;
  int k_maj = 1;
  std::optional<double> p_corr;  // nullopt sweeps 0.1 .. 0.9
  std::uint64_t seed = 0;
  SeqOfSetsOptions seq;
};

// Each parser fills defaults, rejects unknown keys, and applies an optional
// seed override from the command line.
UrgencyJob parse_urgency_job(const nlohmann::json& j, std::optional<std::uint64_t> seed = {});
DevrecJob parse_devrec_job(const nlohmann::json& j, std::optional<std::uint64_t> seed = {});
BaselineJob parse_baseline_job(const nlohmann::json& j, std::optional<std::uint64_t> seed = {});

/// Fully resolved configs; equal jobs give byte-equal dumps.
nlohmann::json to_json(const UrgencyJob& job);
nlohmann::json to_json(const DevrecJob& job);
nlohmann::json to_json(const BaselineJob& job);

nlohmann::json hyper_to_json(const ForestHyper& h);

}  // namespace pkgpulse::cli

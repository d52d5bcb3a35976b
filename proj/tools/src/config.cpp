#include "config.hpp"

#include <set>

namespace pkgpulse::cli {

namespace {

using nlohmann::json;

void only_keys(const json& j, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items())
    if (!ok.contains(key)) throw ConfigError("unknown config key: " + key);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key has the wrong type: ") + key);
  }
}

std::string require_test(const json& j) {
  if (!j.contains("test") || !j.at("test").is_string()) throw ConfigError("config needs a \"test\" distribution name");
  return j.at("test").get<std::string>();
}

void positive(int value, const char* key) {
  if (value < 1) throw ConfigError(std::string(key) + " must be at least 1");
}

template <typename T>
std::vector<T> list_or(const json& j, const char* key, std::vector<T> fallback) {
  auto v = get_or<std::vector<T>>(j, key, std::move(fallback));
  if (v.empty()) throw ConfigError(std::string("grid axis is empty: ") + key);
  return v;
}

}  // namespace

nlohmann::json hyper_to_json(const ForestHyper& h) {
  return {{"n_estimators", h.n_estimators},         {"max_depth", h.max_depth},
          {"min_samples_split", h.min_samples_split}, {"min_samples_leaf", h.min_samples_leaf},
          {"random_state", h.random_state},         {"bootstrap", h.bootstrap}};
}

UrgencyJob parse_urgency_job(const json& j, std::optional<std::uint64_t> seed) {
  only_keys(j, {"test", "mode", "k_train", "filter_window", "top_k", "grid_search", "grid", "bootstrap",
                "neighbor_time", "neighbor_indicators"});
  UrgencyJob job;
  job.test = require_test(j);
  auto& c = job.config;
  const auto mode = parse_feature_mode(get_or<std::string>(j, "mode", "auto"));
  if (!mode) throw ConfigError("mode must be \"auto\" or \"auto+depn\"");
  c.mode = *mode;
  c.k_train = get_or(j, "k_train", 5);
  c.filter_window = get_or(j, "filter_window", 10);
  c.top_k = get_or<std::size_t>(j, "top_k", 25);
  c.grid_search = get_or(j, "grid_search", true);
  positive(c.k_train, "k_train");
  positive(c.filter_window, "filter_window");
  const auto nt = get_or<std::string>(j, "neighbor_time", "current");
  if (nt != "current" && nt != "previous") throw ConfigError("neighbor_time must be \"current\" or \"previous\"");
  c.dep_options.neighbor_time = nt == "current" ? NeighborTime::Current : NeighborTime::Previous;
  c.dep_options.neighbor_indicators = get_or(j, "neighbor_indicators", false);

  const json g = j.contains("grid") ? j.at("grid") : json::object();
  only_keys(g, {"n_estimators", "max_depth", "min_samples_split", "min_samples_leaf", "random_state"});
  const auto ne = list_or<int>(g, "n_estimators", {100, 300, 500, 700, 900});
  const auto md = list_or<int>(g, "max_depth", {4, 5, 6, 7});
  const auto ms = list_or<int>(g, "min_samples_split", {4, 10, 16, 22, 28});
  const auto ml = list_or<int>(g, "min_samples_leaf", {20, 40, 60, 80});
  auto rs = list_or<std::uint64_t>(g, "random_state", {0, 4, 8});
  if (seed) rs = {*seed};
  for (int v : ne) positive(v, "n_estimators");
  for (int v : md) positive(v, "max_depth");
  for (int v : ms) positive(v, "min_samples_split");
  for (int v : ml) positive(v, "min_samples_leaf");
  c.grid = make_grid(ne, md, ms, ml, rs);
  const bool bootstrap = get_or(j, "bootstrap", true);
  for (auto& h : c.grid) h.bootstrap = bootstrap;
  return job;
}

nlohmann::json to_json(const UrgencyJob& job) {
  const auto& c = job.config;
  std::set<int> ne, md, ms, ml;
  std::set<std::uint64_t> rs;
  for (const auto& h : c.grid) {
    ne.insert(h.n_estimators);
    md.insert(h.max_depth);
    ms.insert(h.min_samples_split);
    ml.insert(h.min_samples_leaf);
    rs.insert(h.random_state);
  }
  return {{"test", job.test},
          {"mode", to_string(c.mode)},
          {"k_train", c.k_train},
          {"filter_window", c.filter_window},
          {"top_k", c.top_k},
          {"grid_search", c.grid_search},
          {"bootstrap", c.grid.empty() || c.grid.front().bootstrap},
          {"neighbor_time", c.dep_options.neighbor_time == NeighborTime::Current ? "current" : "previous"},
          {"neighbor_indicators", c.dep_options.neighbor_indicators},
          {"grid",
           {{"n_estimators", ne},
            {"max_depth", md},
            {"min_samples_split", ms},
            {"min_samples_leaf", ml},
            {"random_state", rs}}}};
}

DevrecJob parse_devrec_job(const json& j, std::optional<std::uint64_t> seed) {
  only_keys(j, {"test", "policy", "features", "model", "window", "epochs", "learning_rate", "seed", "hidden", "l2",
                "alpha", "beta", "init_scale", "batch"});
  DevrecJob job;
  job.test = require_test(j);
  const auto policy = parse_policy(get_or<std::string>(j, "policy", "main"));
  if (!policy) throw ConfigError("policy must be \"main\" or \"main+depn\"");
  auto& c = job.config = paired_config(*policy);
  if (j.contains("features")) {
    const auto f = parse_dev_features(get_or<std::string>(j, "features", ""));
    if (!f) throw ConfigError("features must be \"auto\" or \"auto+depn\"");
    c.features = *f;
  }
  if (j.contains("model")) {
    const auto m = get_or<std::string>(j, "model", "");
    if (m != "lr" && m != "mlp") throw ConfigError("model must be \"lr\" or \"mlp\"");
    c.model = m == "lr" ? ModelKind::Linear : ModelKind::Mlp;
  }
  c.window = get_or(j, "window", 5);
  positive(c.window, "window");
  if (c.features == DevFeatureSet::AutoDepn && c.window < 2)
    throw ConfigError("auto+depn features need window >= 2");
  auto& s = c.sgd;
  s.epochs = get_or(j, "epochs", 10);
  s.learning_rate = get_or(j, "learning_rate", 0.005);
  s.seed = seed ? *seed : get_or<std::uint64_t>(j, "seed", 0);
  s.hidden = get_or<std::size_t>(j, "hidden", 16);
  s.l2 = get_or(j, "l2", 1e-4);
  s.alpha0 = get_or(j, "alpha", 1.0);
  s.beta0 = get_or(j, "beta", 0.0);
  s.init_scale = get_or(j, "init_scale", 0.05);
  const auto batch = get_or<std::string>(j, "batch", "pair");
  if (batch != "pair" && batch != "instance") throw ConfigError("batch must be \"pair\" or \"instance\"");
  s.batch = batch == "pair" ? BatchUnit::Pair : BatchUnit::Instance;
  if (s.epochs < 0) throw ConfigError("epochs must be non-negative");
  if (s.hidden < 1) throw ConfigError("hidden must be at least 1");
  return job;
}

nlohmann::json to_json(const DevrecJob& job) {
  const auto& c = job.config;
  const auto& s = c.sgd;
  return {{"test", job.test},
          {"policy", to_string(c.policy)},
          {"features", to_string(c.features)},
          {"model", c.model == ModelKind::Linear ? "lr" : "mlp"},
          {"window", c.window},
          {"epochs", s.epochs},
          {"learning_rate", s.learning_rate},
          {"seed", s.seed},
          {"hidden", s.hidden},
          {"l2", s.l2},
          {"alpha", s.alpha0},
          {"beta", s.beta0},
          {"init_scale", s.init_scale},
          {"batch", s.batch == BatchUnit::Pair ? "pair" : "instance"}};
}

BaselineJob parse_baseline_job(const json& j, std::optional<std::uint64_t> seed) {
  only_keys(j, {"test", "method", "policy", "window", "k_maj", "p_corr", "seed", "runs", "gamma", "history"});
  BaselineJob job;
  job.test = require_test(j);
  job.method = get_or<std::string>(j, "method", "upper_bound");
  if (job.method != "upper_bound" && job.method != "majority" && job.method != "seq_of_sets")
    throw ConfigError("method must be upper_bound, majority or seq_of_sets");
  const auto policy = parse_policy(get_or<std::string>(j, "policy", "main"));
  if (!policy) throw ConfigError("policy must be \"main\" or \"main+depn\"");
  job.policy = *policy;
  job.window = get_or(j, "window", 5);
  job.k_maj = get_or(j, "k_maj", 1);
  positive(job.window, "window");
  positive(job.k_maj, "k_maj");
  if (j.contains("p_corr") && !j.at("p_corr").is_null()) {
    job.p_corr = get_or(j, "p_corr", 0.0);
    if (*job.p_corr < 0.0 || *job.p_corr > 1.0) throw ConfigError("p_corr must lie in [0, 1]");
  }
  job.seed = seed ? *seed : get_or<std::uint64_t>(j, "seed", 0);
  job.seq.runs = get_or(j, "runs", 20);
  job.seq.gamma = get_or(j, "gamma", 0.5);
  job.seq.history = get_or(j, "history", 0);
  positive(job.seq.runs, "runs");
  if (!(job.seq.gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (job.seq.history < 0) throw ConfigError("history must be non-negative");
  return job;
}

nlohmann::json to_json(const BaselineJob& job) {
  json j = {{"test", job.test}, {"method", job.method}, {"policy", to_string(job.policy)},
            {"window", job.window}, {"k_maj", job.k_maj},  {"seed", job.seed},
            {"runs", job.seq.runs}, {"gamma", job.seq.gamma}, {"history", job.seq.history}};
  j["p_corr"] = job.p_corr ? json(*job.p_corr) : json(nullptr);
  return j;
}

}  // namespace pkgpulse::cli

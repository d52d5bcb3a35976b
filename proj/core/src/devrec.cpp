#include "pkgpulse/devrec.hpp"

#include <algorithm>

#include "pkgpulse/error.hpp"
#include "pkgpulse/parallel.hpp"

namespace pkgpulse {

std::string to_string(CandidatePolicy policy) { return policy == CandidatePolicy::Main ? "main" : "main+depn"; }
std::string to_string(DevFeatureSet features) { return features == DevFeatureSet::Auto ? "auto" : "auto+depn"; }

std::optional<CandidatePolicy> parse_policy(std::string_view text) {
  if (text == "main") return CandidatePolicy::Main;
  if (text == "main+depn") return CandidatePolicy::MainDepn;
  return std::nullopt;
}

std::optional<DevFeatureSet> parse_dev_features(std::string_view text) {
  if (text == "auto") return DevFeatureSet::Auto;
  if (text == "auto+depn") return DevFeatureSet::AutoDepn;
  return std::nullopt;
}

StringSet candidates(const Corpus& corpus, std::string_view package, int t, CandidatePolicy policy, int window) {
  StringSet out;
  const auto w = clamp_window(corpus, t - window, t - 1);
  if (!w) return out;
  for (int tau = w->first; tau <= w->second; ++tau) {
    const Snapshot& snap = corpus.at(tau);
    const auto& own = snap.devs_of(package);
    out.insert(own.begin(), own.end());
    if (policy == CandidatePolicy::MainDepn) out.merge(neighbor_developers(snap, package));
  }
  return out;
}

FeatureVector developer_features(const Corpus& corpus, std::string_view package, std::string_view developer, int t,
                                 int window, DevFeatureSet features) {
  FeatureVector f = devrec_auto_features(corpus, package, developer, t, window);
  if (features == DevFeatureSet::AutoDepn) f.append(devrec_dep_features(corpus, package, developer, t, window));
  return f;
}

std::vector<Instance> build_instances(const Corpus& corpus, CandidatePolicy policy, DevFeatureSet features,
                                      int window, int T) {
  std::vector<Instance> out;
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  for (int h = T - window; h <= T - 1; ++h) {
    if (!corpus.has_index(h)) continue;
    const Snapshot& snap = corpus.at(h);
    const auto names = snap.package_names();
    std::vector<std::optional<Instance>> slots(names.size());
    parallel_for(names.size(), [&](std::size_t i) {
      const std::string& s = names[i];
      const StringSet cand = candidates(corpus, s, h, policy, window);
      const StringSet& gold = snap.devs_of(s);
      Instance inst;
      for (const auto& d : cand) (gold.contains(d) ? inst.positive_ids : inst.negative_ids).push_back(d);
      if (inst.positive_ids.empty() || inst.negative_ids.empty()) return;
      inst.package = s;
      inst.horizon = h;
      for (const auto& d : inst.positive_ids)
        inst.features.positives.push_back(developer_features(corpus, s, d, h, window, features).values);
      for (const auto& d : inst.negative_ids)
        inst.features.negatives.push_back(developer_features(corpus, s, d, h, window, features).values);
      slots[i] = std::move(inst);
    });
    for (auto& slot : slots)
      if (slot) out.push_back(std::move(*slot));
  }
  return out;
}

std::vector<Query> evaluation_queries(const Corpus& corpus, CandidatePolicy policy, int window, int T) {
  const Snapshot& snap = corpus.at(T);
  std::vector<Query> out;
  for (const auto& s : snap.package_names()) {
    const StringSet& gold = snap.devs_of(s);
    if (gold.empty()) continue;
    out.push_back({s, gold, candidates(corpus, s, T, policy, window)});
  }
  return out;
}

std::vector<Recommendation> recommend(const Corpus& corpus, const Ranker& model, std::span<const Query> queries,
                                      DevFeatureSet features, int window, int T) {
  std::vector<Recommendation> out(queries.size());
  parallel_for(queries.size(), [&](std::size_t i) {
    const Query& q = queries[i];
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(q.candidates.size());
    for (const auto& d : q.candidates) {
      const auto x = developer_features(corpus, q.package, d, T, window, features);
      scored.emplace_back(d, model.score(x.values));
    }
    Recommendation& r = out[i];
    r.package = q.package;
    r.gold = q.gold;
    r.ranked = RankedList::from_scores(std::move(scored));
    r.best_position = r.ranked.best_position(q.gold);
  });
  return out;
}

RecommendationSummary summarize(std::span<const Recommendation> recs) {
  RecommendationSummary s;
  s.queries = recs.size();
  std::vector<std::optional<std::size_t>> all, covered;
  for (const auto& r : recs) {
    all.push_back(r.best_position);
    s.reciprocal_ranks.push_back(r.best_position ? 1.0 / static_cast<double>(*r.best_position) : 0.0);
    if (!r.ranked.empty()) {
      ++s.with_candidates;
      covered.push_back(r.best_position);
    }
  }
  if (!all.empty()) {
    s.mrr = mrr(all);
    s.coverage = static_cast<double>(s.with_candidates) / static_cast<double>(s.queries);
  }
  if (!covered.empty()) s.mrr_covered = mrr(covered);
  return s;
}

DevrecConfig paired_config(CandidatePolicy policy) {
  DevrecConfig c;
  c.policy = policy;
  if (policy == CandidatePolicy::MainDepn) {
    c.features = DevFeatureSet::AutoDepn;
    c.model = ModelKind::Mlp;
  }
  return c;
}

DevrecRun run_devrec(const Corpus& corpus, int T, const DevrecConfig& config) {
  if (!corpus.has_index(T)) throw RangeError("test distribution index " + std::to_string(T) + " not in corpus");
  DevrecRun run;
  run.test_distribution = corpus.at(T).distribution();
  run.config = config;

  auto instances = build_instances(corpus, config.policy, config.features, config.window, T);
  if (instances.empty()) throw UntrainedModelError("no training instances before " + run.test_distribution.name);
  run.training_instances = instances.size();

  std::vector<std::vector<double>> rows;
  for (const auto& inst : instances) {
    rows.insert(rows.end(), inst.features.positives.begin(), inst.features.positives.end());
    rows.insert(rows.end(), inst.features.negatives.begin(), inst.features.negatives.end());
    run.training_pairs += inst.features.positives.size() * inst.features.negatives.size();
  }
  MinMaxScaler scaler;
  scaler.fit(rows);
  std::vector<PairInstance> scaled;
  scaled.reserve(instances.size());
  for (const auto& inst : instances) {
    PairInstance p;
    for (const auto& x : inst.features.positives) p.positives.push_back(scaler.transform(x));
    for (const auto& x : inst.features.negatives) p.negatives.push_back(scaler.transform(x));
    scaled.push_back(std::move(p));
  }
  run.training = sgd_fit(config.model, scaled, config.sgd);
  run.training.model.scaler = scaler;

  const Instance& first = instances.front();
  run.feature_names =
      developer_features(corpus, first.package, first.positive_ids.front(), first.horizon, config.window,
                         config.features)
          .names;

  const auto queries = evaluation_queries(corpus, config.policy, config.window, T);
  run.recommendations = recommend(corpus, run.training.model, queries, config.features, config.window, T);
  run.summary = summarize(run.recommendations);
  return run;
}

}  // namespace pkgpulse

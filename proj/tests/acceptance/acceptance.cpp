// Acceptance gate: one PASS/FAIL line per criterion.
//
//   pkgpulse_acceptance --suite property   criteria 1-8, synthetic data only
//   pkgpulse_acceptance --suite dataset    criteria 9-11, needs PKGPULSE_ZENODO_DIR
//
// The dataset suite exits 77 (skipped) when the variable is unset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "builders.hpp"
#include "oracles.hpp"
#include "pkgpulse/baselines.hpp"
#include "pkgpulse/corpus.hpp"
#include "pkgpulse/devrec.hpp"
#include "pkgpulse/error.hpp"
#include "pkgpulse/forest.hpp"
#include "pkgpulse/metrics.hpp"
#include "pkgpulse/normalized.hpp"
#include "pkgpulse/random.hpp"
#include "pkgpulse/ranker.hpp"
#include "pkgpulse/synth.hpp"
#include "pkgpulse/urgency.hpp"

namespace {

using namespace pkgpulse;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  bool ok = true;
  std::ostringstream why;
  void fail(const std::string& msg) {
    if (ok) why << msg;
    ok = false;
  }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// ---------------------------------------------------------------------------
// 1. Metric oracles

std::vector<double> tied_list(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> v(0, static_cast<int>(n / 2 + 1));
  std::vector<double> out(n);
  for (auto& x : out) x = v(rng);
  return out;
}

bool constant(const std::vector<double>& v) { return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; }); }

Outcome metric_oracles() {
  std::mt19937_64 rng(1001);
  Check c;
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng() % 30;
    auto a = tied_list(rng, n), b = tied_list(rng, n);
    while (constant(a)) a = tied_list(rng, n);
    while (constant(b)) b = tied_list(rng, n);
    for (bool desc : {false, true}) {
      const auto got = average_ranks(a, desc), want = oracle::average_ranks(a, desc);
      for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(got[k] - want[k]));
    }
    const double rho = spearman_rho(a, b);
    const double rho_o = oracle::pearson(oracle::average_ranks(a, false), oracle::average_ranks(b, false));
    worst = std::max(worst, std::abs(rho - rho_o));
    worst = std::max(worst, std::abs(kendall_tau(a, b) - oracle::kendall_tau_b(a, b)));
  }
  for (int i = 0; i < 200; ++i) {
    const std::size_t q = 1 + rng() % 40;
    std::vector<std::optional<std::size_t>> pos;
    std::vector<long> raw;
    for (std::size_t k = 0; k < q; ++k) {
      const long p = static_cast<long>(rng() % 12);
      raw.push_back(p);
      pos.push_back(p == 0 ? std::nullopt : std::optional<std::size_t>(static_cast<std::size_t>(p)));
    }
    worst = std::max(worst, std::abs(mrr(pos) - oracle::mrr(raw)));
  }
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 1 + rng() % 8, m = 1 + rng() % 8;
    const auto a = tied_list(rng, n), b = tied_list(rng, m);
    const auto got = mann_whitney_u(a, b);
    const auto want = oracle::mann_whitney_enumerated(a, b);
    if (!got.exact) c.fail("small samples not exact");
    worst = std::max(worst, std::abs(got.u - want.u));
    worst = std::max(worst, std::abs(got.p_two_sided - want.p));
  }
  if (worst > 1e-9) c.fail("max deviation " + sci(worst));
  return {c.ok, c.ok ? "600 lists, max deviation " + sci(worst) : c.why.str()};
}

// ---------------------------------------------------------------------------
// 2. Gradient checks

template <typename Params, typename Loss>
double fd_relative_error(const Params& p, const std::vector<double>& analytic, Loss&& loss) {
  const auto flat = flatten(p);
  Params q = p;
  double num = 0, den = 0;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    auto up = flat, down = flat;
    const double h = 1e-6;
    up[k] += h;
    down[k] -= h;
    assign_flat(up, q);
    const double lu = loss(q);
    assign_flat(down, q);
    const double ld = loss(q);
    const double fd = (lu - ld) / (2 * h);
    num += (fd - analytic[k]) * (fd - analytic[k]);
    den += fd * fd;
  }
  return std::sqrt(num) / std::max(std::sqrt(den), 1e-12);
}

Outcome gradient_checks() {
  std::mt19937_64 rng(2002);
  std::normal_distribution<double> g;
  auto vec = [&](std::size_t n, double s) {
    std::vector<double> v(n);
    for (auto& x : v) x = s * g(rng);
    return v;
  };
  double worst_lr = 0, worst_mlp = 0;
  for (int point = 0; point < 10; ++point) {
    const std::size_t d = 7;
    LinearRanker p{vec(d, 1.0), g(rng)};
    const auto pos = vec(d, 1.0), neg = vec(d, 1.0);
    LinearRanker grad;
    lr_pair_loss_grad(p, pos, neg, grad);
    worst_lr = std::max(worst_lr, fd_relative_error(p, flatten(grad), [&](const LinearRanker& q) {
                          return lr_pair_loss(q, pos, neg);
                        }));
  }
  for (int point = 0; point < 10; ++point) {
    MlpRanker p;
    p.inputs = 6;
    p.hidden = 5;
    p.w1 = vec(30, 0.6);
    p.b1 = vec(5, 0.3);
    p.w2 = vec(5, 0.6);
    p.b2 = g(rng);
    p.alpha = g(rng);
    p.beta = g(rng);
    const auto pos = vec(6, 1.0), neg = vec(6, 1.0);
    MlpRanker grad;
    mlp_pair_loss_grad(p, pos, neg, 1e-3, grad);
    worst_mlp = std::max(worst_mlp, fd_relative_error(p, flatten(grad), [&](const MlpRanker& q) {
                           return mlp_pair_loss(q, pos, neg, 1e-3);
                         }));
  }
  const bool ok = worst_lr < 1e-4 && worst_mlp < 1e-4;
  return {ok, "max relative error LR " + sci(worst_lr) + ", MLP " + sci(worst_mlp)};
}

// ---------------------------------------------------------------------------
// 3. Forest sanity

Outcome forest_sanity() {
  std::mt19937_64 rng(3003);
  std::normal_distribution<double> g;
  Check c;
  for (int ds = 0; ds < 50; ++ds) {
    const std::size_t n = 30 + rng() % 200, d = 1 + rng() % 5;
    std::vector<std::string> names;
    for (std::size_t j = 0; j < d; ++j) names.push_back("x" + std::to_string(j));
    DesignMatrix X(names);
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> r(d);
      for (auto& v : r) v = std::round(g(rng) * 4) / 4;
      y.push_back(r[0] * r[0] + g(rng));
      X.append(r);
    }
    // Without bootstrap every tree fits all rows and can only lower their SSE.
    ForestHyper h;
    h.n_estimators = 5;
    h.max_depth = 1 + static_cast<int>(rng() % 6);
    h.min_samples_leaf = 1 + static_cast<int>(rng() % 10);
    h.min_samples_split = 2;
    h.bootstrap = false;
    const auto f = forest_fit(X, y, h);
    const auto pred = f.predict(X);
    double mean = 0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(n);
    double mse = 0, base = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mse += (y[i] - pred[i]) * (y[i] - pred[i]);
      base += (y[i] - mean) * (y[i] - mean);
    }
    if (mse > base + 1e-9) c.fail("dataset " + std::to_string(ds) + ": forest MSE above mean predictor");
  }
  for (int ds = 0; ds < 50; ++ds) {
    const std::size_t n = 10 + rng() % 80;
    DesignMatrix X(std::vector<std::string>{"x"});
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (std::size_t i = 0; i < n; ++i) {
      rows.push_back({g(rng)});
      X.append(rows.back());
      y.push_back(rows.back()[0] > 0.3 ? 2 + g(rng) : g(rng));
    }
    ForestHyper h;
    h.n_estimators = 1;
    h.max_depth = 1;
    h.min_samples_split = 2;
    h.min_samples_leaf = 1;
    h.bootstrap = false;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const auto tree = fit_tree(X, y, all, h);
    const auto want = oracle::best_split(rows, y, 1);
    const auto& root = tree.nodes.front();
    if (root.is_leaf() || root.feature != want.feature || root.threshold != want.threshold)
      c.fail("1-feature dataset " + std::to_string(ds) + ": split differs from exhaustive search");
  }
  return {c.ok, c.ok ? "50 MSE datasets, 50 depth-1 split datasets" : c.why.str()};
}

// ---------------------------------------------------------------------------
// 4. Upper-bound dominance

DevrecConfig quick(CandidatePolicy policy, int window) {
  DevrecConfig cfg = paired_config(policy);
  cfg.window = window;
  cfg.sgd.hidden = 8;
  return cfg;
}

Outcome upper_bound_dominance() {
  Check c;
  std::mt19937_64 rng(4004);
  int runs = 0;
  for (int i = 0; i < 100; ++i) {
    SynthConfig s;
    s.seed = rng();
    s.releases = 6 + static_cast<int>(rng() % 4);
    s.packages = 20 + static_cast<int>(rng() % 30);
    s.retention = 0.5 + 0.4 * std::uniform_real_distribution<double>()(rng);
    const Corpus corpus = synthesize(s).corpus;
    const int T = corpus.last_index();
    const int window = 2 + static_cast<int>(rng() % 4);
    const std::string tag = "run " + std::to_string(i) + ": ";
    const double ub_main = run_upper_bound(corpus, T, CandidatePolicy::Main, window).summary.mrr;
    const double ub_depn = run_upper_bound(corpus, T, CandidatePolicy::MainDepn, window).summary.mrr;
    if (ub_depn < ub_main) c.fail(tag + "upper_bound(main+depn) < upper_bound(main)");
    for (auto policy : {CandidatePolicy::Main, CandidatePolicy::MainDepn}) {
      const double ub = policy == CandidatePolicy::Main ? ub_main : ub_depn;
      try {
        if (run_devrec(corpus, T, quick(policy, window)).summary.mrr > ub) c.fail(tag + "devrec above upper bound");
      } catch (const UntrainedModelError&) {
      }
      for (int k : {1, window})
        if (run_majority(corpus, T, policy, window, k).summary.mrr > ub) c.fail(tag + "majority above upper bound");
    }
    SeqOfSetsOptions opt;
    opt.history = window;
    const double ub_hist = run_upper_bound(corpus, T, CandidatePolicy::Main, seq_of_sets_history(corpus, T, opt)).summary.mrr;
    for (double p : {0.1, 0.5, 0.9})
      if (run_seq_of_sets(corpus, T, p, s.seed, opt).summary.mrr > ub_hist) c.fail(tag + "seq_of_sets above upper bound");
    ++runs;
  }
  return {c.ok, c.ok ? std::to_string(runs) + " synthetic runs" : c.why.str()};
}

// ---------------------------------------------------------------------------
// 5. Leakage

Outcome leakage() {
  Check c;
  SynthConfig s;
  s.seed = 5005;
  s.releases = 10;
  s.packages = 80;
  const Corpus corpus = synthesize(s).corpus;
  const int T = corpus.last_index();
  SnapshotData altered = corpus.at(T).data();
  std::int64_t id = 90'000'000;
  for (auto& [pkg, info] : altered.packages) {
    info.bug_ids.clear();
    const int n = static_cast<int>(fnv1a64(pkg) % 7);
    for (int k = 0; k < n; ++k) info.bug_ids.push_back(id++);
  }
  for (auto& [pkg, devs] : altered.developers) devs = {"leak@example.org"};
  altered.activity.clear();
  altered.activity["leak@example.org"] = DeveloperActivity{9, 9, 9, 9, 9};
  const Corpus perturbed = corpus.with_snapshot(Snapshot(altered));

  UrgencyConfig u;
  u.mode = FeatureMode::AutoDepn;
  u.k_train = 4;
  const std::vector<int> est{20}, depth{3, 5}, split{4}, leaf{5};
  const std::vector<std::uint64_t> rs{0};
  u.grid = make_grid(est, depth, split, leaf, rs);
  const auto a = run_urgency(corpus, T, u), b = run_urgency(perturbed, T, u);
  if (a.packages != b.packages || a.predictions != b.predictions) c.fail("urgency predictions changed");

  for (auto policy : {CandidatePolicy::Main, CandidatePolicy::MainDepn}) {
    const auto cfg = paired_config(policy);
    const auto da = run_devrec(corpus, T, cfg), db = run_devrec(perturbed, T, cfg);
    if (da.recommendations.size() != db.recommendations.size()) {
      c.fail("devrec query sets differ");
      continue;
    }
    for (std::size_t i = 0; i < da.recommendations.size(); ++i) {
      const auto& x = da.recommendations[i].ranked.items;
      const auto& y = db.recommendations[i].ranked.items;
      if (x.size() != y.size()) c.fail("devrec candidate lists differ");
      for (std::size_t j = 0; j < std::min(x.size(), y.size()); ++j)
        if (x[j].id != y[j].id || std::memcmp(&x[j].score, &y[j].score, sizeof(double)) != 0)
          c.fail("devrec scores changed for " + da.recommendations[i].package);
    }
  }
  return {c.ok, c.ok ? "urgency predictions and devrec scores bitwise identical" : c.why.str()};
}

// ---------------------------------------------------------------------------
// 6. Instance set algebra

Outcome instance_set_algebra() {
  Check c;
  std::mt19937_64 rng(6006);
  const std::vector<std::string> pkgs{"a", "b", "c", "d", "e", "f"};
  const std::vector<std::string> devs{"d1", "d2", "d3", "d4", "d5"};
  testing::CorpusBuilder builder(8);
  for (int t = 1; t <= 8; ++t) {
    for (const auto& p : pkgs)
      if (rng() % 8 != 0) builder.package(t, p);
    // Only edges and developers between present packages are added below.
  }
  Corpus skeleton = builder.build();
  for (int t = 1; t <= 8; ++t) {
    for (const auto& p : pkgs) {
      if (!skeleton.at(t).contains(p)) continue;
      for (const auto& q : pkgs)
        if (p != q && skeleton.at(t).contains(q) && rng() % 5 == 0) builder.edge(t, p, q);
      for (const auto& d : devs)
        if (rng() % 3 == 0) builder.dev(t, p, d);
    }
  }
  const Corpus corpus = builder.build();
  std::size_t compared = 0;
  for (int T = 2; T <= 8; ++T)
    for (int window = 1; window <= 7; ++window)
      for (auto policy : {CandidatePolicy::Main, CandidatePolicy::MainDepn}) {
        const auto got = build_instances(corpus, policy, DevFeatureSet::Auto, window, T);
        const auto want = oracle::instances(corpus, policy == CandidatePolicy::MainDepn, window, T);
        if (got.size() != want.size()) {
          c.fail("instance count differs at T=" + std::to_string(T) + " K=" + std::to_string(window));
          continue;
        }
        for (std::size_t i = 0; i < got.size(); ++i) {
          oracle::InstanceSets g{got[i].package, got[i].horizon,
                                 {got[i].positive_ids.begin(), got[i].positive_ids.end()},
                                 {got[i].negative_ids.begin(), got[i].negative_ids.end()}};
          if (!(g == want[i])) c.fail("instance differs: " + got[i].package + "@" + std::to_string(got[i].horizon));
          ++compared;
        }
      }
  return {c.ok && compared > 0, c.ok ? std::to_string(compared) + " instances compared" : c.why.str()};
}

// ---------------------------------------------------------------------------
// 7. Coupling detection

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

Outcome coupling_detection() {
  UrgencyConfig base;
  const std::vector<int> est{100}, depth{4, 7}, split{4}, leaf{20, 80};
  const std::vector<std::uint64_t> rs{0};
  base.grid = make_grid(est, depth, split, leaf, rs);
  std::vector<double> rho_auto, rho_depn;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthConfig s;
    s.seed = seed;
    s.releases = 12;
    s.packages = 200;
    s.coupling = 0.5;
    const Corpus corpus = synthesize(s).corpus;
    for (auto mode : {FeatureMode::Auto, FeatureMode::AutoDepn}) {
      UrgencyConfig cfg = base;
      cfg.mode = mode;
      const auto run = run_urgency(corpus, corpus.last_index(), cfg);
      (mode == FeatureMode::Auto ? rho_auto : rho_depn).push_back(run.rho.value_or(NAN));
    }
  }
  const double ma = median_of(rho_auto), md = median_of(rho_depn);
  return {md >= ma, "median rho auto " + fmt(ma) + ", auto+depn " + fmt(md)};
}

// ---------------------------------------------------------------------------
// 8. Perfect autoregression

Outcome perfect_autoregression() {
  SynthConfig s;
  s.seed = 8008;
  s.releases = 12;
  s.packages = 200;
  s.mode = SynthMode::Persistent;
  const Corpus corpus = synthesize(s).corpus;
  UrgencyConfig cfg;
  cfg.grid_search = false;
  cfg.grid = {ForestHyper{100, 7, 2, 1, 0, true}};
  const auto run = run_urgency(corpus, corpus.last_index(), cfg);
  if (!run.rho) return {false, "rho undefined"};
  return {near(*run.rho, 1.0, 1e-6), "rho " + fmt(*run.rho, 9)};
}

// ---------------------------------------------------------------------------
// Dataset suite

Dataset load_dataset(const fs::path& dir) {
  if (fs::exists(dir / "manifest.json")) return load_normalized(dir);
  return ingest_raw(dir);
}

struct Expect {
  const char* what;
  double got;
  double want;
  double tol;
};

Outcome check_all(const std::vector<Expect>& list) {
  bool ok = true;
  std::string detail;
  for (const auto& e : list) {
    const bool pass = std::isfinite(e.got) && near(e.got, e.want, e.tol);
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += std::string(e.what) + " " + fmt(e.got, 3) + " (want " + fmt(e.want, 3) + "±" + fmt(e.tol, 3) + ")";
  }
  return {ok, detail};
}

Outcome zesty_urgency(const Corpus& corpus) {
  const int t = corpus.index_of("zesty").value();
  UrgencyConfig a;
  a.mode = FeatureMode::Auto;
  UrgencyConfig d = a;
  d.mode = FeatureMode::AutoDepn;
  const auto ra = run_urgency(corpus, t, a), rd = run_urgency(corpus, t, d);
  return check_all({{"rho@25 auto", ra.rho_at_k.value_or(NAN), 0.582, 0.05},
                    {"rho@25 +depn", rd.rho_at_k.value_or(NAN), 0.603, 0.05},
                    {"rho auto", ra.rho.value_or(NAN), 0.354, 0.05},
                    {"rho +depn", rd.rho.value_or(NAN), 0.380, 0.05}});
}

Outcome zesty_devrec(const Corpus& corpus) {
  const int T = corpus.index_of("zesty").value();
  const auto lr = run_devrec(corpus, T, paired_config(CandidatePolicy::Main));
  const auto mlp = run_devrec(corpus, T, paired_config(CandidatePolicy::MainDepn));
  const auto ub_main = run_upper_bound(corpus, T, CandidatePolicy::Main, 5);
  const auto ub_depn = run_upper_bound(corpus, T, CandidatePolicy::MainDepn, 5);
  return check_all({{"MRR auto/LR", lr.summary.mrr, 0.788, 0.03},
                    {"MRR +depn/MLP", mlp.summary.mrr, 0.794, 0.03},
                    {"upper bound main", ub_main.summary.mrr, 0.810, 0.005},
                    {"upper bound main+depn", ub_depn.summary.mrr, 0.844, 0.005}});
}

Outcome corpus_statistics(const Corpus& corpus) {
  const Snapshot& zesty = corpus.by_name("zesty");
  std::size_t with_bugs = 0, bugs = 0;
  for (const auto& p : zesty.package_names())
    if (const auto n = zesty.bug_count(p)) {
      ++with_bugs;
      bugs += n;
    }
  const double mean = with_bugs ? static_cast<double>(bugs) / static_cast<double>(with_bugs) : NAN;
  const bool count_ok = zesty.package_count() == 25648;
  auto rest = check_all({{"mean bugs per bug-having package", mean, 3.4, 0.2}});
  return {count_ok && rest.pass,
          "source packages " + std::to_string(zesty.package_count()) + " (want 25648); " + rest.detail};
}

// ---------------------------------------------------------------------------

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

bool report(const Criterion& c) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = c.run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << (o.pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail << " ("
            << fmt(secs, 1) << "s)" << std::endl;
  return o.pass;
}

}  // namespace

int main(int argc, char** argv) {
  std::string suite = "property";
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--suite") == 0 && i + 1 < argc) suite = argv[++i];
    else {
      std::cerr << "usage: pkgpulse_acceptance [--suite property|dataset]\n";
      return 2;
    }
  }
  bool ok = true;
  if (suite == "property") {
    const std::vector<Criterion> criteria = {
        {1, "metric oracles", metric_oracles},
        {2, "gradient checks", gradient_checks},
        {3, "forest sanity", forest_sanity},
        {4, "upper-bound dominance", upper_bound_dominance},
        {5, "leakage", leakage},
        {6, "instance set algebra", instance_set_algebra},
        {7, "coupling detection", coupling_detection},
        {8, "perfect autoregression", perfect_autoregression},
    };
    for (const auto& c : criteria) ok = report(c) && ok;
    return ok ? 0 : 1;
  }
  if (suite == "dataset") {
    const char* dir = std::getenv("PKGPULSE_ZENODO_DIR");
    if (!dir || !*dir) {
      std::cout << "SKIP [9-11] dataset suite: PKGPULSE_ZENODO_DIR is not set" << std::endl;
      return 77;
    }
    Dataset ds;
    try {
      ds = load_dataset(dir);
    } catch (const std::exception& e) {
      std::cout << "FAIL [9-11] could not load " << dir << ": " << e.what() << std::endl;
      return 1;
    }
    const Corpus& corpus = ds.corpus;
    const std::vector<Criterion> criteria = {
        {9, "zesty urgency", [&] { return zesty_urgency(corpus); }},
        {10, "zesty developer recommendation", [&] { return zesty_devrec(corpus); }},
        {11, "corpus statistics", [&] { return corpus_statistics(corpus); }},
    };
    for (const auto& c : criteria) ok = report(c) && ok;
    return ok ? 0 : 1;
  }
  std::cerr << "unknown suite: " << suite << '\n';
  return 2;
}

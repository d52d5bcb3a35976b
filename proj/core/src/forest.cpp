#include "pkgpulse/forest.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>

#include "pkgpulse/error.hpp"
#include "pkgpulse/metrics.hpp"
#include "pkgpulse/parallel.hpp"
#include "pkgpulse/random.hpp"

namespace pkgpulse {

double RegressionTree::predict(std::span<const double> x) const {
  if (nodes.empty()) throw UntrainedModelError("empty tree");
  std::size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const auto& n = nodes[i];
    i = static_cast<std::size_t>(x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
  }
  return nodes[i].value;
}

int RegressionTree::depth() const {
  if (nodes.empty()) return 0;
  int deepest = 0;
  std::vector<std::pair<std::size_t, int>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(static_cast<std::size_t>(nodes[i].left), d + 1);
      stack.emplace_back(static_cast<std::size_t>(nodes[i].right), d + 1);
    }
  }
  return deepest;
}

double Forest::predict(std::span<const double> x) const {
  if (trees.empty()) throw UntrainedModelError("forest has no trees");
  if (x.size() != n_features)
    throw DimensionMismatch("forest expects " + std::to_string(n_features) + " features, got " +
                            std::to_string(x.size()));
  double s = 0.0;
  for (const auto& t : trees) s += t.predict(x);
  return s / static_cast<double>(trees.size());
}

std::vector<double> Forest::predict(const DesignMatrix& X) const {
  std::vector<double> out(X.rows());
  for (std::size_t r = 0; r < X.rows(); ++r) out[r] = predict(X.row(r));
  return out;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double proxy = -std::numeric_limits<double>::infinity();
};

Split best_split(const DesignMatrix& X, std::span<const double> y, std::span<const std::size_t> rows,
                 std::size_t min_leaf) {
  Split best;
  const std::size_t n = rows.size();
  double total = 0.0;
  for (auto r : rows) total += y[r];
  std::vector<std::pair<double, double>> col(n);
  for (std::size_t f = 0; f < X.cols(); ++f) {
    for (std::size_t i = 0; i < n; ++i) col[i] = {X(rows[i], f), y[rows[i]]};
    std::sort(col.begin(), col.end());
    double left = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left += col[i].second;
      const std::size_t nl = i + 1, nr = n - nl;
      if (col[i].first == col[i + 1].first) continue;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right = total - left;
      const double proxy = left * left / static_cast<double>(nl) + right * right / static_cast<double>(nr);
      if (proxy > best.proxy) {
        best.feature = static_cast<int>(f);
        best.threshold = col[i].first + (col[i + 1].first - col[i].first) / 2.0;
        // Guard against the midpoint rounding up to the right value.
        if (!(best.threshold < col[i + 1].first)) best.threshold = col[i].first;
        best.proxy = proxy;
      }
    }
  }
  return best;
}

}  // namespace

RegressionTree fit_tree(const DesignMatrix& X, std::span<const double> y, std::span<const std::size_t> rows,
                        const ForestHyper& hyper) {
  if (rows.empty()) throw std::invalid_argument("tree needs at least one row");
  const std::size_t min_leaf = static_cast<std::size_t>(std::max(1, hyper.min_samples_leaf));
  const std::size_t min_split = static_cast<std::size_t>(std::max(2, hyper.min_samples_split));

  RegressionTree tree;
  struct Pending {
    std::size_t node;
    std::vector<std::size_t> rows;
    int depth;
  };
  std::vector<Pending> work;
  tree.nodes.emplace_back();
  work.push_back({0, std::vector<std::size_t>(rows.begin(), rows.end()), 0});
  while (!work.empty()) {
    Pending p = std::move(work.back());
    work.pop_back();
    double sum = 0.0, lo = y[p.rows.front()], hi = lo;
    for (auto r : p.rows) {
      sum += y[r];
      lo = std::min(lo, y[r]);
      hi = std::max(hi, y[r]);
    }
    const std::size_t n = p.rows.size();
    tree.nodes[p.node].value = sum / static_cast<double>(n);
    tree.nodes[p.node].samples = n;
    if (p.depth >= hyper.max_depth || n < min_split || n < 2 * min_leaf || lo == hi) continue;

    const Split s = best_split(X, y, p.rows, min_leaf);
    if (s.feature < 0) continue;
    std::vector<std::size_t> left, right;
    for (auto r : p.rows) (X(r, static_cast<std::size_t>(s.feature)) <= s.threshold ? left : right).push_back(r);

    const int li = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    auto& node = tree.nodes[p.node];
    node.feature = s.feature;
    node.threshold = s.threshold;
    node.left = li;
    node.right = li + 1;
    work.push_back({static_cast<std::size_t>(li + 1), std::move(right), p.depth + 1});
    work.push_back({static_cast<std::size_t>(li), std::move(left), p.depth + 1});
  }
  return tree;
}

std::vector<std::size_t> tree_sample(std::size_t n_rows, const ForestHyper& hyper, std::size_t tree_index) {
  std::vector<std::size_t> rows(n_rows);
  if (!hyper.bootstrap) {
    for (std::size_t i = 0; i < n_rows; ++i) rows[i] = i;
    return rows;
  }
  std::mt19937_64 rng(derive_seed(hyper.random_state, {static_cast<std::uint64_t>(tree_index)}));
  std::uniform_int_distribution<std::size_t> pick(0, n_rows - 1);
  for (auto& r : rows) r = pick(rng);
  return rows;
}

Forest forest_fit(const DesignMatrix& X, std::span<const double> y, const ForestHyper& hyper) {
  if (X.rows() == 0) throw std::invalid_argument("empty training set");
  if (X.rows() != y.size()) throw DimensionMismatch("design matrix and label lengths differ");
  if (hyper.n_estimators < 1) throw std::invalid_argument("n_estimators must be positive");
  Forest forest;
  forest.hyper = hyper;
  forest.n_features = X.cols();
  forest.trees.resize(static_cast<std::size_t>(hyper.n_estimators));
  parallel_for(forest.trees.size(), [&](std::size_t t) {
    const auto rows = tree_sample(X.rows(), hyper, t);
    forest.trees[t] = fit_tree(X, y, rows, hyper);
  });
  return forest;
}

std::vector<ForestHyper> make_grid(std::span<const int> n_estimators, std::span<const int> max_depth,
                                   std::span<const int> min_samples_split, std::span<const int> min_samples_leaf,
                                   std::span<const std::uint64_t> random_state) {
  std::vector<ForestHyper> grid;
  for (int ne : n_estimators)
    for (int md : max_depth)
      for (int ms : min_samples_split)
        for (int ml : min_samples_leaf)
          for (auto rs : random_state) grid.push_back({ne, md, ms, ml, rs, true});
  return grid;
}

std::vector<ForestHyper> default_forest_grid() {
  const int ne[] = {100, 300, 500, 700, 900};
  const int md[] = {4, 5, 6, 7};
  const int ms[] = {4, 10, 16, 22, 28};
  const int ml[] = {20, 40, 60, 80};
  const std::uint64_t rs[] = {0, 4, 8};
  return make_grid(ne, md, ms, ml, rs);
}

GridResult grid_search(std::span<const ForestHyper> grid, const DesignMatrix& train_X, std::span<const double> train_y,
                       const DesignMatrix& valid_X, std::span<const double> valid_y, const ValidationMetric& metric) {
  if (grid.empty()) throw std::invalid_argument("empty hyperparameter grid");
  const ValidationMetric score_fn =
      metric ? metric : [](std::span<const double> g, std::span<const double> p) { return spearman_rho(g, p); };
  GridResult result;
  result.table.reserve(grid.size());
  bool have_best = false;
  for (const auto& h : grid) {
    double score = -std::numeric_limits<double>::infinity();
    const Forest f = forest_fit(train_X, train_y, h);
    const auto pred = f.predict(valid_X);
    try {
      score = score_fn(valid_y, pred);
      if (std::isnan(score)) score = -std::numeric_limits<double>::infinity();
    } catch (const UndefinedCorrelation&) {
    }
    result.table.push_back({h, score});
    if (!have_best || score > result.best_score) {
      result.best = h;
      result.best_score = score;
      have_best = true;
    }
  }
  return result;
}

namespace {

nlohmann::json hyper_json(const ForestHyper& h) {
  return {{"n_estimators", h.n_estimators},       {"max_depth", h.max_depth},
          {"min_samples_split", h.min_samples_split}, {"min_samples_leaf", h.min_samples_leaf},
          {"random_state", h.random_state},       {"bootstrap", h.bootstrap}};
}

}  // namespace

std::string to_json(const Forest& forest) {
  nlohmann::json j;
  j["hyper"] = hyper_json(forest.hyper);
  j["n_features"] = forest.n_features;
  auto& trees = j["trees"] = nlohmann::json::array();
  for (const auto& t : forest.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : t.nodes)
      nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value, n.samples});
    trees.push_back(std::move(nodes));
  }
  return j.dump();
}

Forest forest_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Forest f;
    const auto& h = j.at("hyper");
    f.hyper.n_estimators = h.at("n_estimators").get<int>();
    f.hyper.max_depth = h.at("max_depth").get<int>();
    f.hyper.min_samples_split = h.at("min_samples_split").get<int>();
    f.hyper.min_samples_leaf = h.at("min_samples_leaf").get<int>();
    f.hyper.random_state = h.at("random_state").get<std::uint64_t>();
    f.hyper.bootstrap = h.at("bootstrap").get<bool>();
    f.n_features = j.at("n_features").get<std::size_t>();
    for (const auto& t : j.at("trees")) {
      RegressionTree tree;
      for (const auto& n : t)
        tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(), n.at(3).get<int>(),
                              n.at(4).get<double>(), n.at(5).get<std::size_t>()});
      f.trees.push_back(std::move(tree));
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed forest checkpoint: ") + e.what());
  }
}

}  // namespace pkgpulse

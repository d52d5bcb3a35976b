#include "pkgpulse/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "pkgpulse/error.hpp"

namespace pkgpulse {

double sigmoid(double z) noexcept {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double softplus(double z) noexcept { return z > 30.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

namespace {

void check_dim(std::size_t expected, std::span<const double> x) {
  if (x.size() != expected)
    throw DimensionMismatch("expected " + std::to_string(expected) + " features, got " + std::to_string(x.size()));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// Hidden activations tanh(W1 x + b1).
std::vector<double> hidden_layer(const MlpRanker& p, std::span<const double> x) {
  std::vector<double> h(p.hidden);
  for (std::size_t j = 0; j < p.hidden; ++j)
    h[j] = std::tanh(dot(std::span(p.w1).subspan(j * p.inputs, p.inputs), x) + p.b1[j]);
  return h;
}

double l2_sum(const MlpRanker& p) {
  double s = p.b2 * p.b2 + p.alpha * p.alpha + p.beta * p.beta;
  for (const auto* v : {&p.w1, &p.b1, &p.w2})
    for (double w : *v) s += w * w;
  return s;
}

}  // namespace

double lr_score(const LinearRanker& p, std::span<const double> x) {
  check_dim(p.weights.size(), x);
  return sigmoid(dot(p.weights, x) + p.bias);
}

double lr_pair_loss(const LinearRanker& p, std::span<const double> pos, std::span<const double> neg) {
  return std::max(0.0, lr_score(p, neg) - lr_score(p, pos) + 1.0);
}

double lr_pair_loss_grad(const LinearRanker& p, std::span<const double> pos, std::span<const double> neg,
                         LinearRanker& grad) {
  const double sp = lr_score(p, pos);
  const double sn = lr_score(p, neg);
  check_dim(p.weights.size(), neg);
  grad.weights.assign(p.weights.size(), 0.0);
  grad.bias = 0.0;
  const double margin = sn - sp + 1.0;
  if (margin <= 0.0) return 0.0;
  const double dn = sn * (1.0 - sn), dp = sp * (1.0 - sp);
  for (std::size_t i = 0; i < p.weights.size(); ++i) grad.weights[i] = dn * neg[i] - dp * pos[i];
  grad.bias = dn - dp;
  return margin;
}

double mlp_score(const MlpRanker& p, std::span<const double> x) {
  check_dim(p.inputs, x);
  const auto h = hidden_layer(p, x);
  return dot(p.w2, h) + p.b2;
}

double mlp_pair_cost(const MlpRanker& p, std::span<const double> pos, std::span<const double> neg) {
  const double diff = mlp_score(p, neg) - mlp_score(p, pos) - softplus(p.beta);
  return sigmoid(softplus(p.alpha) * diff);
}

double mlp_pair_loss(const MlpRanker& p, std::span<const double> pos, std::span<const double> neg, double l2) {
  return mlp_pair_cost(p, pos, neg) + l2 * l2_sum(p);
}

double mlp_pair_loss_grad(const MlpRanker& p, std::span<const double> pos, std::span<const double> neg, double l2,
                          MlpRanker& grad) {
  check_dim(p.inputs, pos);
  check_dim(p.inputs, neg);
  const auto hp = hidden_layer(p, pos);
  const auto hn = hidden_layer(p, neg);
  const double tp = dot(p.w2, hp) + p.b2;
  const double tn = dot(p.w2, hn) + p.b2;
  const double a = softplus(p.alpha), m = softplus(p.beta);
  const double diff = tn - tp - m;
  const double cost = sigmoid(a * diff);
  const double g = cost * (1.0 - cost);  // d cost / d (a * diff)

  grad.inputs = p.inputs;
  grad.hidden = p.hidden;
  grad.w1.assign(p.w1.size(), 0.0);
  grad.b1.assign(p.hidden, 0.0);
  grad.w2.assign(p.hidden, 0.0);
  grad.b2 = 0.0;  // cancels between the two scores
  grad.alpha = g * diff * sigmoid(p.alpha);
  grad.beta = -g * a * sigmoid(p.beta);

  const double d_neg = g * a, d_pos = -g * a;  // d cost / d theta
  for (std::size_t j = 0; j < p.hidden; ++j) {
    grad.w2[j] = d_neg * hn[j] + d_pos * hp[j];
    const double cn = d_neg * p.w2[j] * (1.0 - hn[j] * hn[j]);
    const double cp = d_pos * p.w2[j] * (1.0 - hp[j] * hp[j]);
    grad.b1[j] = cn + cp;
    for (std::size_t i = 0; i < p.inputs; ++i) grad.w1[j * p.inputs + i] = cn * neg[i] + cp * pos[i];
  }

  if (l2 != 0.0) {
    for (std::size_t k = 0; k < p.w1.size(); ++k) grad.w1[k] += 2.0 * l2 * p.w1[k];
    for (std::size_t j = 0; j < p.hidden; ++j) {
      grad.b1[j] += 2.0 * l2 * p.b1[j];
      grad.w2[j] += 2.0 * l2 * p.w2[j];
    }
    grad.b2 += 2.0 * l2 * p.b2;
    grad.alpha += 2.0 * l2 * p.alpha;
    grad.beta += 2.0 * l2 * p.beta;
  }
  return cost + l2 * l2_sum(p);
}

std::vector<double> flatten(const LinearRanker& p) {
  std::vector<double> out = p.weights;
  out.push_back(p.bias);
  return out;
}

std::vector<double> flatten(const MlpRanker& p) {
  std::vector<double> out;
  out.reserve(p.w1.size() + 2 * p.hidden + 3);
  out.insert(out.end(), p.w1.begin(), p.w1.end());
  out.insert(out.end(), p.b1.begin(), p.b1.end());
  out.insert(out.end(), p.w2.begin(), p.w2.end());
  out.push_back(p.b2);
  out.push_back(p.alpha);
  out.push_back(p.beta);
  return out;
}

void assign_flat(std::span<const double> flat, LinearRanker& p) {
  if (flat.size() != p.weights.size() + 1) throw DimensionMismatch("flat linear parameter size");
  std::copy(flat.begin(), flat.end() - 1, p.weights.begin());
  p.bias = flat.back();
}

void assign_flat(std::span<const double> flat, MlpRanker& p) {
  if (flat.size() != p.w1.size() + 2 * p.hidden + 3) throw DimensionMismatch("flat mlp parameter size");
  auto it = flat.begin();
  auto take = [&](std::vector<double>& v) {
    std::copy(it, it + static_cast<std::ptrdiff_t>(v.size()), v.begin());
    it += static_cast<std::ptrdiff_t>(v.size());
  };
  take(p.w1);
  take(p.b1);
  take(p.w2);
  p.b2 = *it++;
  p.alpha = *it++;
  p.beta = *it++;
}

void MinMaxScaler::fit(std::span<const std::vector<double>> rows) {
  lo.clear();
  hi.clear();
  if (rows.empty()) return;
  lo = rows.front();
  hi = rows.front();
  for (const auto& r : rows) {
    if (r.size() != lo.size()) throw DimensionMismatch("scaler rows differ in width");
    for (std::size_t i = 0; i < r.size(); ++i) {
      lo[i] = std::min(lo[i], r[i]);
      hi[i] = std::max(hi[i], r[i]);
    }
  }
}

std::vector<double> MinMaxScaler::transform(std::span<const double> x) const {
  check_dim(lo.size(), x);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double range = hi[i] - lo[i];
    out[i] = range > 0.0 ? (x[i] - lo[i]) / range : 0.0;
  }
  return out;
}

double Ranker::score(std::span<const double> x) const {
  if (scaler.fitted()) {
    const auto scaled = scaler.transform(x);
    return kind == ModelKind::Linear ? lr_score(linear, scaled) : mlp_score(mlp, scaled);
  }
  return kind == ModelKind::Linear ? lr_score(linear, x) : mlp_score(mlp, x);
}

double mean_pair_loss(const Ranker& model, std::span<const PairInstance> instances, double l2) {
  double total = 0.0;
  std::size_t pairs = 0;
  for (const auto& inst : instances)
    for (const auto& pos : inst.positives)
      for (const auto& neg : inst.negatives) {
        total += model.kind == ModelKind::Linear ? lr_pair_loss(model.linear, pos, neg)
                                                 : mlp_pair_loss(model.mlp, pos, neg, l2);
        ++pairs;
      }
  return pairs ? total / static_cast<double>(pairs) : 0.0;
}

namespace {

struct PairRef {
  std::size_t instance, pos, neg;
};

template <typename Params, typename GradFn>
void sgd_loop(Params& params, std::span<const PairInstance> instances, const SgdOptions& opt, std::mt19937_64& rng,
              GradFn&& grad_fn, Ranker& view, SgdResult& result) {
  auto step = [&](const std::vector<double>& g, double scale) {
    auto flat = flatten(params);
    for (std::size_t k = 0; k < flat.size(); ++k) flat[k] -= opt.learning_rate * scale * g[k];
    assign_flat(flat, params);
  };
  std::vector<PairRef> pairs;
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (std::size_t p = 0; p < instances[i].positives.size(); ++p)
      for (std::size_t n = 0; n < instances[i].negatives.size(); ++n) pairs.push_back({i, p, n});
  std::vector<std::size_t> order(instances.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  Params grad;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    if (opt.batch == BatchUnit::Pair) {
      std::shuffle(pairs.begin(), pairs.end(), rng);
      for (const auto& pr : pairs) {
        const auto& inst = instances[pr.instance];
        grad_fn(params, inst.positives[pr.pos], inst.negatives[pr.neg], grad);
        step(flatten(grad), 1.0);
      }
    } else {
      std::shuffle(order.begin(), order.end(), rng);
      for (auto i : order) {
        const auto& inst = instances[i];
        std::vector<double> acc;
        for (const auto& pos : inst.positives)
          for (const auto& neg : inst.negatives) {
            grad_fn(params, pos, neg, grad);
            auto g = flatten(grad);
            if (acc.empty()) acc.assign(g.size(), 0.0);
            for (std::size_t k = 0; k < g.size(); ++k) acc[k] += g[k];
          }
        step(acc, 1.0 / static_cast<double>(inst.positives.size() * inst.negatives.size()));
      }
    }
    if constexpr (std::is_same_v<Params, LinearRanker>) view.linear = params;
    else view.mlp = params;
    result.epoch_losses.push_back(mean_pair_loss(view, instances, opt.l2));
  }
}

}  // namespace

SgdResult sgd_fit(ModelKind kind, std::span<const PairInstance> instances, const SgdOptions& opt) {
  if (instances.empty()) throw UntrainedModelError("no training instances");
  const std::size_t dim = instances.front().positives.empty() ? 0 : instances.front().positives.front().size();
  for (const auto& inst : instances) {
    if (inst.positives.empty() || inst.negatives.empty())
      throw std::invalid_argument("instance needs positive and negative developers");
    for (const auto* side : {&inst.positives, &inst.negatives})
      for (const auto& x : *side)
        if (x.size() != dim) throw DimensionMismatch("instance feature widths differ");
  }

  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> init(-opt.init_scale, opt.init_scale);
  SgdResult result;
  result.model.kind = kind;

  if (kind == ModelKind::Linear) {
    LinearRanker p;
    p.weights.resize(dim);
    for (auto& w : p.weights) w = init(rng);
    result.model.linear = p;
    result.initial_loss = mean_pair_loss(result.model, instances, opt.l2);
    sgd_loop(p, instances, opt, rng,
             [](const LinearRanker& q, std::span<const double> a, std::span<const double> b, LinearRanker& g) {
               lr_pair_loss_grad(q, a, b, g);
             },
             result.model, result);
    result.model.linear = p;
  } else {
    MlpRanker p;
    p.inputs = dim;
    p.hidden = opt.hidden;
    p.w1.resize(dim * opt.hidden);
    p.b1.assign(opt.hidden, 0.0);
    p.w2.resize(opt.hidden);
    for (auto& w : p.w1) w = init(rng);
    for (auto& w : p.w2) w = init(rng);
    p.alpha = opt.alpha0;
    p.beta = opt.beta0;
    result.model.mlp = p;
    result.initial_loss = mean_pair_loss(result.model, instances, opt.l2);
    const double l2 = opt.l2;
    sgd_loop(p, instances, opt, rng,
             [l2](const MlpRanker& q, std::span<const double> a, std::span<const double> b, MlpRanker& g) {
               mlp_pair_loss_grad(q, a, b, l2, g);
             },
             result.model, result);
    result.model.mlp = p;
  }
  return result;
}

std::string to_json(const Ranker& model, const SgdOptions& opt) {
  nlohmann::json j;
  j["kind"] = model.kind == ModelKind::Linear ? "lr" : "mlp";
  if (model.kind == ModelKind::Linear) {
    j["weights"] = model.linear.weights;
    j["bias"] = model.linear.bias;
  } else {
    const auto& m = model.mlp;
    j["inputs"] = m.inputs;
    j["hidden"] = m.hidden;
    j["w1"] = m.w1;
    j["b1"] = m.b1;
    j["w2"] = m.w2;
    j["b2"] = m.b2;
    j["alpha"] = m.alpha;
    j["beta"] = m.beta;
  }
  j["scaler"] = {{"lo", model.scaler.lo}, {"hi", model.scaler.hi}};
  j["training"] = {{"epochs", opt.epochs},         {"learning_rate", opt.learning_rate},
                   {"seed", opt.seed},             {"hidden", opt.hidden},
                   {"l2", opt.l2},                 {"alpha0", opt.alpha0},
                   {"beta0", opt.beta0},           {"init_scale", opt.init_scale},
                   {"batch", opt.batch == BatchUnit::Pair ? "pair" : "instance"}};
  return j.dump(2);
}

Ranker ranker_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    Ranker r;
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "lr") {
      r.kind = ModelKind::Linear;
      r.linear.weights = j.at("weights").get<std::vector<double>>();
      r.linear.bias = j.at("bias").get<double>();
    } else if (kind == "mlp") {
      r.kind = ModelKind::Mlp;
      auto& m = r.mlp;
      m.inputs = j.at("inputs").get<std::size_t>();
      m.hidden = j.at("hidden").get<std::size_t>();
      m.w1 = j.at("w1").get<std::vector<double>>();
      m.b1 = j.at("b1").get<std::vector<double>>();
      m.w2 = j.at("w2").get<std::vector<double>>();
      m.b2 = j.at("b2").get<double>();
      m.alpha = j.at("alpha").get<double>();
      m.beta = j.at("beta").get<double>();
      if (m.w1.size() != m.inputs * m.hidden || m.b1.size() != m.hidden || m.w2.size() != m.hidden)
        throw DimensionMismatch("mlp checkpoint shapes inconsistent");
    } else {
      throw std::invalid_argument("unknown model kind " + kind);
    }
    r.scaler.lo = j.at("scaler").at("lo").get<std::vector<double>>();
    r.scaler.hi = j.at("scaler").at("hi").get<std::vector<double>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed ranker checkpoint: ") + e.what());
  }
}

}  // namespace pkgpulse

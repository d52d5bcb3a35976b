#include "pkgpulse/featurize.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "pkgpulse/error.hpp"

namespace pkgpulse {

FeatureVector& FeatureVector::append(const FeatureVector& other) {
  names.insert(names.end(), other.names.begin(), other.names.end());
  values.insert(values.end(), other.values.begin(), other.values.end());
  return *this;
}

void DesignMatrix::append(const FeatureVector& row) {
  if (names_.empty() && values_.empty()) names_ = row.names;
  if (row.names != names_) throw DimensionMismatch("feature names differ from design matrix header");
  values_.insert(values_.end(), row.values.begin(), row.values.end());
}

void DesignMatrix::append(std::span<const double> row) {
  if (row.size() != names_.size()) throw DimensionMismatch("row width differs from design matrix");
  values_.insert(values_.end(), row.begin(), row.end());
}

void DesignMatrix::write_tsv(std::ostream& os, std::span<const std::string> row_labels) const {
  const bool labelled = !row_labels.empty();
  if (labelled && row_labels.size() != rows()) throw DimensionMismatch("one label per row expected");
  if (labelled) os << "id\t";
  for (std::size_t c = 0; c < names_.size(); ++c) os << (c ? "\t" : "") << names_[c];
  os << '\n';
  for (std::size_t r = 0; r < rows(); ++r) {
    if (labelled) os << row_labels[r] << '\t';
    for (std::size_t c = 0; c < cols(); ++c) os << (c ? "\t" : "") << (*this)(r, c);
    os << '\n';
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

namespace {

double carried_size(const Corpus& corpus, std::string_view package, int t) {
  for (int tau = t; tau >= corpus.first_index(); --tau) {
    const auto& snap = corpus.at(tau);
    if (snap.contains(package)) return static_cast<double>(snap.size_of(package));
  }
  return 0.0;
}

void require(const Corpus& corpus, int t, int lags) {
  if (!corpus.has_index(t) || !corpus.has_index(t - lags))
    throw RangeError("time " + std::to_string(t) + " needs " + std::to_string(lags) + " earlier distributions");
}

}  // namespace

FeatureVector urgency_auto_features(const Corpus& corpus, std::string_view package, int t) {
  require(corpus, t, 2);
  FeatureVector f;
  f.push("bugs_t-1", static_cast<double>(corpus.at(t - 1).bug_count(package)));
  f.push("bugs_t-2", static_cast<double>(corpus.at(t - 2).bug_count(package)));
  f.push("size_t-1", carried_size(corpus, package, t - 1));
  f.push("size_t", carried_size(corpus, package, t));
  return f;
}

FeatureVector urgency_dep_features(const Corpus& corpus, std::string_view package, int t,
                                   const UrgencyFeatureOptions& options) {
  require(corpus, t, 1);
  const Snapshot& graph = corpus.at(options.neighbor_time == NeighborTime::Current ? t : t - 1);
  const Snapshot& previous = corpus.at(t - 1);

  auto stats = [&](const StringSet& neighbors) {
    std::vector<double> counts;
    counts.reserve(neighbors.size());
    for (const auto& n : neighbors) counts.push_back(static_cast<double>(previous.bug_count(n)));
    const double mx = counts.empty() ? 0.0 : *std::max_element(counts.begin(), counts.end());
    return std::pair{mx, median(std::move(counts))};
  };

  static const StringSet kNone;
  const bool present = graph.contains(package);
  const StringSet& in = present ? graph.in_neighbors(package) : kNone;
  const StringSet& out = present ? graph.out_neighbors(package) : kNone;
  auto [in_max, in_median] = stats(in);
  auto [out_max, out_median] = stats(out);

  FeatureVector f;
  f.push("in_max_bugs_t-1", in_max);
  f.push("in_median_bugs_t-1", in_median);
  f.push("out_max_bugs_t-1", out_max);
  f.push("out_median_bugs_t-1", out_median);
  if (options.neighbor_indicators) {
    f.push("has_in_neighbors", in.empty() ? 0.0 : 1.0);
    f.push("has_out_neighbors", out.empty() ? 0.0 : 1.0);
  }
  return f;
}

FeatureVector devrec_auto_features(const Corpus& corpus, std::string_view package, std::string_view developer,
                                   int t, int window) {
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  DeveloperActivity total;
  if (auto w = clamp_window(corpus, t - window, t - 1))
    for (int tau = w->first; tau <= w->second; ++tau) total += corpus.at(tau).activity_of(developer);
  const bool recent = corpus.has_index(t - 1) && corpus.at(t - 1).devs_of(package).contains(developer);

  FeatureVector f;
  f.push("urgency_high", static_cast<double>(total.high));
  f.push("urgency_medium", static_cast<double>(total.medium));
  f.push("urgency_low", static_cast<double>(total.low));
  f.push("bugs_closed", static_cast<double>(total.bugs_closed));
  f.push("worked_t-1", recent ? 1.0 : 0.0);
  return f;
}

StringSet neighbor_developers(const Snapshot& snapshot, std::string_view package) {
  StringSet out;
  if (!snapshot.contains(package)) return out;
  for (const auto* side : {&snapshot.in_neighbors(package), &snapshot.out_neighbors(package)})
    for (const auto& n : *side) {
      const auto& devs = snapshot.devs_of(n);
      out.insert(devs.begin(), devs.end());
    }
  return out;
}

bool in_neighbor_list(const Snapshot& snapshot, std::string_view package, std::string_view developer) {
  if (!snapshot.contains(package)) return false;
  for (const auto* side : {&snapshot.in_neighbors(package), &snapshot.out_neighbors(package)})
    for (const auto& n : *side)
      if (snapshot.devs_of(n).contains(developer)) return true;
  return false;
}

FeatureVector devrec_dep_features(const Corpus& corpus, std::string_view package, std::string_view developer,
                                  int t, int window) {
  if (window < 2) throw std::invalid_argument("dependency features need K >= 2");
  const auto k = static_cast<std::size_t>(window);
  std::vector<bool> main(k + 1, false), nbr(k + 1, false);  // indexed by lag 1..K
  for (std::size_t lag = 1; lag <= k; ++lag) {
    const int tau = t - static_cast<int>(lag);
    if (!corpus.has_index(tau)) continue;
    const Snapshot& snap = corpus.at(tau);
    main[lag] = snap.devs_of(package).contains(developer);
    nbr[lag] = in_neighbor_list(snap, package, developer);
  }
  bool main_earlier = false, nbr_earlier = false;
  for (std::size_t lag = 2; lag <= k; ++lag) {
    main_earlier = main_earlier || main[lag];
    nbr_earlier = nbr_earlier || nbr[lag];
  }

  FeatureVector f;
  for (std::size_t lag = 2; lag <= k; ++lag) f.push("main_t-" + std::to_string(lag), main[lag] ? 1.0 : 0.0);
  for (std::size_t lag = 1; lag <= k; ++lag) f.push("nbr_t-" + std::to_string(lag), nbr[lag] ? 1.0 : 0.0);
  f.push("main_t-1_and_nbr_earlier", main[1] && nbr_earlier ? 1.0 : 0.0);
  f.push("nbr_t-1_and_main_earlier", nbr[1] && main_earlier ? 1.0 : 0.0);
  f.push("nbr_t-1_and_nbr_earlier", nbr[1] && nbr_earlier ? 1.0 : 0.0);
  return f;
}

}  // namespace pkgpulse

#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pkgpulse/tgraph.hpp"

namespace pkgpulse {

/// Named, ordered numeric features for one instance.
struct FeatureVector {
  std::vector<std::string> names;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  void push(std::string name, double value) {
    names.push_back(std::move(name));
    values.push_back(value);
  }
  FeatureVector& append(const FeatureVector& other);
};

/// Row-major matrix whose columns share one list of feature names.
class DesignMatrix {
 public:
  DesignMatrix() = default;
  explicit DesignMatrix(std::vector<std::string> names) : names_(std::move(names)) {}

  /// Throws DimensionMismatch when names differ from the matrix header.
  void append(const FeatureVector& row);
  void append(std::span<const double> row);

  std::size_t rows() const noexcept { return names_.empty() ? 0 : values_.size() / names_.size(); }
  std::size_t cols() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::span<const double> row(std::size_t i) const { return {values_.data() + i * cols(), cols()}; }
  std::span<double> row(std::size_t i) { return {values_.data() + i * cols(), cols()}; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols() + c]; }

  /// TSV with a header row; optional leading label column.
  void write_tsv(std::ostream& os, std::span<const std::string> row_labels = {}) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

/// Where neighbor sets are taken from when features read bug counts at t-1.
enum class NeighborTime { Current, Previous };

struct UrgencyFeatureOptions {
  NeighborTime neighbor_time = NeighborTime::Current;
  /// Appends has_in_neighbors / has_out_neighbors indicator bits.
  bool neighbor_indicators = false;
};

/// [bugs(t-1), bugs(t-2), size(t-1), size(t)]. Absent packages contribute 0
/// bugs; sizes carry forward the last known value (0 if never seen).
/// Throws RangeError unless t and t-2 lie in the corpus.
FeatureVector urgency_auto_features(const Corpus& corpus, std::string_view package, int t);

/// [max_in, median_in, max_out, median_out] of neighbor bug counts at t-1,
/// zeros for empty neighborhoods. Throws RangeError unless t and t-1 lie
/// in the corpus.
FeatureVector urgency_dep_features(const Corpus& corpus, std::string_view package, int t,
                                   const UrgencyFeatureOptions& options = {});

/// [n_high, n_medium, n_low, n_bugs_closed, worked_on_package_at_t-1]; the
/// counts sum the developer's changelog activity over [t-K, t-1] across all
/// packages.
FeatureVector devrec_auto_features(const Corpus& corpus, std::string_view package, std::string_view developer,
                                   int t, int window);

/// 2K+2 membership bits over the previous K distributions: main-list bits
/// for lags 2..K, neighbor-list bits for lags 1..K, then the three
/// lag-1/earlier conjunctions (main & neighbor, neighbor & main,
/// neighbor & neighbor). Throws std::invalid_argument for K < 2.
FeatureVector devrec_dep_features(const Corpus& corpus, std::string_view package, std::string_view developer,
                                  int t, int window);

/// Union of devs(s', tau) over in- and out-neighbors s' of `package` at tau.
StringSet neighbor_developers(const Snapshot& snapshot, std::string_view package);

/// Whether `developer` works on any in- or out-neighbor of `package`.
bool in_neighbor_list(const Snapshot& snapshot, std::string_view package, std::string_view developer);

double median(std::vector<double> values);

}  // namespace pkgpulse

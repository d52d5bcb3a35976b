#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pkgpulse/datetime.hpp"

namespace pkgpulse {

struct DistributionId {
  std::string name;
  int index = 0;

  friend auto operator<=>(const DistributionId&, const DistributionId&) = default;
};

using StringSet = std::set<std::string, std::less<>>;
using Edge = std::pair<std::string, std::string>;
using EdgeSet = std::set<Edge>;

/// Per-distribution changelog aggregates of one developer, summed over all
/// packages. `other` counts urgencies outside low/medium/high.
struct DeveloperActivity {
  std::int64_t high = 0;
  std::int64_t medium = 0;
  std::int64_t low = 0;
  std::int64_t other = 0;
  std::int64_t bugs_closed = 0;

  DeveloperActivity& operator+=(const DeveloperActivity& o) {
    high += o.high;
    medium += o.medium;
    low += o.low;
    other += o.other;
    bugs_closed += o.bugs_closed;
    return *this;
  }
  friend bool operator==(const DeveloperActivity&, const DeveloperActivity&) = default;
};

struct PackageInfo {
  std::uint64_t size = 0;             // ps(s,t), bytes
  std::vector<std::string> binaries;  // sorted
  std::vector<std::int64_t> bug_ids;  // sorted, bugs(s,t)

  friend bool operator==(const PackageInfo&, const PackageInfo&) = default;
};

/// Plain description of one distribution's graph. Snapshot validates and
/// indexes it.
struct SnapshotData {
  DistributionId distribution;
  std::optional<Date> release_date;
  std::map<std::string, PackageInfo, std::less<>> packages;
  EdgeSet dep_edges;                                        // dependent -> dependee
  std::map<std::string, StringSet, std::less<>> developers;  // package -> developer ids
  std::map<std::string, DeveloperActivity, std::less<>> activity;

  friend bool operator==(const SnapshotData&, const SnapshotData&) = default;
};

/// The heterogeneous graph G_t: package->package depends edges and
/// package->developer contributed-by edges. Immutable once built.
class Snapshot {
 public:
  /// Throws std::invalid_argument on self-loops, edges touching absent
  /// packages, or developers attached to absent packages.
  explicit Snapshot(SnapshotData data);

  const DistributionId& distribution() const noexcept { return data_.distribution; }
  int index() const noexcept { return data_.distribution.index; }
  const std::string& name() const noexcept { return data_.distribution.name; }
  const SnapshotData& data() const noexcept { return data_; }

  bool contains(std::string_view package) const;
  std::size_t package_count() const noexcept { return data_.packages.size(); }
  std::vector<std::string> package_names() const;

  /// Throws AbsentPackageError.
  std::uint64_t size_of(std::string_view package) const;
  /// Zero for absent packages.
  std::size_t bug_count(std::string_view package) const;

  /// Dependees of `package`. Throws AbsentPackageError.
  const StringSet& out_neighbors(std::string_view package) const;
  /// Dependents of `package`. Throws AbsentPackageError.
  const StringSet& in_neighbors(std::string_view package) const;

  /// devs(s,t); empty for absent packages or packages without changelog events.
  const StringSet& devs_of(std::string_view package) const;
  DeveloperActivity activity_of(std::string_view developer) const;

  friend bool operator==(const Snapshot& a, const Snapshot& b) { return a.data_ == b.data_; }

 private:
  SnapshotData data_;
  std::map<std::string, StringSet, std::less<>> out_;
  std::map<std::string, StringSet, std::less<>> in_;
};

/// Ordered snapshots with consecutive distribution indexes.
class Corpus {
 public:
  Corpus() = default;
  /// Sorts by index; throws std::invalid_argument unless indexes are
  /// consecutive and names unique.
  explicit Corpus(std::vector<Snapshot> snapshots);

  bool empty() const noexcept { return snapshots_.empty(); }
  std::size_t size() const noexcept { return snapshots_.size(); }
  int first_index() const;
  int last_index() const;
  bool has_index(int t) const noexcept;

  /// Throws RangeError.
  const Snapshot& at(int t) const;
  const Snapshot& by_name(std::string_view name) const;
  std::optional<int> index_of(std::string_view name) const;

  const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }

  /// Copy of this corpus with the snapshot at the same index replaced.
  Corpus with_snapshot(Snapshot replacement) const;

 private:
  std::vector<Snapshot> snapshots_;
};

struct LiftResult {
  EdgeSet edges;
  std::size_t dropped = 0;  // pairs naming a binary with no known source
};

/// Lifts binary-level depends pairs to source level: (s, s') is present iff
/// some binary of s depends on some binary of s' and s != s'.
LiftResult lift_dependencies(const EdgeSet& binary_depends,
                             const std::map<std::string, std::string, std::less<>>& binary_to_source);

/// Union of devs(s, tau) for tau in [from_t, to_t]. Throws RangeError if the
/// window is inverted or leaves the corpus.
StringSet devs_window(const Corpus& corpus, std::string_view package, int from_t, int to_t);

/// Clamps [from_t, to_t] to the corpus; nullopt when nothing remains.
std::optional<std::pair<int, int>> clamp_window(const Corpus& corpus, int from_t, int to_t);

}  // namespace pkgpulse

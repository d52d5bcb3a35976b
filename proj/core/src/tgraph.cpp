#include "pkgpulse/tgraph.hpp"

#include <algorithm>
#include <stdexcept>

#include "pkgpulse/error.hpp"

namespace pkgpulse {
namespace {

const StringSet& empty_set() {
  static const StringSet kEmpty;
  return kEmpty;
}

}  // namespace

Snapshot::Snapshot(SnapshotData data) : data_(std::move(data)) {
  for (const auto& [name, info] : data_.packages) {
    out_.try_emplace(name);
    in_.try_emplace(name);
  }
  for (const auto& [from, to] : data_.dep_edges) {
    if (from == to) throw std::invalid_argument("self-loop dependency on " + from);
    if (!data_.packages.contains(from) || !data_.packages.contains(to))
      throw std::invalid_argument("dependency edge " + from + " -> " + to + " touches an absent package");
    out_[from].insert(to);
    in_[to].insert(from);
  }
  for (auto it = data_.developers.begin(); it != data_.developers.end();) {
    if (!data_.packages.contains(it->first))
      throw std::invalid_argument("developers attached to absent package " + it->first);
    // Canonical form: packages without developers carry no entry.
    it = it->second.empty() ? data_.developers.erase(it) : std::next(it);
  }
}

bool Snapshot::contains(std::string_view package) const { return data_.packages.find(package) != data_.packages.end(); }

std::vector<std::string> Snapshot::package_names() const {
  std::vector<std::string> names;
  names.reserve(data_.packages.size());
  for (const auto& [name, info] : data_.packages) names.push_back(name);
  return names;
}

std::uint64_t Snapshot::size_of(std::string_view package) const {
  auto it = data_.packages.find(package);
  if (it == data_.packages.end()) throw AbsentPackageError(std::string(package));
  return it->second.size;
}

std::size_t Snapshot::bug_count(std::string_view package) const {
  auto it = data_.packages.find(package);
  return it == data_.packages.end() ? 0 : it->second.bug_ids.size();
}

const StringSet& Snapshot::out_neighbors(std::string_view package) const {
  auto it = out_.find(package);
  if (it == out_.end()) throw AbsentPackageError(std::string(package));
  return it->second;
}

const StringSet& Snapshot::in_neighbors(std::string_view package) const {
  auto it = in_.find(package);
  if (it == in_.end()) throw AbsentPackageError(std::string(package));
  return it->second;
}

const StringSet& Snapshot::devs_of(std::string_view package) const {
  auto it = data_.developers.find(package);
  return it == data_.developers.end() ? empty_set() : it->second;
}

DeveloperActivity Snapshot::activity_of(std::string_view developer) const {
  auto it = data_.activity.find(developer);
  return it == data_.activity.end() ? DeveloperActivity{} : it->second;
}

Corpus::Corpus(std::vector<Snapshot> snapshots) : snapshots_(std::move(snapshots)) {
  std::sort(snapshots_.begin(), snapshots_.end(),
            [](const Snapshot& a, const Snapshot& b) { return a.index() < b.index(); });
  StringSet names;
  for (std::size_t i = 0; i < snapshots_.size(); ++i) {
    if (i > 0 && snapshots_[i].index() != snapshots_[i - 1].index() + 1)
      throw std::invalid_argument("distribution indexes are not consecutive");
    if (!names.insert(snapshots_[i].name()).second)
      throw std::invalid_argument("duplicate distribution name " + snapshots_[i].name());
  }
}

int Corpus::first_index() const {
  if (snapshots_.empty()) throw RangeError("empty corpus");
  return snapshots_.front().index();
}

int Corpus::last_index() const {
  if (snapshots_.empty()) throw RangeError("empty corpus");
  return snapshots_.back().index();
}

bool Corpus::has_index(int t) const noexcept {
  return !snapshots_.empty() && t >= snapshots_.front().index() && t <= snapshots_.back().index();
}

const Snapshot& Corpus::at(int t) const {
  if (!has_index(t)) throw RangeError("distribution index " + std::to_string(t) + " outside corpus");
  return snapshots_[static_cast<std::size_t>(t - snapshots_.front().index())];
}

const Snapshot& Corpus::by_name(std::string_view name) const {
  for (const auto& s : snapshots_)
    if (s.name() == name) return s;
  throw RangeError("unknown distribution " + std::string(name));
}

std::optional<int> Corpus::index_of(std::string_view name) const {
  for (const auto& s : snapshots_)
    if (s.name() == name) return s.index();
  return std::nullopt;
}

Corpus Corpus::with_snapshot(Snapshot replacement) const {
  std::vector<Snapshot> copy = snapshots_;
  const int t = replacement.index();
  if (!has_index(t)) throw RangeError("replacement snapshot index outside corpus");
  copy[static_cast<std::size_t>(t - first_index())] = std::move(replacement);
  return Corpus(std::move(copy));
}

LiftResult lift_dependencies(const EdgeSet& binary_depends,
                             const std::map<std::string, std::string, std::less<>>& binary_to_source) {
  LiftResult result;
  for (const auto& [from, to] : binary_depends) {
    auto a = binary_to_source.find(from);
    auto b = binary_to_source.find(to);
    if (a == binary_to_source.end() || b == binary_to_source.end()) {
      ++result.dropped;
      continue;
    }
    if (a->second != b->second) result.edges.emplace(a->second, b->second);
  }
  return result;
}

StringSet devs_window(const Corpus& corpus, std::string_view package, int from_t, int to_t) {
  if (from_t > to_t || !corpus.has_index(from_t) || !corpus.has_index(to_t))
    throw RangeError("developer window [" + std::to_string(from_t) + ", " + std::to_string(to_t) + "] invalid");
  StringSet out;
  for (int t = from_t; t <= to_t; ++t) {
    const auto& devs = corpus.at(t).devs_of(package);
    out.insert(devs.begin(), devs.end());
  }
  return out;
}

std::optional<std::pair<int, int>> clamp_window(const Corpus& corpus, int from_t, int to_t) {
  if (corpus.empty()) return std::nullopt;
  from_t = std::max(from_t, corpus.first_index());
  to_t = std::min(to_t, corpus.last_index());
  if (from_t > to_t) return std::nullopt;
  return std::pair{from_t, to_t};
}

}  // namespace pkgpulse

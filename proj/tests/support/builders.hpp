#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pkgpulse/tgraph.hpp"

namespace pkgpulse::testing {

/// Hand-assembles small corpora with releases t = 1..n named t01, t02, ...
class CorpusBuilder {
 public:
  explicit CorpusBuilder(int releases);

  CorpusBuilder& package(int t, const std::string& name, std::uint64_t size = 1000, int bugs = 0);
  /// Same package in every release in [from, to].
  CorpusBuilder& package_span(int from, int to, const std::string& name, std::uint64_t size = 1000, int bugs = 0);
  CorpusBuilder& bugs(int t, const std::string& name, int count);
  CorpusBuilder& edge(int t, const std::string& dependent, const std::string& dependee);
  CorpusBuilder& dev(int t, const std::string& package, const std::string& developer);
  CorpusBuilder& activity(int t, const std::string& developer, const DeveloperActivity& a);

  Corpus build() const;

 private:
  std::vector<SnapshotData> data_;
  std::int64_t next_bug_ = 1;
};

std::string fixture_dir();

}  // namespace pkgpulse::testing

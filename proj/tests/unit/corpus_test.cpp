#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "builders.hpp"
#include "pkgpulse/corpus.hpp"
#include "pkgpulse/normalized.hpp"

namespace pkgpulse {
namespace {

namespace fs = std::filesystem;
using namespace std::chrono;

Release release(const char* name, int index, const char* date) { return {{name, index}, *parse_date(date)}; }

BugRecord bug_at(Date release_date, int days_after) {
  return {1, "pkg", Timestamp{release_date + days{days_after}} + hours{1}, std::nullopt};
}

TEST(AssignBugs, WindowBoundaries) {
  const std::vector<Release> releases = {release("yakkety", 1, "2016-10-13"), release("zesty", 2, "2017-04-13"),
                                         release("artful", 3, "2017-10-19")};
  const Date zesty = releases[1].release_date;
  auto out = assign_bugs({bug_at(zesty, 90), bug_at(zesty, 182), bug_at(zesty, 183), bug_at(zesty, -1)}, releases);
  ASSERT_TRUE(out[0].assigned_distribution);
  EXPECT_EQ(out[0].assigned_distribution->name, "zesty");
  EXPECT_EQ(out[1].assigned_distribution->name, "zesty");
  EXPECT_FALSE(out[2].assigned_distribution);  // half-open window
  ASSERT_TRUE(out[3].assigned_distribution);
  EXPECT_EQ(out[3].assigned_distribution->name, "yakkety");
}

TEST(AssignBugs, GapBeforeNextReleaseIsUnassigned) {
  const std::vector<Release> releases = {release("a", 1, "2010-01-01"), release("b", 2, "2011-01-01")};
  auto out = assign_bugs({bug_at(releases[0].release_date, 210)}, releases);
  EXPECT_FALSE(out[0].assigned_distribution);
  auto before = assign_bugs({bug_at(releases[0].release_date, -10)}, releases);
  EXPECT_FALSE(before[0].assigned_distribution);
}

TEST(MapEvent, TargetDistributionWinsAndPocketIsStripped) {
  const std::vector<Release> releases = {release("yakkety", 1, "2016-10-13"), release("zesty", 2, "2017-04-13")};
  ChangeEvent e;
  e.target_distribution = "yakkety-proposed";
  e.timestamp = Timestamp{releases[1].release_date};
  ASSERT_TRUE(map_event(e, releases));
  EXPECT_EQ(map_event(e, releases)->name, "yakkety");
  e.target_distribution = "unstable";
  e.timestamp = Timestamp{*parse_date("2017-01-01")};
  EXPECT_EQ(map_event(e, releases)->name, "zesty");
  e.timestamp.reset();
  EXPECT_FALSE(map_event(e, releases));
}

TEST(BuildSnapshot, EmptyInputsGiveEmptyGraph) {
  SnapshotReport report;
  Snapshot s = build_snapshot({{"x", 1}, std::nullopt, {}, {}, {}, {}}, &report);
  EXPECT_EQ(s.package_count(), 0u);
  EXPECT_EQ(report.dangling_edges, 0u);
}

TEST(BuildSnapshot, DanglingDependencyIsDroppedAndCounted) {
  std::vector<SourceRecord> sources = {{"a", {"a"}, std::nullopt}};
  std::vector<BinaryRecord> bins = {{"a", "a", 10, {"missing-lib"}, {}}};
  SnapshotReport report;
  Snapshot s = build_snapshot({{"x", 1}, std::nullopt, sources, bins, {}, {}}, &report);
  EXPECT_EQ(s.package_count(), 1u);
  EXPECT_TRUE(s.out_neighbors("a").empty());
  EXPECT_EQ(report.dangling_edges, 1u);
  EXPECT_EQ(s.size_of("a"), 10u);
}

class FixtureCorpus : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { dataset_ = new Dataset(ingest_raw(testing::fixture_dir() + "/raw")); }
  static void TearDownTestSuite() {
    delete dataset_;
    dataset_ = nullptr;
  }
  static const Corpus& corpus() { return dataset_->corpus; }
  static Dataset* dataset_;
};
Dataset* FixtureCorpus::dataset_ = nullptr;

TEST_F(FixtureCorpus, ReleasesAndPackageCounts) {
  ASSERT_EQ(corpus().size(), 3u);
  EXPECT_EQ(corpus().at(1).name(), "wily");
  EXPECT_EQ(corpus().at(3).name(), "zesty");
  for (const auto& s : corpus().snapshots()) EXPECT_EQ(s.package_count(), 7u);
  EXPECT_EQ(dataset_->total_parse_errors(), 0u);
}

TEST_F(FixtureCorpus, SystemdSizesAndBugs) {
  const auto& yakkety = corpus().by_name("yakkety");
  const auto& zesty = corpus().by_name("zesty");
  EXPECT_EQ(yakkety.size_of("systemd"), 4430000u);
  EXPECT_EQ(yakkety.bug_count("systemd"), 15u);
  EXPECT_EQ(zesty.size_of("systemd"), 6120000u);
  EXPECT_EQ(zesty.bug_count("systemd"), 21u);
  EXPECT_EQ(yakkety.bug_count("linux"), 60u);
}

TEST_F(FixtureCorpus, SourceLevelEdgesAndDevelopers) {
  const auto& zesty = corpus().by_name("zesty");
  const auto& out = zesty.out_neighbors("systemd");
  for (const char* dep : {"glibc", "libseccomp", "iptables"}) EXPECT_TRUE(out.contains(dep)) << dep;
  EXPECT_TRUE(corpus().by_name("yakkety").in_neighbors("systemd").contains("linux"));
  EXPECT_TRUE(zesty.out_neighbors("0ad").contains("0ad-data"));
  EXPECT_FALSE(zesty.out_neighbors("0ad").contains("0ad"));
  const auto& devs = zesty.devs_of("systemd");
  EXPECT_TRUE(devs.contains("martin.pitt@ubuntu.com"));
  EXPECT_TRUE(devs.contains("xnox@ubuntu.com"));
  EXPECT_EQ(dataset_->developer_names.at("xnox@ubuntu.com"), "Dimitri John Ledkov");
}

TEST_F(FixtureCorpus, ActivityAndBookkeeping) {
  const auto a = corpus().by_name("zesty").activity_of("vcheng@debian.org");
  EXPECT_EQ(a.other, 1);
  EXPECT_EQ(a.high + a.medium + a.low, 0);
  EXPECT_EQ(dataset_->reports.at("unassigned_bugs"), 1u);
  EXPECT_EQ(dataset_->reports.at("dangling_edges"), 0u);
}

TEST_F(FixtureCorpus, EveryBugInExactlyOnePackageRelease) {
  std::map<std::int64_t, int> seen;
  for (const auto& s : corpus().snapshots())
    for (const auto& [name, info] : s.data().packages)
      for (auto id : info.bug_ids) ++seen[id];
  for (const auto& [id, n] : seen) EXPECT_EQ(n, 1) << id;
  EXPECT_EQ(seen.size(), 52u + 80u + 79u);
}

TEST_F(FixtureCorpus, NormalizedRoundTripIsStable) {
  const fs::path dir = fs::temp_directory_path() / "pkgpulse_roundtrip";
  fs::remove_all(dir);
  write_normalized(dir / "a", *dataset_);
  Dataset back = load_normalized(dir / "a");
  ASSERT_EQ(back.corpus.size(), corpus().size());
  for (std::size_t i = 0; i < corpus().size(); ++i) EXPECT_EQ(back.corpus.snapshots()[i], corpus().snapshots()[i]);
  EXPECT_EQ(back.developer_names, dataset_->developer_names);

  write_normalized(dir / "b", back);
  for (const auto& entry : fs::recursive_directory_iterator(dir / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path other = dir / "b" / fs::relative(entry.path(), dir / "a");
    std::ifstream x(entry.path()), y(other);
    std::stringstream sx, sy;
    sx << x.rdbuf();
    sy << y.rdbuf();
    EXPECT_EQ(sx.str(), sy.str()) << entry.path();
  }
  fs::remove_all(dir);
}

TEST(Ingest, MissingReleasesIsAnError) {
  const fs::path dir = fs::temp_directory_path() / "pkgpulse_empty_raw";
  fs::remove_all(dir);
  fs::create_directories(dir);
  EXPECT_THROW(ingest_raw(dir), MissingInputError);
  fs::remove_all(dir);
}

TEST(Ingest, TsvParsersNeverThrow) {
  std::mt19937 rng(5);
  const std::string alphabet = "0123456789-T:Z\tabc\n ";
  for (int round = 0; round < 300; ++round) {
    std::string text;
    for (std::size_t i = 0, n = rng() % 200; i < n; ++i) text += alphabet[rng() % alphabet.size()];
    ParseReport report;
    EXPECT_NO_THROW({
      parse_releases_tsv(text, report);
      parse_bugs_tsv(text, report);
    });
  }
}

}  // namespace
}  // namespace pkgpulse

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pkgpulse/datetime.hpp"
#include "pkgpulse/tgraph.hpp"

namespace pkgpulse {

// ---------------------------------------------------------------------------
// Parse diagnostics. Parsers never throw on malformed input; they record an
// issue and continue with the next stanza.

struct ParseIssue {
  std::string origin;  // file or logical input name
  std::size_t line = 0;
  std::string message;
};

struct ParseReport {
  std::vector<ParseIssue> issues;

  void add(std::string_view origin, std::size_t line, std::string message) {
    issues.push_back({std::string(origin), line, std::move(message)});
  }
  std::size_t size() const noexcept { return issues.size(); }
  bool empty() const noexcept { return issues.empty(); }
};

// ---------------------------------------------------------------------------
// Debian control stanzas

struct Stanza {
  std::size_t line = 0;  // 1-based line of the first field
  std::vector<std::pair<std::string, std::string>> fields;

  /// Case-insensitive field lookup; continuation lines already folded.
  const std::string* find(std::string_view key) const;
};

/// Splits blank-line separated "Key: value" stanzas. Continuation lines
/// (leading space or tab) are folded into the previous field with a single
/// space; '#' comment lines are skipped.
std::vector<Stanza> parse_stanzas(std::string_view text, ParseReport& report, std::string_view origin = "stanzas");

/// One stanza of a Sources index.
struct SourceRecord {
  std::string name;
  std::vector<std::string> binaries;  // sorted, unique
  std::optional<std::uint64_t> size;  // only when the stanza carries a Size field

  friend bool operator==(const SourceRecord&, const SourceRecord&) = default;
};

std::vector<SourceRecord> parse_sources_index(std::string_view text, ParseReport& report,
                                              std::string_view origin = "Sources");

/// One stanza of a binary Packages index.
struct BinaryRecord {
  std::string name;
  std::string source;  // Source field without version, or the binary name
  std::uint64_t size = 0;
  std::vector<std::string> depends;   // first alternative of each clause
  std::vector<std::string> provides;

  friend bool operator==(const BinaryRecord&, const BinaryRecord&) = default;
};

std::vector<BinaryRecord> parse_packages_index(std::string_view text, ParseReport& report,
                                               std::string_view origin = "Packages");

/// Sorted, unique package names of a Depends-style relation field. Version constraints,
/// architecture qualifiers and restriction lists are stripped; of each
/// "a | b" alternative group only the first name is kept.
std::vector<std::string> parse_relation_field(std::string_view value);

// ---------------------------------------------------------------------------
// Changelogs

enum class Urgency { Low, Medium, High, Other };

/// Case-insensitive; anything outside low/medium/high is Other.
Urgency parse_urgency(std::string_view text);
std::string_view to_string(Urgency u);

struct ChangeEvent {
  std::string source_name;
  std::string version;
  std::string target_distribution;  // first distribution token of the header
  Urgency urgency = Urgency::Other;
  std::string developer_id;    // lowercased email
  std::string developer_name;  // display name
  std::optional<Timestamp> timestamp;
  std::set<std::int64_t> bugs_closed;

  friend bool operator==(const ChangeEvent&, const ChangeEvent&) = default;
};

std::vector<ChangeEvent> parse_changelog(std::string_view text, ParseReport& report,
                                         std::string_view origin = "changelog");

/// Bug ids from "LP: #123, #456" tokens anywhere in `text`.
std::set<std::int64_t> extract_launchpad_bugs(std::string_view text);

// ---------------------------------------------------------------------------
// Releases and bugs

struct Release {
  DistributionId distribution;
  Date release_date;
};

struct BugRecord {
  std::int64_t bug_id = 0;
  std::string source_name;
  Timestamp created_at{};
  std::optional<DistributionId> assigned_distribution;

  friend bool operator==(const BugRecord&, const BugRecord&) = default;
};

inline constexpr std::chrono::days kBugWindow{183};

/// Assigns each bug to the latest release with release_date <= created_at,
/// provided created_at < release_date + kBugWindow; otherwise unassigned.
/// `releases` must have strictly increasing dates.
std::vector<BugRecord> assign_bugs(std::vector<BugRecord> bugs, std::span<const Release> releases);

/// Rows "distro<TAB>index<TAB>YYYY-MM-DD"; an optional header row is skipped.
std::vector<Release> parse_releases_tsv(std::string_view text, ParseReport& report,
                                        std::string_view origin = "releases.tsv");
/// Rows "bug_id<TAB>source_name<TAB>created_at"; an optional header row is skipped.
std::vector<BugRecord> parse_bugs_tsv(std::string_view text, ParseReport& report,
                                      std::string_view origin = "bugs.tsv");

/// Distribution a changelog event belongs to: its target distribution with
/// any pocket suffix ("-proposed", "-updates", ...) removed when that names a
/// release, else the release whose development cycle contains the
/// timestamp (first release dated after it).
std::optional<DistributionId> map_event(const ChangeEvent& event, std::span<const Release> releases);

// ---------------------------------------------------------------------------
// Snapshot construction

struct SnapshotReport {
  std::size_t dangling_edges = 0;          // depends on a binary/source absent from this distribution
  std::size_t binaries_without_source = 0;  // binary whose source has no Sources stanza
  std::size_t orphan_bugs = 0;              // bug for a package absent from this distribution
  std::size_t orphan_events = 0;            // changelog event for an absent package
  std::size_t duplicate_bugs = 0;

  SnapshotReport& operator+=(const SnapshotReport& o);
};

struct SnapshotInputs {
  DistributionId distribution;
  std::optional<Date> release_date;
  std::span<const SourceRecord> sources;
  std::span<const BinaryRecord> binaries;
  std::span<const ChangeEvent> events;  // already mapped to this distribution
  std::span<const BugRecord> bugs;      // already assigned to this distribution
};

/// Builds G_t. ps(s,t) sums the Size of the binaries built from s; the
/// Sources stanza's own Size is used only when no binary reports one.
Snapshot build_snapshot(const SnapshotInputs& inputs, SnapshotReport* report = nullptr);

// ---------------------------------------------------------------------------
// Whole-corpus ingestion

/// A corpus together with ingestion bookkeeping.
struct Dataset {
  Corpus corpus;
  std::map<std::string, std::string, std::less<>> developer_names;  // id -> display name
  std::map<std::string, std::size_t, std::less<>> parse_errors;     // per input kind
  std::map<std::string, std::size_t, std::less<>> reports;          // dropped/flagged counts
  std::vector<ParseIssue> issues;                                   // not persisted

  std::size_t total_parse_errors() const;
};

class MissingInputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads raw/<distro>/{Sources,Packages}, raw/changelogs/*.changelog,
/// raw/bugs.tsv and raw/releases.tsv. Throws MissingInputError when
/// releases.tsv is absent or lists no release.
Dataset ingest_raw(const std::filesystem::path& raw_dir);

}  // namespace pkgpulse

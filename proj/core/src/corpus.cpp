#include "pkgpulse/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "detail/text.hpp"
#include "pkgpulse/parallel.hpp"

namespace pkgpulse {

using detail::trim;
namespace fs = std::filesystem;

namespace {

template <typename Int>
std::optional<Int> parse_int(std::string_view s) {
  s = trim(s);
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

bool looks_like_header(std::string_view first_field) {
  first_field = trim(first_field);
  return !first_field.empty() && !std::isdigit(static_cast<unsigned char>(first_field.front()));
}

}  // namespace

std::vector<Release> parse_releases_tsv(std::string_view text, ParseReport& report, std::string_view origin) {
  std::vector<Release> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    auto cols = detail::split(lines[i], '\t');
    if (cols.size() < 3) {
      report.add(origin, i + 1, "expected 3 columns");
      continue;
    }
    auto index = parse_int<int>(cols[1]);
    auto date = parse_date(trim(cols[2]));
    if (!index || !date) {
      if (i != 0 || !looks_like_header(cols[1])) report.add(origin, i + 1, "invalid release row");
      continue;
    }
    out.push_back({{detail::to_lower(trim(cols[0])), *index}, *date});
  }
  return out;
}

std::vector<BugRecord> parse_bugs_tsv(std::string_view text, ParseReport& report, std::string_view origin) {
  std::vector<BugRecord> out;
  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty() || lines[i].front() == '#') continue;
    auto cols = detail::split(lines[i], '\t');
    if (cols.size() < 3) {
      report.add(origin, i + 1, "expected 3 columns");
      continue;
    }
    auto id = parse_int<std::int64_t>(cols[0]);
    auto created = parse_iso8601(cols[2]);
    if (!id || !created || trim(cols[1]).empty()) {
      if (i != 0 || !looks_like_header(cols[0])) report.add(origin, i + 1, "invalid bug row");
      continue;
    }
    out.push_back({*id, std::string(trim(cols[1])), *created, std::nullopt});
  }
  return out;
}

std::vector<BugRecord> assign_bugs(std::vector<BugRecord> bugs, std::span<const Release> releases) {
  for (auto& bug : bugs) {
    bug.assigned_distribution.reset();
    const Release* latest = nullptr;
    for (const auto& r : releases) {
      if (Timestamp{r.release_date} <= bug.created_at) latest = &r;
      else break;
    }
    if (latest && bug.created_at < Timestamp{latest->release_date + kBugWindow})
      bug.assigned_distribution = latest->distribution;
  }
  return bugs;
}

std::optional<DistributionId> map_event(const ChangeEvent& event, std::span<const Release> releases) {
  std::string target = detail::to_lower(event.target_distribution);
  target = target.substr(0, target.find('-'));
  for (const auto& r : releases)
    if (r.distribution.name == target) return r.distribution;
  if (!event.timestamp) return std::nullopt;
  for (const auto& r : releases)
    if (Timestamp{r.release_date} > *event.timestamp) return r.distribution;
  return std::nullopt;
}

SnapshotReport& SnapshotReport::operator+=(const SnapshotReport& o) {
  dangling_edges += o.dangling_edges;
  binaries_without_source += o.binaries_without_source;
  orphan_bugs += o.orphan_bugs;
  orphan_events += o.orphan_events;
  duplicate_bugs += o.duplicate_bugs;
  return *this;
}

Snapshot build_snapshot(const SnapshotInputs& in, SnapshotReport* report) {
  SnapshotReport local;
  SnapshotData data;
  data.distribution = in.distribution;
  data.release_date = in.release_date;

  std::map<std::string, std::string, std::less<>> binary_to_source;
  std::map<std::string, std::uint64_t, std::less<>> declared_size;
  for (const auto& src : in.sources) {
    auto& info = data.packages[src.name];
    info.binaries.insert(info.binaries.end(), src.binaries.begin(), src.binaries.end());
    for (const auto& b : src.binaries) binary_to_source.emplace(b, src.name);
    if (src.size) declared_size[src.name] += *src.size;
  }

  std::map<std::string, std::uint64_t, std::less<>> binary_size;
  for (const auto& bin : in.binaries) {
    auto pkg = data.packages.find(bin.source);
    if (pkg == data.packages.end()) {
      ++local.binaries_without_source;
      binary_to_source.erase(bin.name);
      continue;
    }
    binary_to_source[bin.name] = bin.source;
    pkg->second.binaries.push_back(bin.name);
    binary_size[bin.source] += bin.size;
  }
  // Virtual packages resolve to the first provider in binary-name order.
  std::vector<const BinaryRecord*> providers;
  for (const auto& bin : in.binaries)
    if (!bin.provides.empty() && data.packages.contains(bin.source)) providers.push_back(&bin);
  std::sort(providers.begin(), providers.end(), [](auto* a, auto* b) { return a->name < b->name; });
  std::map<std::string, std::string, std::less<>> virtuals;
  for (const auto* bin : providers)
    for (const auto& v : bin->provides)
      if (!binary_to_source.contains(v)) virtuals.emplace(v, bin->source);
  binary_to_source.insert(virtuals.begin(), virtuals.end());

  for (auto& [name, info] : data.packages) {
    std::sort(info.binaries.begin(), info.binaries.end());
    info.binaries.erase(std::unique(info.binaries.begin(), info.binaries.end()), info.binaries.end());
    if (auto it = binary_size.find(name); it != binary_size.end()) {
      info.size = it->second;
    } else if (auto d = declared_size.find(name); d != declared_size.end()) {
      info.size = d->second;
    }
  }

  EdgeSet binary_edges;
  for (const auto& bin : in.binaries) {
    if (!data.packages.contains(bin.source)) continue;
    for (const auto& dep : bin.depends) binary_edges.emplace(bin.name, dep);
  }
  LiftResult lifted = lift_dependencies(binary_edges, binary_to_source);
  local.dangling_edges += lifted.dropped;
  data.dep_edges = std::move(lifted.edges);

  for (const auto& ev : in.events) {
    if (ev.developer_id.empty()) continue;
    auto& act = data.activity[ev.developer_id];
    switch (ev.urgency) {
      case Urgency::High: ++act.high; break;
      case Urgency::Medium: ++act.medium; break;
      case Urgency::Low: ++act.low; break;
      case Urgency::Other: ++act.other; break;
    }
    act.bugs_closed += static_cast<std::int64_t>(ev.bugs_closed.size());
    if (data.packages.contains(ev.source_name)) {
      data.developers[ev.source_name].insert(ev.developer_id);
    } else {
      ++local.orphan_events;
    }
  }

  for (const auto& bug : in.bugs) {
    auto pkg = data.packages.find(bug.source_name);
    if (pkg == data.packages.end()) {
      ++local.orphan_bugs;
      continue;
    }
    pkg->second.bug_ids.push_back(bug.bug_id);
  }
  for (auto& [name, info] : data.packages) {
    auto& ids = info.bug_ids;
    std::sort(ids.begin(), ids.end());
    auto last = std::unique(ids.begin(), ids.end());
    local.duplicate_bugs += static_cast<std::size_t>(ids.end() - last);
    ids.erase(last, ids.end());
  }

  if (report) *report += local;
  return Snapshot(std::move(data));
}

std::size_t Dataset::total_parse_errors() const {
  std::size_t n = 0;
  for (const auto& [k, v] : parse_errors) n += v;
  return n;
}

namespace {

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

}  // namespace

Dataset ingest_raw(const fs::path& raw_dir) {
  Dataset ds;
  auto bump = [&](std::string_view kind, const ParseReport& r) {
    ds.parse_errors[std::string(kind)] += r.size();
    ds.issues.insert(ds.issues.end(), r.issues.begin(), r.issues.end());
  };

  auto releases_text = read_file(raw_dir / "releases.tsv");
  if (!releases_text) throw MissingInputError("missing " + (raw_dir / "releases.tsv").string());
  ParseReport release_report;
  auto releases = parse_releases_tsv(*releases_text, release_report);
  bump("releases", release_report);
  if (releases.empty()) throw MissingInputError("releases.tsv lists no release");
  std::sort(releases.begin(), releases.end(),
            [](const Release& a, const Release& b) { return a.distribution.index < b.distribution.index; });
  for (std::size_t i = 1; i < releases.size(); ++i)
    if (releases[i].release_date <= releases[i - 1].release_date)
      throw MissingInputError("release dates are not strictly increasing at " + releases[i].distribution.name);

  // Per-distribution indexes.
  const std::size_t n = releases.size();
  std::vector<std::vector<SourceRecord>> sources(n);
  std::vector<std::vector<BinaryRecord>> binaries(n);
  std::vector<ParseReport> source_reports(n), package_reports(n);
  std::vector<std::size_t> missing(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const fs::path dir = raw_dir / releases[i].distribution.name;
    const std::string tag = releases[i].distribution.name + "/";
    if (auto text = read_file(dir / "Sources")) {
      sources[i] = parse_sources_index(*text, source_reports[i], tag + "Sources");
    } else {
      source_reports[i].add(tag + "Sources", 0, "missing file");
    }
    if (auto text = read_file(dir / "Packages")) {
      binaries[i] = parse_packages_index(*text, package_reports[i], tag + "Packages");
    } else {
      package_reports[i].add(tag + "Packages", 0, "missing file");
    }
  });
  for (std::size_t i = 0; i < n; ++i) {
    bump("sources", source_reports[i]);
    bump("packages", package_reports[i]);
  }

  // Changelogs.
  std::vector<fs::path> changelog_files;
  if (fs::is_directory(raw_dir / "changelogs")) {
    for (const auto& entry : fs::directory_iterator(raw_dir / "changelogs"))
      if (entry.is_regular_file() && entry.path().extension() == ".changelog") changelog_files.push_back(entry.path());
  }
  std::sort(changelog_files.begin(), changelog_files.end());
  std::vector<std::vector<ChangeEvent>> file_events(changelog_files.size());
  std::vector<ParseReport> changelog_reports(changelog_files.size());
  parallel_for(changelog_files.size(), [&](std::size_t i) {
    const std::string tag = "changelogs/" + changelog_files[i].filename().string();
    if (auto text = read_file(changelog_files[i])) {
      file_events[i] = parse_changelog(*text, changelog_reports[i], tag);
    } else {
      changelog_reports[i].add(tag, 0, "unreadable file");
    }
  });
  for (const auto& r : changelog_reports) bump("changelogs", r);

  // Bugs.
  std::vector<BugRecord> bugs;
  ParseReport bug_report;
  if (auto text = read_file(raw_dir / "bugs.tsv")) {
    bugs = parse_bugs_tsv(*text, bug_report);
  } else {
    bug_report.add("bugs.tsv", 0, "missing file");
  }
  bump("bugs", bug_report);
  std::size_t duplicate_rows = 0;
  {
    std::set<std::int64_t> seen;
    std::vector<BugRecord> unique;
    for (auto& bug : bugs) {
      if (seen.insert(bug.bug_id).second) unique.push_back(std::move(bug));
      else ++duplicate_rows;
    }
    bugs = std::move(unique);
  }
  bugs = assign_bugs(std::move(bugs), releases);

  std::set<std::int64_t> bug_universe;
  std::vector<std::vector<BugRecord>> bugs_by_dist(n);
  std::size_t unassigned = 0;
  for (auto& bug : bugs) {
    bug_universe.insert(bug.bug_id);
    if (!bug.assigned_distribution) {
      ++unassigned;
      continue;
    }
    bugs_by_dist[static_cast<std::size_t>(bug.assigned_distribution->index - releases.front().distribution.index)]
        .push_back(bug);
  }

  std::vector<std::vector<ChangeEvent>> events_by_dist(n);
  std::size_t unmapped = 0, no_timestamp = 0, unmatched_closures = 0;
  std::map<std::string, std::map<std::string, std::size_t>, std::less<>> name_votes;
  for (auto& events : file_events) {
    for (auto& ev : events) {
      if (!ev.timestamp) ++no_timestamp;
      for (auto id : ev.bugs_closed)
        if (!bug_universe.contains(id)) ++unmatched_closures;
      if (!ev.developer_name.empty()) ++name_votes[ev.developer_id][ev.developer_name];
      auto dist = map_event(ev, releases);
      if (!dist) {
        ++unmapped;
        continue;
      }
      events_by_dist[static_cast<std::size_t>(dist->index - releases.front().distribution.index)].push_back(
          std::move(ev));
    }
  }
  for (const auto& [id, votes] : name_votes) {
    auto best = std::max_element(votes.begin(), votes.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    ds.developer_names.emplace(id, best->first);
  }

  std::vector<Snapshot> snapshots;
  SnapshotReport totals;
  for (std::size_t i = 0; i < n; ++i) {
    SnapshotInputs inputs{releases[i].distribution, releases[i].release_date, sources[i], binaries[i],
                          events_by_dist[i], bugs_by_dist[i]};
    snapshots.push_back(build_snapshot(inputs, &totals));
  }
  ds.corpus = Corpus(std::move(snapshots));

  ds.reports["dangling_edges"] = totals.dangling_edges;
  ds.reports["binaries_without_source"] = totals.binaries_without_source;
  ds.reports["orphan_bugs"] = totals.orphan_bugs;
  ds.reports["orphan_events"] = totals.orphan_events;
  ds.reports["duplicate_bugs"] = totals.duplicate_bugs + duplicate_rows;
  ds.reports["unassigned_bugs"] = unassigned;
  ds.reports["unmapped_events"] = unmapped;
  ds.reports["events_without_timestamp"] = no_timestamp;
  ds.reports["unmatched_closed_bug_ids"] = unmatched_closures;
  return ds;
}

}  // namespace pkgpulse

#include "pkgpulse/normalized.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "detail/text.hpp"

namespace pkgpulse {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kFormat = "pkgpulse-normalized-1";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return std::move(ss).str();
}

// Data rows of a '#'-commented TSV file.
std::vector<std::vector<std::string_view>> tsv_rows(std::string_view text, std::size_t columns,
                                                    const fs::path& path) {
  std::vector<std::vector<std::string_view>> rows;
  for (auto line : detail::split_lines(text)) {
    if (line.empty() || line.front() == '#') continue;
    auto cols = detail::split(line, '\t');
    if (cols.size() != columns) throw std::runtime_error("malformed row in " + path.string());
    rows.push_back(std::move(cols));
  }
  return rows;
}

template <typename Int>
Int to_int(std::string_view s, const fs::path& path) {
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw std::runtime_error("malformed number in " + path.string());
  return v;
}

json counts_of(const Snapshot& snap) {
  std::size_t dev_edges = 0, bugs = 0;
  for (const auto& [s, devs] : snap.data().developers) dev_edges += devs.size();
  for (const auto& [s, info] : snap.data().packages) bugs += info.bug_ids.size();
  return json{{"packages", snap.package_count()},
              {"edges", snap.data().dep_edges.size()},
              {"dev_edges", dev_edges},
              {"bugs", bugs},
              {"developers", snap.data().activity.size()}};
}

}  // namespace

void write_edges_tsv(std::ostream& os, const Snapshot& snapshot) {
  os << "# dependent\tdependee\n";
  for (const auto& [from, to] : snapshot.data().dep_edges) os << from << '\t' << to << '\n';
}

void write_devs_tsv(std::ostream& os, const Snapshot& snapshot) {
  os << "# package\tdeveloper\n";
  for (const auto& [pkg, devs] : snapshot.data().developers)
    for (const auto& d : devs) os << pkg << '\t' << d << '\n';
}

void write_normalized(const fs::path& out_dir, const Dataset& dataset) {
  fs::create_directories(out_dir);
  json manifest;
  manifest["format"] = kFormat;
  manifest["distributions"] = json::array();
  json totals = {{"packages", 0}, {"edges", 0}, {"dev_edges", 0}, {"bugs", 0}};
  StringSet all_devs;

  for (const auto& snap : dataset.corpus.snapshots()) {
    const fs::path dir = out_dir / snap.name();
    fs::create_directories(dir);
    const auto& data = snap.data();

    std::ostringstream packages;
    for (const auto& [name, info] : data.packages) {
      json row = {{"name", name}, {"size", info.size}, {"binaries", info.binaries}, {"bug_count", info.bug_ids.size()}};
      packages << row.dump() << '\n';
    }
    write_text(dir / "packages.jsonl", packages.str());

    std::ostringstream edges;
    write_edges_tsv(edges, snap);
    write_text(dir / "edges.tsv", edges.str());

    std::ostringstream devs;
    write_devs_tsv(devs, snap);
    write_text(dir / "devs.tsv", devs.str());

    std::ostringstream bugs;
    bugs << "# bug_id\tpackage\n";
    for (const auto& [name, info] : data.packages)
      for (auto id : info.bug_ids) bugs << id << '\t' << name << '\n';
    write_text(dir / "bugs.tsv", bugs.str());

    std::ostringstream activity;
    activity << "# developer\thigh\tmedium\tlow\tother\tbugs_closed\n";
    for (const auto& [dev, a] : data.activity) {
      activity << dev << '\t' << a.high << '\t' << a.medium << '\t' << a.low << '\t' << a.other << '\t'
               << a.bugs_closed << '\n';
      all_devs.insert(dev);
    }
    write_text(dir / "activity.tsv", activity.str());

    json entry = {{"name", snap.name()}, {"index", snap.index()}, {"counts", counts_of(snap)}};
    entry["release_date"] = data.release_date ? json(format_date(*data.release_date)) : json(nullptr);
    for (const auto& key : {"packages", "edges", "dev_edges", "bugs"})
      totals[key] = totals[key].get<std::size_t>() + entry["counts"][key].get<std::size_t>();
    manifest["distributions"].push_back(std::move(entry));
  }
  totals["developers"] = all_devs.size();
  manifest["totals"] = totals;
  manifest["parse_errors"] = json::object();
  for (const auto& [k, v] : dataset.parse_errors) manifest["parse_errors"][k] = v;
  manifest["parse_error_total"] = dataset.total_parse_errors();
  manifest["reports"] = json::object();
  for (const auto& [k, v] : dataset.reports) manifest["reports"][k] = v;
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");

  std::ostringstream names;
  names << "# developer\tname\n";
  for (const auto& [id, name] : dataset.developer_names) names << id << '\t' << name << '\n';
  write_text(out_dir / "developers.tsv", names.str());
}

Dataset load_normalized(const fs::path& dir) {
  Dataset ds;
  json manifest;
  try {
    manifest = json::parse(read_text(dir / "manifest.json"));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest.json: " + std::string(e.what()));
  }
  if (manifest.value("format", "") != kFormat) throw std::runtime_error("unsupported normalized format");

  try {
    for (const auto& [k, v] : manifest.at("parse_errors").items()) ds.parse_errors[k] = v.get<std::size_t>();
    for (const auto& [k, v] : manifest.at("reports").items()) ds.reports[k] = v.get<std::size_t>();

    std::vector<Snapshot> snapshots;
    for (const auto& entry : manifest.at("distributions")) {
      SnapshotData data;
      data.distribution = {entry.at("name").get<std::string>(), entry.at("index").get<int>()};
      if (!entry.at("release_date").is_null()) {
        auto date = parse_date(entry.at("release_date").get<std::string>());
        if (!date) throw std::runtime_error("malformed release_date");
        data.release_date = *date;
      }
      const fs::path sub = dir / data.distribution.name;

      const std::string packages = read_text(sub / "packages.jsonl");
      for (auto line : detail::split_lines(packages)) {
        if (line.empty()) continue;
        json row = json::parse(line);
        auto& info = data.packages[row.at("name").get<std::string>()];
        info.size = row.at("size").get<std::uint64_t>();
        info.binaries = row.at("binaries").get<std::vector<std::string>>();
      }

      const fs::path edges_path = sub / "edges.tsv";
      const std::string edges = read_text(edges_path);
      for (const auto& r : tsv_rows(edges, 2, edges_path)) data.dep_edges.emplace(r[0], r[1]);

      const fs::path devs_path = sub / "devs.tsv";
      const std::string devs = read_text(devs_path);
      for (const auto& r : tsv_rows(devs, 2, devs_path)) data.developers[std::string(r[0])].emplace(r[1]);

      const fs::path bugs_path = sub / "bugs.tsv";
      const std::string bugs = read_text(bugs_path);
      for (const auto& r : tsv_rows(bugs, 2, bugs_path)) {
        auto it = data.packages.find(r[1]);
        if (it == data.packages.end()) throw std::runtime_error("bug for unknown package in " + bugs_path.string());
        it->second.bug_ids.push_back(to_int<std::int64_t>(r[0], bugs_path));
      }
      for (auto& [name, info] : data.packages) std::sort(info.bug_ids.begin(), info.bug_ids.end());

      const fs::path act_path = sub / "activity.tsv";
      const std::string activity = read_text(act_path);
      for (const auto& r : tsv_rows(activity, 6, act_path)) {
        DeveloperActivity a;
        a.high = to_int<std::int64_t>(r[1], act_path);
        a.medium = to_int<std::int64_t>(r[2], act_path);
        a.low = to_int<std::int64_t>(r[3], act_path);
        a.other = to_int<std::int64_t>(r[4], act_path);
        a.bugs_closed = to_int<std::int64_t>(r[5], act_path);
        data.activity.emplace(std::string(r[0]), a);
      }
      snapshots.emplace_back(std::move(data));
    }
    ds.corpus = Corpus(std::move(snapshots));

    const fs::path names_path = dir / "developers.tsv";
    if (fs::exists(names_path)) {
      const std::string names = read_text(names_path);
      for (const auto& r : tsv_rows(names, 2, names_path)) ds.developer_names.emplace(std::string(r[0]), std::string(r[1]));
    }
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed normalized dataset: " + std::string(e.what()));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error("inconsistent normalized dataset: " + std::string(e.what()));
  }
  return ds;
}

}  // namespace pkgpulse

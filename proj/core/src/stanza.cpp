#include <algorithm>
#include <charconv>

#include "detail/text.hpp"
#include "pkgpulse/corpus.hpp"

namespace pkgpulse {

using detail::trim;

const std::string* Stanza::find(std::string_view key) const {
  for (const auto& [k, v] : fields)
    if (detail::iequals(k, key)) return &v;
  return nullptr;
}

std::vector<Stanza> parse_stanzas(std::string_view text, ParseReport& report, std::string_view origin) {
  std::vector<Stanza> stanzas;
  Stanza current;
  auto flush = [&] {
    if (!current.fields.empty()) stanzas.push_back(std::move(current));
    current = Stanza{};
  };

  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    const std::size_t lineno = i + 1;
    if (trim(line).empty()) {
      flush();
      continue;
    }
    if (line.front() == '#') continue;
    if (line.front() == ' ' || line.front() == '\t') {
      if (current.fields.empty()) {
        report.add(origin, lineno, "continuation line outside a field");
        continue;
      }
      std::string_view more = trim(line);
      if (more == ".") continue;  // paragraph separator inside multiline fields
      auto& value = current.fields.back().second;
      if (!value.empty()) value.push_back(' ');
      value.append(more);
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string_view::npos || trim(line.substr(0, colon)).empty()) {
      report.add(origin, lineno, "malformed field line");
      continue;
    }
    if (current.fields.empty()) current.line = lineno;
    current.fields.emplace_back(std::string(trim(line.substr(0, colon))), std::string(trim(line.substr(colon + 1))));
  }
  flush();
  return stanzas;
}

namespace {

std::optional<std::uint64_t> parse_u64(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::vector<std::string> split_names(std::string_view value) {
  std::vector<std::string> out;
  for (auto part : detail::split(value, ',')) {
    auto name = trim(part);
    if (!name.empty()) out.emplace_back(name);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

std::vector<std::string> parse_relation_field(std::string_view value) {
  std::vector<std::string> out;
  for (auto clause : detail::split(value, ',')) {
    std::string_view first = clause.substr(0, clause.find('|'));
    first = first.substr(0, first.find_first_of("([<"));
    first = trim(first);
    first = first.substr(0, first.find(':'));
    first = trim(first);
    if (!first.empty()) out.emplace_back(first);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SourceRecord> parse_sources_index(std::string_view text, ParseReport& report, std::string_view origin) {
  std::vector<SourceRecord> out;
  for (const auto& stanza : parse_stanzas(text, report, origin)) {
    const std::string* name = stanza.find("Package");
    if (!name || name->empty()) {
      report.add(origin, stanza.line, "stanza without Package field skipped");
      continue;
    }
    SourceRecord rec;
    rec.name = *name;
    if (const std::string* bins = stanza.find("Binary")) rec.binaries = split_names(*bins);
    if (const std::string* size = stanza.find("Size")) {
      rec.size = parse_u64(*size);
      if (!rec.size) report.add(origin, stanza.line, "invalid Size for source " + rec.name);
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<BinaryRecord> parse_packages_index(std::string_view text, ParseReport& report, std::string_view origin) {
  std::vector<BinaryRecord> out;
  for (const auto& stanza : parse_stanzas(text, report, origin)) {
    const std::string* name = stanza.find("Package");
    if (!name || name->empty()) {
      report.add(origin, stanza.line, "stanza without Package field skipped");
      continue;
    }
    BinaryRecord rec;
    rec.name = *name;
    rec.source = rec.name;
    if (const std::string* src = stanza.find("Source")) {
      auto s = trim(std::string_view(*src).substr(0, src->find('(')));
      if (!s.empty()) rec.source = std::string(s);
    }
    if (const std::string* size = stanza.find("Size")) {
      if (auto v = parse_u64(*size)) {
        rec.size = *v;
      } else {
        report.add(origin, stanza.line, "invalid Size for binary " + rec.name);
      }
    }
    if (const std::string* deps = stanza.find("Depends")) rec.depends = parse_relation_field(*deps);
    if (const std::string* prov = stanza.find("Provides")) rec.provides = parse_relation_field(*prov);
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pkgpulse

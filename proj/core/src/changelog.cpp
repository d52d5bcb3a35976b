#include <cctype>
#include <charconv>

#include "detail/text.hpp"
#include "pkgpulse/corpus.hpp"

namespace pkgpulse {

using detail::trim;

Urgency parse_urgency(std::string_view text) {
  auto lower = detail::to_lower(trim(text));
  if (lower == "low") return Urgency::Low;
  if (lower == "medium") return Urgency::Medium;
  if (lower == "high") return Urgency::High;
  return Urgency::Other;
}

std::string_view to_string(Urgency u) {
  switch (u) {
    case Urgency::Low: return "low";
    case Urgency::Medium: return "medium";
    case Urgency::High: return "high";
    case Urgency::Other: break;
  }
  return "other";
}

std::set<std::int64_t> extract_launchpad_bugs(std::string_view text) {
  std::set<std::int64_t> ids;
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };
  std::size_t pos = 0;
  while (pos + 3 <= text.size()) {
    const bool boundary = pos == 0 || !std::isalnum(static_cast<unsigned char>(text[pos - 1]));
    if (!boundary || !detail::istarts_with(text.substr(pos), "lp:")) {
      ++pos;
      continue;
    }
    std::size_t i = pos + 3;
    while (true) {
      while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == ',')) ++i;
      if (i >= text.size() || text[i] != '#') break;
      std::size_t start = ++i;
      while (i < text.size() && is_digit(text[i])) ++i;
      if (i == start) break;
      std::int64_t id = 0;
      auto [p, ec] = std::from_chars(text.data() + start, text.data() + i, id);
      if (ec == std::errc{}) ids.insert(id);
    }
    pos = i > pos + 3 ? i : pos + 3;
  }
  return ids;
}

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.';
}

struct Header {
  std::string source;
  std::string version;
  std::string distribution;
  Urgency urgency = Urgency::Other;
};

// "pkg (version) dist [dist...]; key=value, key=value"
std::optional<Header> parse_header(std::string_view line) {
  Header h;
  std::size_t i = 0;
  if (line.empty() || !std::isalnum(static_cast<unsigned char>(line[0]))) return std::nullopt;
  while (i < line.size() && is_name_char(line[i])) ++i;
  h.source = std::string(line.substr(0, i));
  while (i < line.size() && detail::is_space(line[i])) ++i;
  if (i >= line.size() || line[i] != '(') return std::nullopt;
  std::size_t close = line.find(')', i);
  if (close == std::string_view::npos) return std::nullopt;
  auto version = trim(line.substr(i + 1, close - i - 1));
  if (version.empty() || version.find_first_of(" \t(") != std::string_view::npos) return std::nullopt;
  h.version = std::string(version);
  std::size_t semi = line.find(';', close);
  if (semi == std::string_view::npos) return std::nullopt;
  auto dists = trim(line.substr(close + 1, semi - close - 1));
  if (dists.empty()) return std::nullopt;
  for (char c : dists)
    if (!is_name_char(c) && !detail::is_space(c)) return std::nullopt;
  h.distribution = std::string(dists.substr(0, dists.find_first_of(" \t")));

  for (auto option : detail::split(line.substr(semi + 1), ',')) {
    auto eq = option.find('=');
    if (eq == std::string_view::npos) continue;
    if (!detail::iequals(trim(option.substr(0, eq)), "urgency")) continue;
    auto value = trim(option.substr(eq + 1));
    h.urgency = parse_urgency(value.substr(0, value.find_first_of(" \t(")));
  }
  return h;
}

}  // namespace

std::vector<ChangeEvent> parse_changelog(std::string_view text, ParseReport& report, std::string_view origin) {
  std::vector<ChangeEvent> events;
  std::optional<ChangeEvent> current;
  std::size_t current_line = 0;
  std::string body;
  bool skipping = false;

  const auto lines = detail::split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    const std::size_t lineno = i + 1;
    if (trim(line).empty()) continue;

    if (!detail::is_space(line.front())) {
      if (detail::istarts_with(line, "old changelog:") || detail::istarts_with(line, "local variables:")) break;
      if (auto header = parse_header(line)) {
        if (current) report.add(origin, current_line, "stanza without trailer dropped");
        current = ChangeEvent{};
        current->source_name = std::move(header->source);
        current->version = std::move(header->version);
        current->target_distribution = std::move(header->distribution);
        current->urgency = header->urgency;
        current_line = lineno;
        body.clear();
        skipping = false;
      } else if (!current && !skipping) {
        report.add(origin, lineno, "unparseable stanza header");
        skipping = true;
      } else if (current) {
        body.append(line).push_back(' ');
      }
      continue;
    }

    if (line.starts_with(" -- ")) {
      if (!current) {
        if (!skipping) report.add(origin, lineno, "trailer without header");
        skipping = false;
        continue;
      }
      std::string_view trailer = line.substr(4);
      auto lt = trailer.find('<');
      auto gt = lt == std::string_view::npos ? std::string_view::npos : trailer.find('>', lt);
      if (gt == std::string_view::npos || trim(trailer.substr(lt + 1, gt - lt - 1)).empty()) {
        report.add(origin, lineno, "trailer without maintainer address; stanza dropped");
        current.reset();
        continue;
      }
      current->developer_name = std::string(trim(trailer.substr(0, lt)));
      current->developer_id = detail::to_lower(trim(trailer.substr(lt + 1, gt - lt - 1)));
      current->timestamp = parse_rfc2822(trailer.substr(gt + 1));
      if (!current->timestamp) report.add(origin, lineno, "unparseable trailer date");
      current->bugs_closed = extract_launchpad_bugs(body);
      events.push_back(std::move(*current));
      current.reset();
      continue;
    }

    if (current) body.append(trim(line)).push_back(' ');
  }
  if (current) report.add(origin, current_line, "stanza without trailer dropped");
  return events;
}

}  // namespace pkgpulse

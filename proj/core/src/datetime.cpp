#include "pkgpulse/datetime.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <vector>

namespace pkgpulse {
namespace {

using std::chrono::day;
using std::chrono::days;
using std::chrono::hours;
using std::chrono::minutes;
using std::chrono::month;
using std::chrono::seconds;
using std::chrono::year;
using std::chrono::year_month_day;

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

template <typename Int>
std::optional<Int> to_int(std::string_view s) {
  if (!all_digits(s)) return std::nullopt;
  Int v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<Date> make_date(int y, unsigned m, unsigned d) {
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) return std::nullopt;
  return Date{ymd};
}

// "HH:MM" or "HH:MM:SS", optional fractional seconds (discarded).
std::optional<seconds> parse_clock(std::string_view s) {
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    if (!all_digits(s.substr(dot + 1))) return std::nullopt;
    s = s.substr(0, dot);
  }
  if (s.size() != 5 && s.size() != 8) return std::nullopt;
  if (s[2] != ':' || (s.size() == 8 && s[5] != ':')) return std::nullopt;
  auto h = to_int<int>(s.substr(0, 2));
  auto m = to_int<int>(s.substr(3, 2));
  std::optional<int> sec = 0;
  if (s.size() == 8) sec = to_int<int>(s.substr(6, 2));
  if (!h || !m || !sec || *h > 23 || *m > 59 || *sec > 60) return std::nullopt;
  return hours{*h} + minutes{*m} + seconds{*sec};
}

// "+hhmm", "-hhmm", "+hh:mm", "+hh"; returns offset east of UTC.
std::optional<seconds> parse_offset(std::string_view s) {
  if (s.size() < 3 || (s[0] != '+' && s[0] != '-')) return std::nullopt;
  int sign = s[0] == '-' ? -1 : 1;
  std::string digits;
  for (char c : s.substr(1))
    if (c != ':') digits.push_back(c);
  if (digits.size() == 2) digits += "00";
  if (digits.size() != 4) return std::nullopt;
  auto h = to_int<int>(std::string_view(digits).substr(0, 2));
  auto m = to_int<int>(std::string_view(digits).substr(2, 2));
  if (!h || !m || *h > 23 || *m > 59) return std::nullopt;
  return sign * (hours{*h} + minutes{*m});
}

std::optional<unsigned> month_from_name(std::string_view s) {
  static constexpr std::array<std::string_view, 12> kNames = {
      "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
  if (s.size() < 3) return std::nullopt;
  std::string lower;
  for (char c : s.substr(0, 3)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (unsigned i = 0; i < kNames.size(); ++i)
    if (kNames[i] == lower) return i + 1;
  return std::nullopt;
}

std::vector<std::string_view> split_tokens(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (std::isspace(static_cast<unsigned char>(s[i])) || s[i] == ',')) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j])) && s[j] != ',') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace

std::optional<Timestamp> parse_rfc2822(std::string_view text) noexcept {
  try {
    auto tok = split_tokens(text);
    std::size_t i = 0;
    if (i < tok.size() && !tok[i].empty() && std::isalpha(static_cast<unsigned char>(tok[i][0]))) ++i;  // weekday
    if (tok.size() < i + 5) return std::nullopt;
    auto d = to_int<unsigned>(tok[i]);
    auto m = month_from_name(tok[i + 1]);
    if (tok[i + 2].size() != 4) return std::nullopt;
    auto y = to_int<int>(tok[i + 2]);
    auto clock = parse_clock(tok[i + 3]);
    if (!d || !m || !y || !clock) return std::nullopt;
    auto date = make_date(*y, *m, *d);
    if (!date) return std::nullopt;

    std::string_view zone = tok[i + 4];
    seconds offset{0};
    if (zone == "UT" || zone == "UTC" || zone == "GMT" || zone == "Z") {
      offset = seconds{0};
    } else if (auto off = parse_offset(zone)) {
      offset = *off;
    } else {
      return std::nullopt;
    }
    // Trailing tokens such as "(CET)" comments are tolerated.
    for (std::size_t k = i + 5; k < tok.size(); ++k)
      if (tok[k].front() != '(') return std::nullopt;
    return Timestamp{std::chrono::time_point_cast<seconds>(*date) + *clock - offset};
  } catch (...) {
    return std::nullopt;
  }
}

std::optional<Date> parse_date(std::string_view s) noexcept {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
  auto y = to_int<int>(s.substr(0, 4));
  auto m = to_int<unsigned>(s.substr(5, 2));
  auto d = to_int<unsigned>(s.substr(8, 2));
  if (!y || !m || !d) return std::nullopt;
  return make_date(*y, *m, *d);
}

std::optional<Timestamp> parse_iso8601(std::string_view s) noexcept {
  try {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    if (s.size() < 10) return std::nullopt;
    auto date = parse_date(s.substr(0, 10));
    if (!date) return std::nullopt;
    Timestamp base{std::chrono::time_point_cast<seconds>(*date)};
    if (s.size() == 10) return base;
    if (s[10] != 'T' && s[10] != ' ') return std::nullopt;
    std::string_view rest = s.substr(11);

    seconds offset{0};
    if (!rest.empty() && (rest.back() == 'Z' || rest.back() == 'z')) {
      rest.remove_suffix(1);
    } else if (auto pos = rest.find_first_of("+-"); pos != std::string_view::npos) {
      auto off = parse_offset(rest.substr(pos));
      if (!off) return std::nullopt;
      offset = *off;
      rest = rest.substr(0, pos);
    }
    auto clock = parse_clock(rest);
    if (!clock) return std::nullopt;
    return base + *clock - offset;
  } catch (...) {
    return std::nullopt;
  }
}

std::string format_date(Date d) {
  year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

std::string format_iso8601(Timestamp ts) {
  auto day_point = std::chrono::floor<days>(ts);
  auto secs = (ts - day_point).count();
  char buf[64];
  std::snprintf(buf, sizeof buf, "T%02lld:%02lld:%02lldZ", static_cast<long long>(secs / 3600),
                static_cast<long long>((secs / 60) % 60), static_cast<long long>(secs % 60));
  return format_date(day_point) + buf;
}

}  // namespace pkgpulse

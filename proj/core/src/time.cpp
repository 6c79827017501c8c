#include "ledgermine/time.hpp"

#include <array>
#include <cstdio>

namespace ledgermine {
namespace {

// Civil-date conversions on the proleptic Gregorian calendar
// (Howard Hinnant's chrono algorithms).
std::int64_t days_from_civil(std::int64_t y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                       static_cast<unsigned>(d) - 1u;
  const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp + (mp < 10 ? 3 : -9);
  y += (m <= 2);
}

bool is_leap(std::int64_t y) {
  return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(std::int64_t y, int m) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30,
                                                31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[static_cast<std::size_t>(m - 1)];
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) {
  return a - floor_div(a, b) * b;
}

bool all_digits(std::string_view s) {
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return !s.empty();
}

int to_int(std::string_view s) {
  int v = 0;
  for (char c : s) v = v * 10 + (c - '0');
  return v;
}

}  // namespace

std::optional<Instant> parse_instant(std::string_view iso) {
  // YYYY-MM-DDThh:mm:ssZ, exactly 20 chars.
  if (iso.size() != 20) return std::nullopt;
  if (iso[4] != '-' || iso[7] != '-' || iso[10] != 'T' || iso[13] != ':' ||
      iso[16] != ':' || iso[19] != 'Z') {
    return std::nullopt;
  }
  const auto ys = iso.substr(0, 4), ms = iso.substr(5, 2), ds = iso.substr(8, 2),
             hs = iso.substr(11, 2), mins = iso.substr(14, 2), ss = iso.substr(17, 2);
  if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds) || !all_digits(hs) ||
      !all_digits(mins) || !all_digits(ss)) {
    return std::nullopt;
  }
  const int year = to_int(ys), month = to_int(ms), day = to_int(ds);
  const int hour = to_int(hs), minute = to_int(mins), second = to_int(ss);
  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > days_in_month(year, month)) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  return days_from_civil(year, month, day) * kSecondsPerDay + hour * 3600 +
         minute * 60 + second;
}

std::string format_instant(Instant t) {
  const std::int64_t days = floor_div(t, kSecondsPerDay);
  const std::int64_t sod = floor_mod(t, kSecondsPerDay);
  std::int64_t y;
  unsigned m, d;
  civil_from_days(days, y, m, d);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<long long>(y), m, d, static_cast<int>(sod / 3600),
                static_cast<int>((sod / 60) % 60), static_cast<int>(sod % 60));
  return buf;
}

int day_of_week(Instant t) {
  // 1970-01-01 was a Thursday.
  return static_cast<int>(floor_mod(floor_div(t, kSecondsPerDay) + 4, 7));
}

int hour_band(Instant t) {
  return static_cast<int>(floor_mod(t, kSecondsPerDay) / (6 * kSecondsPerHour));
}

}  // namespace ledgermine

#include "adamine/time.hpp"

#include <cctype>
#include <cstdio>

#include "adamine/errors.hpp"

namespace adamine {

int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);            // [0, 399]
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1; // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;           // [0, 146096]
  return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

UtcMillis utc_from_ymd_hms(int y, int mo, int d, int h, int mi, int s, int ms) {
  int64_t days = days_from_civil(y, mo, d);
  return ((days * 24 + h) * 60 + mi) * 60000 + s * 1000 + ms;
}

namespace {

// floor division, so pre-1970 stamps stay correct
int64_t fdiv(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t fmod_pos(int64_t a, int64_t b) { return a - fdiv(a, b) * b; }

void split(UtcMillis t, int& y, int& mo, int& d, int& h, int& mi, int& s,
           int& ms) {
  int64_t days = fdiv(t, 86400000);
  int64_t rem = fmod_pos(t, 86400000);
  civil_from_days(days, y, mo, d);
  h = static_cast<int>(rem / 3600000);
  rem %= 3600000;
  mi = static_cast<int>(rem / 60000);
  rem %= 60000;
  s = static_cast<int>(rem / 1000);
  ms = static_cast<int>(rem % 1000);
}

bool all_digits(const std::string& s, size_t from, size_t n) {
  if (s.size() < from + n) return false;
  for (size_t i = from; i < from + n; ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

int num(const std::string& s, size_t from, size_t n) {
  int v = 0;
  for (size_t i = from; i < from + n; ++i) v = v * 10 + (s[i] - '0');
  return v;
}

}  // namespace

std::string format_iso8601(UtcMillis t) {
  int y, mo, d, h, mi, s, ms;
  split(t, y, mo, d, h, mi, s, ms);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", y, mo,
                d, h, mi, s, ms);
  return buf;
}

UtcMillis parse_iso8601(const std::string& s) {
  // YYYY-MM-DDTHH:MM:SS[.mmm]Z
  auto bad = [&] { throw FormatError("bad ISO-8601 timestamp: '" + s + "'"); };
  if (s.size() != 20 && s.size() != 24) bad();
  if (!all_digits(s, 0, 4) || s[4] != '-' || !all_digits(s, 5, 2) ||
      s[7] != '-' || !all_digits(s, 8, 2) || s[10] != 'T' ||
      !all_digits(s, 11, 2) || s[13] != ':' || !all_digits(s, 14, 2) ||
      s[16] != ':' || !all_digits(s, 17, 2))
    bad();
  int ms = 0;
  if (s.size() == 24) {
    if (s[19] != '.' || !all_digits(s, 20, 3) || s[23] != 'Z') bad();
    ms = num(s, 20, 3);
  } else {
    if (s[19] != 'Z') bad();
  }
  int y = num(s, 0, 4), mo = num(s, 5, 2), d = num(s, 8, 2);
  int h = num(s, 11, 2), mi = num(s, 14, 2), sec = num(s, 17, 2);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || sec > 60)
    bad();
  return utc_from_ymd_hms(y, mo, d, h, mi, sec, ms);
}

UtcMillis parse_compact_stamp(const std::string& yyyymmdd,
                              const std::string& hhmmss) {
  if (yyyymmdd.size() != 8 || hhmmss.size() != 6 ||
      !all_digits(yyyymmdd, 0, 8) || !all_digits(hhmmss, 0, 6))
    throw FormatError("bad compact timestamp: '" + yyyymmdd + "_" + hhmmss +
                      "'");
  int y = num(yyyymmdd, 0, 4), mo = num(yyyymmdd, 4, 2), d = num(yyyymmdd, 6, 2);
  int h = num(hhmmss, 0, 2), mi = num(hhmmss, 2, 2), s = num(hhmmss, 4, 2);
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 59)
    throw FormatError("bad compact timestamp: '" + yyyymmdd + "_" + hhmmss +
                      "'");
  return utc_from_ymd_hms(y, mo, d, h, mi, s);
}

void format_compact_stamp(UtcMillis t, std::string& yyyymmdd,
                          std::string& hhmmss) {
  int y, mo, d, h, mi, s, ms;
  split(t, y, mo, d, h, mi, s, ms);
  char a[16], b[16];
  std::snprintf(a, sizeof(a), "%04d%02d%02d", y, mo, d);
  std::snprintf(b, sizeof(b), "%02d%02d%02d", h, mi, s);
  yyyymmdd = a;
  hhmmss = b;
}

}  // namespace adamine

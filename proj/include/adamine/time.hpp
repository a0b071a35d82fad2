#ifndef ADAMINE_TIME_HPP
#define ADAMINE_TIME_HPP

#include <cstdint>
#include <string>

namespace adamine {

// All timestamps in this codebase are UTC milliseconds since the Unix epoch.
// Civil-date conversion is done with proleptic-Gregorian day arithmetic, so
// results do not depend on the host timezone database.
using UtcMillis = int64_t;

// "YYYY-MM-DDTHH:MM:SS.mmmZ"
std::string format_iso8601(UtcMillis t);

// Accepts the format above and the second-resolution variant without ".mmm".
// Throws FormatError on anything else.
UtcMillis parse_iso8601(const std::string& s);

// Days since 1970-01-01 for a civil date (Howard Hinnant's algorithm).
int64_t days_from_civil(int y, int m, int d);
void civil_from_days(int64_t z, int& y, int& m, int& d);

UtcMillis utc_from_ymd_hms(int y, int mo, int d, int h, int mi, int s,
                           int ms = 0);

// Compact stamp pair used by the archive filename convention,
// "YYYYMMDD" and "HHMMSS". Throws FormatError on malformed input.
UtcMillis parse_compact_stamp(const std::string& yyyymmdd,
                              const std::string& hhmmss);
void format_compact_stamp(UtcMillis t, std::string& yyyymmdd,
                          std::string& hhmmss);

}  // namespace adamine

#endif  // ADAMINE_TIME_HPP

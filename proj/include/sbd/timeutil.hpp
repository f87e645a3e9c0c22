#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace sbd::timeutil {

struct CivilDate {
    int year;
    unsigned month; // 1..12
    unsigned day;   // 1..31
};

std::int64_t days_from_civil(int year, unsigned month, unsigned day);
CivilDate civil_from_days(std::int64_t days);

// UTC civil date/time <-> UNIX seconds.
std::int64_t to_unix_seconds(int year, unsigned month, unsigned day,
                             unsigned hour = 0, unsigned minute = 0, unsigned second = 0);

// Accepts "YYYY-MM-DDTHH:MM:SSZ" and the "+00:00" suffix form; also a bare
// "YYYY-MM-DD" (midnight). Throws DataError otherwise.
std::int64_t parse_iso8601_utc(std::string_view text);

std::string format_iso8601_utc(std::int64_t unix_seconds);

// Current wall clock, UNIX seconds.
std::int64_t now_utc();

} // namespace sbd::timeutil

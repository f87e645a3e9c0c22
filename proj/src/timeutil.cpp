#include "sbd/timeutil.hpp"

#include <array>
#include <cctype>
#include <chrono>
#include <cstdio>

#include "sbd/error.hpp"

namespace sbd::timeutil {

// Howard Hinnant's civil calendar algorithms (proleptic Gregorian).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

std::int64_t to_unix_seconds(int year, unsigned month, unsigned day,
                             unsigned hour, unsigned minute, unsigned second) {
    return days_from_civil(year, month, day) * 86400 +
           static_cast<std::int64_t>(hour) * 3600 +
           static_cast<std::int64_t>(minute) * 60 + second;
}

namespace {

bool days_in_month_ok(int year, unsigned month, unsigned day) {
    static constexpr std::array<unsigned, 12> lengths{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12 || day < 1)
        return false;
    unsigned max_day = lengths[month - 1];
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    if (month == 2 && leap)
        max_day = 29;
    return day <= max_day;
}

bool all_digits(std::string_view s) {
    if (s.empty())
        return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            return false;
    return true;
}

int to_int(std::string_view s) {
    int v = 0;
    for (char c : s)
        v = v * 10 + (c - '0');
    return v;
}

} // namespace

std::int64_t parse_iso8601_utc(std::string_view text) {
    auto fail = [&] { throw DataError("invalid ISO-8601 UTC timestamp: \"" + std::string(text) + "\""); };

    if (text.size() < 10 || text[4] != '-' || text[7] != '-')
        fail();
    std::string_view ys = text.substr(0, 4), ms = text.substr(5, 2), ds = text.substr(8, 2);
    if (!all_digits(ys) || !all_digits(ms) || !all_digits(ds))
        fail();
    int year = to_int(ys);
    unsigned month = static_cast<unsigned>(to_int(ms));
    unsigned day = static_cast<unsigned>(to_int(ds));
    if (!days_in_month_ok(year, month, day))
        fail();

    if (text.size() == 10)
        return to_unix_seconds(year, month, day);

    if (text.size() < 19 || text[10] != 'T' || text[13] != ':' || text[16] != ':')
        fail();
    std::string_view hs = text.substr(11, 2), mins = text.substr(14, 2), ss = text.substr(17, 2);
    if (!all_digits(hs) || !all_digits(mins) || !all_digits(ss))
        fail();
    unsigned hour = static_cast<unsigned>(to_int(hs));
    unsigned minute = static_cast<unsigned>(to_int(mins));
    unsigned second = static_cast<unsigned>(to_int(ss));
    if (hour > 23 || minute > 59 || second > 60)
        fail();

    std::string_view zone = text.substr(19);
    if (zone != "Z" && zone != "+00:00")
        fail();
    return to_unix_seconds(year, month, day, hour, minute, second);
}

std::string format_iso8601_utc(std::int64_t unix_seconds) {
    std::int64_t days = unix_seconds / 86400;
    std::int64_t rem = unix_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    CivilDate date = civil_from_days(days);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                  date.year, date.month, date.day,
                  static_cast<long long>(rem / 3600),
                  static_cast<long long>((rem % 3600) / 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

std::int64_t now_utc() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

} // namespace sbd::timeutil

#include "commentox/timeutil.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "commentox/errors.hpp"

namespace ctox {

namespace {

constexpr int64_t kSecondsPerDay = 86400;

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, unsigned m) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30,
                                                    31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return lengths[m - 1];
}

// Number of ISO weeks in a year: 53 when Jan 1 falls on Thursday, or on
// Wednesday in a leap year.
int iso_weeks_in_year(int year) {
    int jan1 = iso_weekday(days_from_civil(year, 1, 1));
    if (jan1 == 4) return 53;
    if (jan1 == 3 && is_leap(year)) return 53;
    return 52;
}

int parse_fixed_uint(std::string_view s, size_t pos, size_t len, const char* what) {
    if (pos + len > s.size()) throw ParseError(std::string("truncated ") + what);
    int value = 0;
    for (size_t i = 0; i < len; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9')
            throw ParseError(std::string("non-digit in ") + what + ": '" +
                             std::string(s) + "'");
        value = value * 10 + (c - '0');
    }
    return value;
}

}  // namespace

int64_t days_from_civil(int year, unsigned month, unsigned day) {
    int64_t y = year;
    y -= month <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (month + (month > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

CivilDate civil_from_days(int64_t days) {
    days += 719468;
    const int64_t era = (days >= 0 ? days : days - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(days - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), m, d};
}

int iso_weekday(int64_t days) {
    // 1970-01-01 was a Thursday (ISO weekday 4).
    return static_cast<int>(((days + 3) % 7 + 7) % 7) + 1;
}

IsoWeek iso_week_of(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / kSecondsPerDay;
    if (epoch_seconds < 0 && epoch_seconds % kSecondsPerDay != 0) --days;
    CivilDate date = civil_from_days(days);
    int wd = iso_weekday(days);
    int ordinal = static_cast<int>(days - days_from_civil(date.year, 1, 1)) + 1;
    int week = (ordinal - wd + 10) / 7;
    if (week < 1) return IsoWeek{date.year - 1, iso_weeks_in_year(date.year - 1)};
    if (week > iso_weeks_in_year(date.year)) return IsoWeek{date.year + 1, 1};
    return IsoWeek{date.year, week};
}

int64_t iso_week_start(const IsoWeek& wk) {
    // Jan 4 is always inside week 1 of its ISO year.
    int64_t jan4 = days_from_civil(wk.year, 1, 4);
    int64_t week1_monday = jan4 - (iso_weekday(jan4) - 1);
    return (week1_monday + 7 * static_cast<int64_t>(wk.week - 1)) * kSecondsPerDay;
}

int64_t day_start(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / kSecondsPerDay;
    if (epoch_seconds < 0 && epoch_seconds % kSecondsPerDay != 0) --days;
    return days * kSecondsPerDay;
}

int64_t parse_iso8601(std::string_view text) {
    // Date part: YYYY-MM-DD
    if (text.size() < 19)
        throw ParseError("timestamp too short: '" + std::string(text) + "'");
    int year = parse_fixed_uint(text, 0, 4, "year");
    if (text[4] != '-') throw ParseError("expected '-' after year");
    int month = parse_fixed_uint(text, 5, 2, "month");
    if (text[7] != '-') throw ParseError("expected '-' after month");
    int day = parse_fixed_uint(text, 8, 2, "day");
    if (month < 1 || month > 12)
        throw ParseError("month out of range: '" + std::string(text) + "'");
    if (day < 1 || day > days_in_month(year, static_cast<unsigned>(month)))
        throw ParseError("day out of range: '" + std::string(text) + "'");

    if (text[10] != 'T' && text[10] != ' ')
        throw ParseError("expected 'T' between date and time");
    int hour = parse_fixed_uint(text, 11, 2, "hour");
    if (text[13] != ':') throw ParseError("expected ':' after hour");
    int minute = parse_fixed_uint(text, 14, 2, "minute");
    if (text[16] != ':') throw ParseError("expected ':' after minute");
    int second = parse_fixed_uint(text, 17, 2, "second");
    if (hour > 23 || minute > 59 || second > 60)
        throw ParseError("time out of range: '" + std::string(text) + "'");
    if (second == 60) second = 59;  // fold leap seconds

    size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        size_t digits = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) throw ParseError("empty fractional seconds");
    }

    int64_t offset_seconds = 0;
    if (pos < text.size()) {
        char c = text[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int sign = (c == '-') ? -1 : 1;
            ++pos;
            int oh = parse_fixed_uint(text, pos, 2, "offset hour");
            pos += 2;
            if (pos < text.size() && text[pos] == ':') ++pos;
            int om = parse_fixed_uint(text, pos, 2, "offset minute");
            pos += 2;
            if (oh > 23 || om > 59)
                throw ParseError("offset out of range: '" + std::string(text) + "'");
            offset_seconds = sign * (oh * 3600 + om * 60);
        } else {
            throw ParseError("unexpected trailing characters: '" +
                             std::string(text) + "'");
        }
    }
    if (pos != text.size())
        throw ParseError("unexpected trailing characters: '" + std::string(text) + "'");

    int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                   static_cast<unsigned>(day));
    int64_t local = days * kSecondsPerDay + hour * 3600 + minute * 60 + second;
    return local - offset_seconds;
}

std::string format_iso8601(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / kSecondsPerDay;
    int64_t rem = epoch_seconds % kSecondsPerDay;
    if (rem < 0) {
        rem += kSecondsPerDay;
        --days;
    }
    CivilDate date = civil_from_days(days);
    char buf[24];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", date.year,
                  date.month, date.day, static_cast<int>(rem / 3600),
                  static_cast<int>((rem / 60) % 60), static_cast<int>(rem % 60));
    return buf;
}

std::string iso_week_key(const IsoWeek& wk) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-W%02d", wk.year, wk.week);
    return buf;
}

std::string day_key(int64_t epoch_seconds) {
    int64_t days = epoch_seconds / kSecondsPerDay;
    if (epoch_seconds < 0 && epoch_seconds % kSecondsPerDay != 0) --days;
    CivilDate date = civil_from_days(days);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", date.year, date.month, date.day);
    return buf;
}

}  // namespace ctox

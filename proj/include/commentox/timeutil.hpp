#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace ctox {

// All timestamps are UTC epoch seconds. Parsing normalizes any ISO-8601
// offset to UTC; comparisons are integer-second.

struct CivilDate {
    int year;
    unsigned month;  // 1..12
    unsigned day;    // 1..31
};

// Days since 1970-01-01 for a proleptic Gregorian date.
int64_t days_from_civil(int year, unsigned month, unsigned day);
CivilDate civil_from_days(int64_t days);

// ISO weekday, Monday = 1 .. Sunday = 7.
int iso_weekday(int64_t days);

struct IsoWeek {
    int year;  // ISO week-based year, may differ from the civil year
    int week;  // 1..53
};

IsoWeek iso_week_of(int64_t epoch_seconds);

// Epoch seconds of 00:00 UTC on the Monday opening the given ISO week.
int64_t iso_week_start(const IsoWeek& wk);

// Epoch seconds of 00:00 UTC on the civil day containing `epoch_seconds`.
int64_t day_start(int64_t epoch_seconds);

// Accepts YYYY-MM-DD[T ]HH:MM:SS[.frac][Z|+HH:MM|-HH:MM|+HHMM|-HHMM].
// A missing zone designator means UTC. Fractional seconds are truncated.
// Throws ParseError on malformed input.
int64_t parse_iso8601(std::string_view text);

// Canonical rendering: YYYY-MM-DDTHH:MM:SSZ.
std::string format_iso8601(int64_t epoch_seconds);

// "2020-W07" style key used for weekly bins.
std::string iso_week_key(const IsoWeek& wk);

// "2020-02-17" style key used for daily bins.
std::string day_key(int64_t epoch_seconds);

}  // namespace ctox

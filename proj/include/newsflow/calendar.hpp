#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace newsflow {

// Calendar date in the exchange time zone.
struct CivilDate {
    int year = 0;
    int month = 0;  // 1..12
    int day = 0;    // 1..31

    auto operator<=>(const CivilDate&) const = default;
};

// Days since 1970-01-01 (proleptic Gregorian).
std::int64_t days_from_civil(CivilDate d);
CivilDate civil_from_days(std::int64_t days);
int weekday_from_days(std::int64_t days);  // 0 = Sunday .. 6 = Saturday

CivilDate parse_date(const std::string& iso);  // "YYYY-MM-DD"
std::string date_to_string(CivilDate d);

// Absolute instant as seconds since the Unix epoch (UTC).
using EpochSeconds = std::int64_t;

// "YYYY-MM-DDTHH:MM:SS±HH:MM" or trailing "Z". The offset is required so
// instants are unambiguous; conversion to exchange-local time happens here.
EpochSeconds parse_instant(const std::string& iso);

// US/Eastern offset in minutes for the instant (-300 EST / -240 EDT,
// post-2007 DST rules: second Sunday of March to first Sunday of November).
int eastern_offset_minutes(EpochSeconds t);

struct LocalParts {
    CivilDate date;
    int minute_of_day = 0;  // 0..1439
    int second = 0;         // 0..59
};

LocalParts eastern_local_parts(EpochSeconds t);

// Inverse of the above for whole minutes; used when emitting timestamps.
EpochSeconds eastern_local_to_epoch(CivilDate date, int minute_of_day);
std::string format_instant_eastern(EpochSeconds t);

inline constexpr int kSessionOpenMinute = 570;  // 9:30 local
inline constexpr int kSessionMinutes = 390;     // 9:30 .. 16:00

// Grid coordinate of an in-session minute.
struct GridMinute {
    int day_index = 0;
    int minute = 0;  // 0..389
};

// The trading-time grid: an explicit ordered list of trading days plus the
// fixed 390-minute session. Immutable after construction.
class TradingCalendar {
public:
    explicit TradingCalendar(std::vector<CivilDate> trading_days);

    static TradingCalendar from_file(const std::string& path);

    std::size_t day_count() const { return days_.size(); }
    const std::vector<CivilDate>& trading_days() const { return days_; }
    CivilDate day(int index) const { return days_.at(static_cast<std::size_t>(index)); }

    std::optional<int> day_index(CivilDate d) const;

    // Maps an absolute instant onto the grid; absent when the instant falls
    // outside trading days or the 9:30-16:00 session.
    std::optional<GridMinute> minute_index(EpochSeconds t) const;

    // Session-open instant of a trading day, for emitting bin timestamps.
    EpochSeconds session_open_epoch(int day_index) const;

    std::size_t total_minutes() const { return days_.size() * kSessionMinutes; }

private:
    std::vector<CivilDate> days_;
    std::unordered_map<std::int64_t, int> index_by_day_;  // days_from_civil -> index
};

// Bin width in minutes; kDaily marks the one-bin-per-day scale.
class TimeScale {
public:
    static constexpr int kDaily = -1;

    explicit TimeScale(int width_minutes);
    static TimeScale daily() { return TimeScale(kDaily, true); }
    static TimeScale parse(const std::string& text);  // "65" or "daily"

    bool is_daily() const { return width_ == kDaily; }
    int width() const { return width_; }
    int bins_per_day() const { return is_daily() ? 1 : kSessionMinutes / width_; }
    std::string label() const;

    bool operator==(const TimeScale& o) const { return width_ == o.width_; }

private:
    TimeScale(int width, bool) : width_(width) {}
    int width_;
};

// floor(t / width); rejects the daily scale (day binning is the day index).
int bin_of(int minute, const TimeScale& scale);

}  // namespace newsflow

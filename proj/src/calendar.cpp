#include "newsflow/calendar.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "newsflow/errors.hpp"

namespace newsflow {

std::int64_t days_from_civil(CivilDate d) {
    // Howard Hinnant's algorithm.
    const int y = d.year - (d.month <= 2);
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy =
        (153u * static_cast<unsigned>(d.month + (d.month > 2 ? -3 : 9)) + 2) / 5 +
        static_cast<unsigned>(d.day) - 1;
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
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned month = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (month <= 2)), static_cast<int>(month),
                     static_cast<int>(day)};
}

int weekday_from_days(std::int64_t days) {
    return static_cast<int>(((days % 7) + 11) % 7);  // 1970-01-01 was a Thursday
}

CivilDate parse_date(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    if (std::sscanf(iso.c_str(), "%4d-%2d-%2d", &y, &m, &d) != 3 || m < 1 || m > 12 || d < 1 ||
        d > 31) {
        throw DataError("bad date: '" + iso + "'");
    }
    return CivilDate{y, m, d};
}

std::string date_to_string(CivilDate d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return std::string(buf);
}

EpochSeconds parse_instant(const std::string& iso) {
    int y, mo, d, h, mi, s;
    if (std::sscanf(iso.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d", &y, &mo, &d, &h, &mi, &s) != 6) {
        throw DataError("bad timestamp: '" + iso + "'");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60) {
        throw DataError("bad timestamp fields: '" + iso + "'");
    }
    // Offset suffix: Z or ±HH:MM (also ±HHMM).
    std::size_t pos = iso.find_first_of("Z+-", 19);
    // The date's own '-' separators live before index 19, so this is the tz part.
    int offset_min = 0;
    if (pos == std::string::npos) {
        throw DataError("timestamp missing UTC offset: '" + iso + "'");
    }
    if (iso[pos] != 'Z') {
        int oh = 0, om = 0;
        const char* p = iso.c_str() + pos + 1;
        if (std::sscanf(p, "%2d:%2d", &oh, &om) != 2 && std::sscanf(p, "%2d%2d", &oh, &om) != 2) {
            throw DataError("bad UTC offset: '" + iso + "'");
        }
        offset_min = oh * 60 + om;
        if (iso[pos] == '-') offset_min = -offset_min;
    }
    const std::int64_t days = days_from_civil(CivilDate{y, mo, d});
    return days * 86400 + h * 3600 + mi * 60 + s - static_cast<std::int64_t>(offset_min) * 60;
}

namespace {

std::int64_t nth_weekday_of_month(int year, int month, int weekday, int nth) {
    std::int64_t first = days_from_civil(CivilDate{year, month, 1});
    int wd = weekday_from_days(first);
    int delta = (weekday - wd + 7) % 7;
    return first + delta + static_cast<std::int64_t>(nth - 1) * 7;
}

// [start, end) of daylight saving time in UTC epoch seconds for a year.
// Post-2007 US rule: 2nd Sunday of March 02:00 EST to 1st Sunday of
// November 02:00 EDT.
std::pair<EpochSeconds, EpochSeconds> dst_window_utc(int year) {
    const std::int64_t start_day = nth_weekday_of_month(year, 3, 0, 2);
    const std::int64_t end_day = nth_weekday_of_month(year, 11, 0, 1);
    EpochSeconds start = start_day * 86400 + 7 * 3600;  // 02:00 EST = 07:00 UTC
    EpochSeconds end = end_day * 86400 + 6 * 3600;      // 02:00 EDT = 06:00 UTC
    return {start, end};
}

}  // namespace

int eastern_offset_minutes(EpochSeconds t) {
    int year = civil_from_days(t / 86400 - (t % 86400 < 0 ? 1 : 0)).year;
    auto [start, end] = dst_window_utc(year);
    return (t >= start && t < end) ? -240 : -300;
}

LocalParts eastern_local_parts(EpochSeconds t) {
    const EpochSeconds local = t + static_cast<EpochSeconds>(eastern_offset_minutes(t)) * 60;
    std::int64_t days = local / 86400;
    std::int64_t rem = local % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    LocalParts parts;
    parts.date = civil_from_days(days);
    parts.minute_of_day = static_cast<int>(rem / 60);
    parts.second = static_cast<int>(rem % 60);
    return parts;
}

EpochSeconds eastern_local_to_epoch(CivilDate date, int minute_of_day) {
    // Guess with EST, then correct; session times are never near the 2 AM
    // transition so one correction suffices.
    EpochSeconds guess =
        days_from_civil(date) * 86400 + static_cast<EpochSeconds>(minute_of_day) * 60 + 300 * 60;
    return days_from_civil(date) * 86400 + static_cast<EpochSeconds>(minute_of_day) * 60 -
           static_cast<EpochSeconds>(eastern_offset_minutes(guess)) * 60;
}

std::string format_instant_eastern(EpochSeconds t) {
    const int off = eastern_offset_minutes(t);
    const LocalParts p = eastern_local_parts(t);
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d-%02d:%02d", p.date.year,
                  p.date.month, p.date.day, p.minute_of_day / 60, p.minute_of_day % 60, p.second,
                  -off / 60, (-off) % 60);
    return std::string(buf);
}

TradingCalendar::TradingCalendar(std::vector<CivilDate> trading_days) : days_(std::move(trading_days)) {
    if (days_.empty()) throw DataError("trading calendar is empty");
    for (std::size_t i = 0; i < days_.size(); ++i) {
        if (i > 0 && !(days_[i - 1] < days_[i])) {
            throw DataError("trading days not strictly increasing at " + date_to_string(days_[i]));
        }
        index_by_day_.emplace(days_from_civil(days_[i]), static_cast<int>(i));
    }
}

TradingCalendar TradingCalendar::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open trading-day list: " + path);
    std::vector<CivilDate> days;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        days.push_back(parse_date(line));
    }
    return TradingCalendar(std::move(days));
}

std::optional<int> TradingCalendar::day_index(CivilDate d) const {
    auto it = index_by_day_.find(days_from_civil(d));
    if (it == index_by_day_.end()) return std::nullopt;
    return it->second;
}

std::optional<GridMinute> TradingCalendar::minute_index(EpochSeconds t) const {
    const LocalParts p = eastern_local_parts(t);
    auto day = day_index(p.date);
    if (!day) return std::nullopt;
    const int m = p.minute_of_day - kSessionOpenMinute;
    if (m < 0 || m >= kSessionMinutes) return std::nullopt;
    return GridMinute{*day, m};
}

EpochSeconds TradingCalendar::session_open_epoch(int day_index) const {
    return eastern_local_to_epoch(day(day_index), kSessionOpenMinute);
}

TimeScale::TimeScale(int width_minutes) : width_(width_minutes) {
    if (width_ == kDaily) return;
    if (width_ <= 0 || kSessionMinutes % width_ != 0) {
        throw DataError("time scale must divide the 390-minute session: " +
                        std::to_string(width_minutes));
    }
}

TimeScale TimeScale::parse(const std::string& text) {
    if (text == "daily" || text == "DAILY") return daily();
    return TimeScale(std::stoi(text));
}

std::string TimeScale::label() const { return is_daily() ? "daily" : std::to_string(width_); }

int bin_of(int minute, const TimeScale& scale) {
    if (scale.is_daily()) throw DataError("bin_of is undefined at the daily scale");
    if (minute < 0 || minute >= kSessionMinutes) {
        throw DataError("intraday minute out of range: " + std::to_string(minute));
    }
    return minute / scale.width();
}

}  // namespace newsflow

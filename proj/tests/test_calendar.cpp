#include <doctest.h>

#include "newsflow/calendar.hpp"
#include "newsflow/errors.hpp"

using namespace newsflow;

namespace {

TradingCalendar june_week() {
    // 2012-06-04 is a Monday.
    return TradingCalendar({CivilDate{2012, 6, 4}, CivilDate{2012, 6, 5}, CivilDate{2012, 6, 6},
                            CivilDate{2012, 6, 7}, CivilDate{2012, 6, 8}});
}

}  // namespace

TEST_CASE("civil date round trip and weekdays") {
    CHECK(days_from_civil(CivilDate{1970, 1, 1}) == 0);
    CHECK(weekday_from_days(days_from_civil(CivilDate{2012, 6, 4})) == 1);  // Monday
    CHECK(weekday_from_days(days_from_civil(CivilDate{2012, 6, 2})) == 6);  // Saturday
    for (std::int64_t d : {-100000LL, -1LL, 0LL, 15400LL, 20000LL}) {
        CHECK(days_from_civil(civil_from_days(d)) == d);
    }
}

TEST_CASE("eastern offsets follow the post-2007 DST rule") {
    // June is daylight time, January standard time.
    CHECK(eastern_offset_minutes(parse_instant("2012-06-04T12:00:00Z")) == -240);
    CHECK(eastern_offset_minutes(parse_instant("2012-01-15T12:00:00Z")) == -300);
    // 2012 transitions: March 11 and November 4.
    CHECK(eastern_offset_minutes(parse_instant("2012-03-11T06:59:00Z")) == -300);
    CHECK(eastern_offset_minutes(parse_instant("2012-03-11T07:00:00Z")) == -240);
    CHECK(eastern_offset_minutes(parse_instant("2012-11-04T05:59:00Z")) == -240);
    CHECK(eastern_offset_minutes(parse_instant("2012-11-04T06:00:00Z")) == -300);
}

TEST_CASE("parse_instant handles offsets") {
    const EpochSeconds a = parse_instant("2012-06-04T09:30:00-04:00");
    const EpochSeconds b = parse_instant("2012-06-04T13:30:00Z");
    CHECK(a == b);
    CHECK_THROWS_AS(parse_instant("2012-06-04T09:30:00"), DataError);  // offset required
    CHECK_THROWS_AS(parse_instant("junk"), DataError);

    const LocalParts p = eastern_local_parts(a);
    CHECK(p.date == CivilDate{2012, 6, 4});
    CHECK(p.minute_of_day == 570);
    CHECK(format_instant_eastern(a) == "2012-06-04T09:30:00-04:00");
    CHECK(eastern_local_to_epoch(p.date, p.minute_of_day) == a);
}

TEST_CASE("minute_index maps the session and discards the rest") {
    const auto cal = june_week();
    // Session open maps to t = 0.
    auto open = cal.minute_index(parse_instant("2012-06-04T09:30:00-04:00"));
    REQUIRE(open.has_value());
    CHECK(open->day_index == 0);
    CHECK(open->minute == 0);
    // After close is discarded.
    CHECK_FALSE(cal.minute_index(parse_instant("2012-06-04T16:30:00-04:00")).has_value());
    CHECK_FALSE(cal.minute_index(parse_instant("2012-06-04T16:00:00-04:00")).has_value());
    // Non-trading Saturday is discarded.
    CHECK_FALSE(cal.minute_index(parse_instant("2012-06-02T12:00:00-04:00")).has_value());
    // Last in-session minute.
    auto last = cal.minute_index(parse_instant("2012-06-05T15:59:59-04:00"));
    REQUIRE(last.has_value());
    CHECK(last->day_index == 1);
    CHECK(last->minute == 389);
}

TEST_CASE("minute_index covers every session minute exactly once") {
    const auto cal = june_week();
    for (int d = 0; d < 2; ++d) {
        const EpochSeconds open = cal.session_open_epoch(d);
        for (int m = 0; m < kSessionMinutes; ++m) {
            auto g = cal.minute_index(open + 60 * m);
            REQUIRE(g.has_value());
            CHECK(g->day_index == d);
            CHECK(g->minute == m);
        }
        CHECK_FALSE(cal.minute_index(open - 1).has_value());
        CHECK_FALSE(cal.minute_index(open + 60 * kSessionMinutes).has_value());
    }
}

TEST_CASE("trading day list validation") {
    CHECK_THROWS_AS(TradingCalendar({CivilDate{2012, 6, 4}, CivilDate{2012, 6, 4}}), DataError);
    CHECK_THROWS_AS(TradingCalendar({CivilDate{2012, 6, 5}, CivilDate{2012, 6, 4}}), DataError);
    CHECK_THROWS_AS(TradingCalendar({}), DataError);
}

TEST_CASE("bin_of tiles the day") {
    CHECK(bin_of(64, TimeScale(65)) == 0);
    CHECK(bin_of(65, TimeScale(65)) == 1);
    CHECK(bin_of(389, TimeScale(130)) == 2);
    CHECK_THROWS_AS(bin_of(10, TimeScale::daily()), DataError);
    CHECK_THROWS_AS(bin_of(390, TimeScale(65)), DataError);

    for (int width : {1, 10, 30, 65, 130}) {
        const TimeScale scale(width);
        CHECK(scale.bins_per_day() * width == kSessionMinutes);
        // Concatenated bins tile the day with no gaps or overlap.
        int prev = 0;
        int count_in_bin = 0;
        for (int t = 0; t < kSessionMinutes; ++t) {
            const int b = bin_of(t, scale);
            if (b != prev) {
                CHECK(b == prev + 1);
                CHECK(count_in_bin == width);
                prev = b;
                count_in_bin = 0;
            }
            ++count_in_bin;
        }
        CHECK(count_in_bin == width);
        CHECK(prev == scale.bins_per_day() - 1);
    }
    CHECK(TimeScale(65).bins_per_day() == 6);
    CHECK(TimeScale(130).bins_per_day() == 3);
    CHECK(TimeScale(1).bins_per_day() == 390);
    CHECK_THROWS_AS(TimeScale(60), DataError);  // 60 does not divide 390
}

TEST_CASE("time scale parsing") {
    CHECK(TimeScale::parse("65").width() == 65);
    CHECK(TimeScale::parse("daily").is_daily());
    CHECK(TimeScale::parse("daily").label() == "daily");
    CHECK(TimeScale::parse("10").label() == "10");
}

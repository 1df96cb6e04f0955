#include <doctest.h>

#include <cmath>

#include "newsflow/errors.hpp"
#include "newsflow/series.hpp"
#include "newsflow/util.hpp"

using namespace newsflow;

namespace {

MinuteGrid grid_filled(int n_days, double value) {
    return MinuteGrid(static_cast<std::size_t>(n_days) * kSessionMinutes, value);
}

// Multiplicative day x minute grid a_d * b_t.
MinuteGrid multiplicative_grid(const std::vector<double>& a, const std::vector<double>& b) {
    MinuteGrid g(a.size() * kSessionMinutes);
    for (std::size_t d = 0; d < a.size(); ++d) {
        for (int t = 0; t < kSessionMinutes; ++t) {
            grid_at(g, static_cast<int>(d), t) = a[d] * b[t];
        }
    }
    return g;
}

std::vector<double> u_shape() {
    std::vector<double> b(kSessionMinutes);
    for (int t = 0; t < kSessionMinutes; ++t) {
        const double u = (t - 195.0) / 195.0;
        b[t] = 0.4 + 1.3 * u * u;
    }
    return b;
}

}  // namespace

TEST_CASE("volume profile of a constant grid is flat and sums to one") {
    const auto raw = grid_filled(2, 7.5);
    const auto profile = seasonal_profile_volume(raw, 2);
    double sum = 0.0;
    for (double z : profile.zeta) {
        CHECK(z == doctest::Approx(1.0 / kSessionMinutes).epsilon(1e-12));
        sum += z;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("volume profile of a multiplicative grid recovers the minute pattern") {
    const std::vector<double> a = {2.0, 5.0, 0.5};
    const auto b = u_shape();
    const auto raw = multiplicative_grid(a, b);
    const auto profile = seasonal_profile_volume(raw, 3);
    double b_sum = 0.0;
    for (double v : b) b_sum += v;
    for (int t = 0; t < kSessionMinutes; ++t) {
        CHECK(profile.zeta[t] == doctest::Approx(b[t] / b_sum).epsilon(1e-12));
    }
}

TEST_CASE("all-zero days are excluded from the profile average") {
    auto raw = grid_filled(3, 4.0);
    for (int t = 0; t < kSessionMinutes; ++t) grid_at(raw, 1, t) = 0.0;  // dead day
    const auto profile = seasonal_profile_volume(raw, 3);
    for (double z : profile.zeta) CHECK(z == doctest::Approx(1.0 / kSessionMinutes));
    CHECK_THROWS_AS(seasonal_profile_volume(grid_filled(2, 0.0), 2), DegenerateInputError);
}

TEST_CASE("return profile normalizes by mean absolute return") {
    SUBCASE("constant absolute returns give a flat unit profile") {
        auto raw = grid_filled(2, 0.001);
        for (int t = 0; t < kSessionMinutes; t += 2) grid_at(raw, 0, t) *= -1.0;  // signs vary
        const auto profile = seasonal_profile_returns(raw, 2);
        for (double z : profile.zeta) CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("multiplicative |r| recovers b_t over its mean") {
        const std::vector<double> a = {0.01, 0.07};
        const auto b = u_shape();
        const auto raw = multiplicative_grid(a, b);
        const auto profile = seasonal_profile_returns(raw, 2);
        double b_mean = 0.0;
        for (double v : b) b_mean += v;
        b_mean /= kSessionMinutes;
        for (int t = 0; t < kSessionMinutes; ++t) {
            CHECK(profile.zeta[t] == doctest::Approx(b[t] / b_mean).epsilon(1e-12));
        }
    }
    SUBCASE("flat days throw") {
        CHECK_THROWS_AS(seasonal_profile_returns(grid_filled(2, 0.0), 2), DegenerateInputError);
    }
}

TEST_CASE("deseasonalize divides by zeta with a zero guard") {
    const auto profile = seasonal_profile_volume(grid_filled(2, 3.0), 2);
    auto raw = grid_filled(2, 3.0);
    const auto out = deseasonalize(raw, profile, 2);
    for (int d = 0; d < 2; ++d) {
        for (int t = 0; t < kSessionMinutes; ++t) {
            CHECK(grid_at(out, d, t) == doctest::Approx(3.0 * kSessionMinutes).epsilon(1e-12));
        }
    }
    SeasonalProfile zeroed = profile;
    zeroed.zeta[5] = 0.0;
    const auto guarded = deseasonalize(raw, zeroed, 2);
    CHECK(grid_at(guarded, 0, 5) == 0.0);
    CHECK(grid_at(guarded, 1, 5) == 0.0);
}

TEST_CASE("deseasonalized multiplicative input is constant within each day") {
    // The exactness contract: raw a_d * b_t becomes a_d * sum(b) at every
    // minute of day d.
    const std::vector<double> a = {1.0, 3.0, 0.25, 10.0};
    const auto b = u_shape();
    const auto raw = multiplicative_grid(a, b);
    const auto profile = seasonal_profile_volume(raw, 4);
    const auto out = deseasonalize(raw, profile, 4);
    double b_sum = 0.0;
    for (double v : b) b_sum += v;
    for (std::size_t d = 0; d < a.size(); ++d) {
        for (int t = 0; t < kSessionMinutes; ++t) {
            CHECK(grid_at(out, static_cast<int>(d), t) ==
                  doctest::Approx(a[d] * b_sum).epsilon(1e-9));
        }
    }
}

namespace {

std::vector<MarketBar> bars_from_prices(const std::vector<std::tuple<int, int, double>>& prices) {
    std::vector<MarketBar> bars;
    for (const auto& [d, t, p] : prices) {
        bars.push_back(MarketBar{"X", d, t, p, 100.0});
    }
    return bars;
}

}  // namespace

TEST_CASE("minute returns with carry-forward prices") {
    SUBCASE("flat price means zero return") {
        const auto r = minute_returns(bars_from_prices({{0, 0, 100}, {0, 1, 100}}), 1);
        CHECK(grid_at(r.r, 0, 0) == 0.0);  // first observed bar
        CHECK(grid_at(r.r, 0, 1) == 0.0);
    }
    SUBCASE("a factor of ten is one log10 unit") {
        const auto r = minute_returns(bars_from_prices({{0, 0, 100}, {0, 1, 1000}}), 1);
        CHECK(grid_at(r.r, 0, 1) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("gaps carry the last price forward") {
        const auto r = minute_returns(bars_from_prices({{0, 0, 100}, {0, 2, 102}}), 1);
        CHECK(grid_at(r.r, 0, 1) == 0.0);
        CHECK(grid_at(r.r, 0, 2) == doctest::Approx(std::log10(1.02)).epsilon(1e-12));
    }
    SUBCASE("day boundary uses the previous close") {
        const auto r = minute_returns(bars_from_prices({{0, 389, 100}, {1, 0, 110}}), 2);
        CHECK(grid_at(r.r, 1, 0) == doctest::Approx(std::log10(1.1)).epsilon(1e-12));
        CHECK(r.daily_close[0] == doctest::Approx(100));
        CHECK(r.daily_close[1] == doctest::Approx(110));
    }
    SUBCASE("no bars at all is degenerate") {
        CHECK_THROWS_AS(minute_returns({}, 2), DegenerateInputError);
    }
}

namespace {

// Small dataset: one company, two days, one positive article with clicks
// plus one negative article, enough for every series to be defined.
Dataset panel_fixture(TradingCalendar& cal_out) {
    static const TradingCalendar cal({CivilDate{2012, 6, 4}, CivilDate{2012, 6, 5}});
    cal_out = cal;
    Dataset ds;
    ds.companies = {"X"};
    std::vector<MarketBar> bars;
    for (int d = 0; d < 2; ++d) {
        for (int t = 0; t < kSessionMinutes; ++t) {
            const double price = 100.0 + d + 0.001 * ((t * 37) % 11);
            bars.push_back(MarketBar{"X", d, t, price, 50.0 + (t % 7)});
        }
    }
    ds.market["X"] = std::move(bars);

    NewsArticle pos;
    pos.article_id = "pos";
    pos.publish_instant = parse_instant("2012-06-04T10:00:00-04:00");
    pos.title = "up";
    pos.tagged_companies = {"X"};
    NewsArticle neg;
    neg.article_id = "neg";
    neg.publish_instant = parse_instant("2012-06-04T22:00:00-04:00");  // out of session
    neg.title = "down";
    neg.tagged_companies = {"X"};
    ds.articles = {pos, neg};

    ds.click_grid = {
        {"pos", 0, 35, 6},
        {"neg", 0, 35, 2},
        {"pos", 1, 100, 4},
    };
    return ds;
}

}  // namespace

TEST_CASE("build_panel aggregates the six series coherently") {
    TradingCalendar cal({CivilDate{2012, 6, 4}});
    Dataset ds = panel_fixture(cal);
    const std::vector<int> signs = {1, -1};
    const auto data = build_company_minute_data(ds, cal, "X", signs);

    SUBCASE("sigma equals |R| at every scale") {
        for (const auto& scale : {TimeScale(1), TimeScale(65), TimeScale::daily()}) {
            const auto panel = build_panel(data, scale);
            for (std::size_t k = 0; k < panel.n_bins; ++k) {
                CHECK(panel.sigma[k] == std::fabs(panel.R[k]));
            }
        }
    }
    SUBCASE("|WS| is either C or zero, and arrays align") {
        for (const auto& scale : {TimeScale(10), TimeScale(130), TimeScale::daily()}) {
            const auto panel = build_panel(data, scale);
            CHECK(panel.V.size() == panel.n_bins);
            CHECK(panel.R.size() == panel.n_bins);
            CHECK(panel.sigma.size() == panel.n_bins);
            CHECK(panel.C.size() == panel.n_bins);
            CHECK(panel.S.size() == panel.n_bins);
            CHECK(panel.WS.size() == panel.n_bins);
            for (std::size_t k = 0; k < panel.n_bins; ++k) {
                const double absws = std::fabs(panel.WS[k]);
                CHECK((absws == doctest::Approx(panel.C[k]).epsilon(1e-12) || absws == 0.0));
            }
        }
    }
    SUBCASE("aggregation consistency: 10-minute sums match 130-minute bins") {
        const auto fine = build_panel(data, TimeScale(10));
        const auto coarse = build_panel(data, TimeScale(130));
        REQUIRE(fine.n_bins == coarse.n_bins * 13);
        for (std::size_t k = 0; k < coarse.n_bins; ++k) {
            double v = 0.0, r = 0.0, c = 0.0, s = 0.0;
            for (std::size_t j = 0; j < 13; ++j) {
                v += fine.V[k * 13 + j];
                r += fine.R[k * 13 + j];
                c += fine.C[k * 13 + j];
                s += fine.S[k * 13 + j];
            }
            CHECK(v == doctest::Approx(coarse.V[k]).epsilon(1e-9));
            CHECK(r == doctest::Approx(coarse.R[k]).epsilon(1e-9));
            CHECK(c == doctest::Approx(coarse.C[k]).epsilon(1e-9));
            CHECK(s == doctest::Approx(coarse.S[k]).epsilon(1e-9));
        }
    }
    SUBCASE("R at scale w is the sum of constituent minute R values") {
        const auto minute = build_panel(data, TimeScale(1));
        const auto hourly = build_panel(data, TimeScale(65));
        for (std::size_t k = 0; k < hourly.n_bins; ++k) {
            double sum = 0.0;
            for (std::size_t j = 0; j < 65; ++j) sum += minute.R[k * 65 + j];
            CHECK(hourly.R[k] == doctest::Approx(sum).epsilon(1e-9));
        }
    }
    SUBCASE("sentiment lands in the publication bin, in-session only") {
        const auto minute = build_panel(data, TimeScale(1));
        // "pos" published 10:00 -> minute 30 of day 0; "neg" out of session.
        CHECK(minute.S[30] == doctest::Approx(1.0));
        double s_total = 0.0;
        for (double s : minute.S) s_total += s;
        CHECK(s_total == doctest::Approx(1.0));
    }
    SUBCASE("weighted sentiment combines sign of clicks with C") {
        const auto minute = build_panel(data, TimeScale(1));
        // Day 0 minute 35 holds +6 and -2 clicks: ws_bar = +4 -> WS = +C.
        CHECK(minute.WS[35] == doctest::Approx(minute.C[35]));
        CHECK(minute.C[35] > 0.0);
        // Day 1 minute 100 holds +4 only.
        CHECK(minute.WS[390 + 100] == doctest::Approx(minute.C[390 + 100]));
        // A quiet bin has C = S = WS = 0.
        CHECK(minute.C[2] == 0.0);
        CHECK(minute.WS[2] == 0.0);
        CHECK(minute.S[2] == 0.0);
    }
    SUBCASE("opposite-sign clicks cancel to WS = 0 even though C > 0") {
        Dataset tie = ds;
        tie.click_grid = {{"pos", 0, 40, 3}, {"neg", 0, 40, 3}};
        const auto tie_data = build_company_minute_data(tie, cal, "X", signs);
        const auto minute = build_panel(tie_data, TimeScale(1));
        CHECK(minute.C[40] > 0.0);
        CHECK(minute.WS[40] == 0.0);
    }
    SUBCASE("daily scale skips de-seasonalization and uses close-to-close") {
        const auto daily = build_panel(data, TimeScale::daily());
        REQUIRE(daily.n_bins == 2);
        double raw_vol_day0 = 0.0;
        for (int t = 0; t < kSessionMinutes; ++t) raw_vol_day0 += grid_at(data.raw_volume, 0, t);
        CHECK(daily.V[0] == doctest::Approx(raw_vol_day0).epsilon(1e-12));
        CHECK(daily.R[0] == 0.0);  // no previous close
        CHECK(daily.R[1] ==
              doctest::Approx(std::log10(data.returns.daily_close[1] /
                                         data.returns.daily_close[0])).epsilon(1e-12));
    }
    SUBCASE("rebuilding the panel is bit-identical") {
        const auto a = build_panel(data, TimeScale(65));
        const auto b = build_panel(build_company_minute_data(ds, cal, "X", signs), TimeScale(65));
        CHECK(a.V == b.V);
        CHECK(a.R == b.R);
        CHECK(a.WS == b.WS);
    }
}

TEST_CASE("panel csv and profile sidecar serialize") {
    TradingCalendar cal({CivilDate{2012, 6, 4}});
    Dataset ds = panel_fixture(cal);
    const auto data = build_company_minute_data(ds, cal, "X", {1, -1});
    const auto panel = build_panel(data, TimeScale(130));
    const std::string csv = panel_to_csv(panel, cal);
    CHECK(csv.rfind("bin_start_iso,V,R,sigma,C,S,WS\n", 0) == 0);
    CHECK(csv.find("2012-06-04T09:30:00-04:00") != std::string::npos);
    CHECK(csv.find("2012-06-04T11:40:00-04:00") != std::string::npos);  // second 130-min bin
    const std::string sidecar = profiles_to_json(data);
    CHECK(sidecar.find("zeta_volume") != std::string::npos);
    CHECK(sidecar.find("zeta_returns") != std::string::npos);
    CHECK(sidecar.find("zeta_clicks") != std::string::npos);
}

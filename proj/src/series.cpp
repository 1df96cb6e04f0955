#include "newsflow/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "newsflow/errors.hpp"
#include "newsflow/util.hpp"

namespace newsflow {

namespace {

SeasonalProfile day_normalized_profile(const MinuteGrid& raw, int n_days,
                                       SeasonalProfile::Kind kind, const char* what) {
    SeasonalProfile profile;
    profile.kind = kind;
    profile.zeta.assign(kSessionMinutes, 0.0);
    int used_days = 0;
    for (int d = 0; d < n_days; ++d) {
        double day_total = 0.0;
        for (int t = 0; t < kSessionMinutes; ++t) day_total += grid_at(raw, d, t);
        if (day_total <= 0.0) continue;
        ++used_days;
        for (int t = 0; t < kSessionMinutes; ++t) {
            profile.zeta[t] += grid_at(raw, d, t) / day_total;
        }
    }
    if (used_days == 0) {
        throw DegenerateInputError(std::string(what) + ": no day with positive total");
    }
    for (double& z : profile.zeta) z /= used_days;
    return profile;
}

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

SeasonalProfile seasonal_profile_volume(const MinuteGrid& raw, int n_days) {
    return day_normalized_profile(raw, n_days, SeasonalProfile::Kind::volume, "volume profile");
}

SeasonalProfile seasonal_profile_clicks(const MinuteGrid& raw, int n_days) {
    return day_normalized_profile(raw, n_days, SeasonalProfile::Kind::clicks, "click profile");
}

SeasonalProfile seasonal_profile_returns(const MinuteGrid& returns, int n_days) {
    SeasonalProfile profile;
    profile.kind = SeasonalProfile::Kind::returns;
    profile.zeta.assign(kSessionMinutes, 0.0);
    int used_days = 0;
    for (int d = 0; d < n_days; ++d) {
        double mean_abs = 0.0;
        for (int t = 0; t < kSessionMinutes; ++t) mean_abs += std::fabs(grid_at(returns, d, t));
        mean_abs /= kSessionMinutes;
        if (mean_abs <= 0.0) continue;
        ++used_days;
        for (int t = 0; t < kSessionMinutes; ++t) {
            profile.zeta[t] += std::fabs(grid_at(returns, d, t)) / mean_abs;
        }
    }
    if (used_days == 0) throw DegenerateInputError("return profile: all days flat");
    for (double& z : profile.zeta) z /= used_days;
    return profile;
}

MinuteGrid deseasonalize(const MinuteGrid& raw, const SeasonalProfile& profile, int n_days) {
    MinuteGrid out(raw.size(), 0.0);
    for (int d = 0; d < n_days; ++d) {
        for (int t = 0; t < kSessionMinutes; ++t) {
            const double z = profile.zeta[t];
            grid_at(out, d, t) = z > 0.0 ? grid_at(raw, d, t) / z : 0.0;
        }
    }
    return out;
}

MinuteReturns minute_returns(const std::vector<MarketBar>& bars, int n_days) {
    if (bars.empty()) throw DegenerateInputError("no prices observed for company");
    MinuteReturns out;
    out.r.assign(static_cast<std::size_t>(n_days) * kSessionMinutes, 0.0);
    out.daily_close.assign(n_days, std::numeric_limits<double>::quiet_NaN());

    // Bars are sorted by (day, minute); walk the grid carrying the last price.
    double prev_price = std::numeric_limits<double>::quiet_NaN();
    std::size_t bar_idx = 0;
    for (int d = 0; d < n_days; ++d) {
        for (int t = 0; t < kSessionMinutes; ++t) {
            double price = prev_price;
            while (bar_idx < bars.size() && bars[bar_idx].day_index == d &&
                   bars[bar_idx].minute == t) {
                price = bars[bar_idx].last_price;
                ++bar_idx;
            }
            if (!std::isnan(prev_price) && !std::isnan(price)) {
                grid_at(out.r, d, t) = std::log10(price / prev_price);
            }
            prev_price = price;
        }
        out.daily_close[d] = prev_price;
    }
    return out;
}

CompanyMinuteData build_company_minute_data(const Dataset& dataset, const TradingCalendar& cal,
                                            const std::string& company,
                                            const std::vector<int>& signs) {
    if (signs.size() != dataset.articles.size()) {
        throw DataError("sign vector does not match the article list");
    }
    const int n_days = static_cast<int>(cal.day_count());
    const std::size_t n_minutes = static_cast<std::size_t>(n_days) * kSessionMinutes;

    CompanyMinuteData data;
    data.company = company;
    data.n_days = n_days;
    data.raw_volume.assign(n_minutes, 0.0);
    data.raw_clicks.assign(n_minutes, 0.0);
    data.ws_bar.assign(n_minutes, 0.0);
    data.s_pub.assign(n_minutes, 0.0);

    auto market_it = dataset.market.find(company);
    if (market_it == dataset.market.end() || market_it->second.empty()) {
        throw DegenerateInputError("no prices observed for company " + company);
    }
    for (const auto& bar : market_it->second) {
        grid_at(data.raw_volume, bar.day_index, bar.minute) += bar.volume;
    }
    data.returns = minute_returns(market_it->second, n_days);

    const auto clicks = company_click_series(dataset.articles, dataset.click_grid, company);
    for (const auto& entry : clicks.entries) {
        grid_at(data.raw_clicks, entry.day_index, entry.minute) +=
            static_cast<double>(entry.clicks);
        grid_at(data.ws_bar, entry.day_index, entry.minute) +=
            static_cast<double>(entry.clicks) * signs[entry.article_index];
    }
    for (std::size_t i = 0; i < dataset.articles.size(); ++i) {
        const auto& article = dataset.articles[i];
        const auto& tags = article.tagged_companies;
        if (std::find(tags.begin(), tags.end(), company) == tags.end()) continue;
        if (const auto g = cal.minute_index(article.publish_instant)) {
            grid_at(data.s_pub, g->day_index, g->minute) += signs[i];
        }
    }

    data.zeta_v = seasonal_profile_volume(data.raw_volume, n_days);
    data.zeta_r = seasonal_profile_returns(data.returns.r, n_days);
    data.zeta_c = seasonal_profile_clicks(data.raw_clicks, n_days);
    return data;
}

CompanyPanel build_panel(const CompanyMinuteData& data, const TimeScale& scale) {
    CompanyPanel panel;
    panel.company = data.company;
    panel.scale = scale;
    const int n_days = data.n_days;

    if (scale.is_daily()) {
        panel.n_bins = static_cast<std::size_t>(n_days);
        panel.V.assign(panel.n_bins, 0.0);
        panel.R.assign(panel.n_bins, 0.0);
        panel.sigma.assign(panel.n_bins, 0.0);
        panel.C.assign(panel.n_bins, 0.0);
        panel.S.assign(panel.n_bins, 0.0);
        panel.WS.assign(panel.n_bins, 0.0);
        for (int d = 0; d < n_days; ++d) {
            double ws_bar = 0.0;
            for (int t = 0; t < kSessionMinutes; ++t) {
                panel.V[d] += grid_at(data.raw_volume, d, t);
                panel.C[d] += grid_at(data.raw_clicks, d, t);
                panel.S[d] += grid_at(data.s_pub, d, t);
                ws_bar += grid_at(data.ws_bar, d, t);
            }
            const double prev = d > 0 ? data.returns.daily_close[d - 1]
                                      : std::numeric_limits<double>::quiet_NaN();
            const double cur = data.returns.daily_close[d];
            panel.R[d] = (std::isnan(prev) || std::isnan(cur)) ? 0.0 : std::log10(cur / prev);
            panel.sigma[d] = std::fabs(panel.R[d]);
            panel.WS[d] = sign_of(ws_bar) * panel.C[d];
        }
        return panel;
    }

    const int width = scale.width();
    const int bins_per_day = scale.bins_per_day();
    panel.n_bins = static_cast<std::size_t>(n_days) * bins_per_day;
    panel.V.assign(panel.n_bins, 0.0);
    panel.R.assign(panel.n_bins, 0.0);
    panel.sigma.assign(panel.n_bins, 0.0);
    panel.C.assign(panel.n_bins, 0.0);
    panel.S.assign(panel.n_bins, 0.0);
    panel.WS.assign(panel.n_bins, 0.0);

    std::vector<double> ws_bar(panel.n_bins, 0.0);
    for (int d = 0; d < n_days; ++d) {
        for (int t = 0; t < kSessionMinutes; ++t) {
            const std::size_t k = static_cast<std::size_t>(d) * bins_per_day + t / width;
            const double zv = data.zeta_v.zeta[t];
            const double zr = data.zeta_r.zeta[t];
            const double zc = data.zeta_c.zeta[t];
            panel.V[k] += zv > 0.0 ? grid_at(data.raw_volume, d, t) / zv : 0.0;
            panel.R[k] += zr > 0.0 ? grid_at(data.returns.r, d, t) / zr : 0.0;
            panel.C[k] += zc > 0.0 ? grid_at(data.raw_clicks, d, t) / zc : 0.0;
            panel.S[k] += grid_at(data.s_pub, d, t);
            ws_bar[k] += grid_at(data.ws_bar, d, t);
        }
    }
    for (std::size_t k = 0; k < panel.n_bins; ++k) {
        panel.sigma[k] = std::fabs(panel.R[k]);
        panel.WS[k] = sign_of(ws_bar[k]) * panel.C[k];
    }
    return panel;
}

std::string panel_to_csv(const CompanyPanel& panel, const TradingCalendar& cal) {
    std::ostringstream out;
    out << "bin_start_iso,V,R,sigma,C,S,WS\n";
    const int bins_per_day = panel.scale.bins_per_day();
    for (std::size_t k = 0; k < panel.n_bins; ++k) {
        const int day = static_cast<int>(k) / bins_per_day;
        const int bin_in_day = static_cast<int>(k) % bins_per_day;
        const int minute = panel.scale.is_daily() ? 0 : bin_in_day * panel.scale.width();
        const EpochSeconds start = cal.session_open_epoch(day) + 60 * minute;
        out << format_instant_eastern(start) << ',' << format_double(panel.V[k]) << ','
            << format_double(panel.R[k]) << ',' << format_double(panel.sigma[k]) << ','
            << format_double(panel.C[k]) << ',' << format_double(panel.S[k]) << ','
            << format_double(panel.WS[k]) << '\n';
    }
    return out.str();
}

std::string profiles_to_json(const CompanyMinuteData& data) {
    nlohmann::json j;
    j["company"] = data.company;
    j["zeta_volume"] = data.zeta_v.zeta;
    j["zeta_returns"] = data.zeta_r.zeta;
    j["zeta_clicks"] = data.zeta_c.zeta;
    return j.dump(2) + "\n";
}

}  // namespace newsflow

#pragma once

#include <string>
#include <vector>

#include "newsflow/calendar.hpp"
#include "newsflow/ingest.hpp"

namespace newsflow {

// Minute-of-day rescaling factors zeta_t (390 entries). For volume and
// clicks the factors sum to 1 over the day; for returns they average to 1.
struct SeasonalProfile {
    enum class Kind { volume, returns, clicks };
    Kind kind = Kind::volume;
    std::vector<double> zeta;  // size 390
};

// Raw minute grids are dense row-major [n_days x 390] arrays.
using MinuteGrid = std::vector<double>;

inline double& grid_at(MinuteGrid& g, int day, int minute) {
    return g[static_cast<std::size_t>(day) * kSessionMinutes + minute];
}
inline double grid_at(const MinuteGrid& g, int day, int minute) {
    return g[static_cast<std::size_t>(day) * kSessionMinutes + minute];
}

// zeta_t = (1/T') sum_{d: Lambda_d > 0} raw(d,t) / Lambda_d with
// Lambda_d the day total; days with zero total are excluded.
SeasonalProfile seasonal_profile_volume(const MinuteGrid& raw, int n_days);
SeasonalProfile seasonal_profile_clicks(const MinuteGrid& raw, int n_days);

// zeta_t = (1/T') sum_{d: Xi_d > 0} |r(d,t)| / Xi_d with Xi_d the mean
// absolute return of day d.
SeasonalProfile seasonal_profile_returns(const MinuteGrid& returns, int n_days);

// out(d,t) = raw(d,t) / zeta_t, with 0 where zeta_t = 0.
MinuteGrid deseasonalize(const MinuteGrid& raw, const SeasonalProfile& profile, int n_days);

struct MinuteReturns {
    MinuteGrid r;                     // log10 returns with carry-forward prices
    std::vector<double> daily_close;  // carried close per day (NaN before first trade)
};

// r_t = log10(p_t / p_{t-1}) with p carried forward through gaps and across
// days; the first observed bar has r = 0.
MinuteReturns minute_returns(const std::vector<MarketBar>& bars, int n_days);

// Aligned six-series bundle for one company at one time scale.
struct CompanyPanel {
    std::string company;
    TimeScale scale = TimeScale(1);
    std::vector<double> V, R, sigma, C, S, WS;
    std::size_t n_bins = 0;
};

// Per-company minute-resolution intermediate shared by all scales.
struct CompanyMinuteData {
    std::string company;
    int n_days = 0;
    MinuteGrid raw_volume;
    MinuteGrid raw_clicks;
    MinuteGrid ws_bar;   // sum of clicks x article sign per minute
    MinuteGrid s_pub;    // sum of signs of articles published in the minute
    MinuteReturns returns;
    SeasonalProfile zeta_v, zeta_r, zeta_c;
};

// Assembles the raw grids for a company and fits the three seasonal
// profiles. `signs` runs parallel to `dataset.articles`.
CompanyMinuteData build_company_minute_data(const Dataset& dataset, const TradingCalendar& cal,
                                            const std::string& company,
                                            const std::vector<int>& signs);

// Bins minute data to the requested scale. Intraday scales sum rescaled
// minute values; the daily scale skips de-seasonalization for V and C and
// uses close-to-close returns.
CompanyPanel build_panel(const CompanyMinuteData& data, const TimeScale& scale);

// Panel cache CSV `bin_start_iso,V,R,sigma,C,S,WS` and the profile sidecar.
std::string panel_to_csv(const CompanyPanel& panel, const TradingCalendar& cal);
std::string profiles_to_json(const CompanyMinuteData& data);

}  // namespace newsflow

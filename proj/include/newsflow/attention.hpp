#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "newsflow/calendar.hpp"
#include "newsflow/ingest.hpp"

namespace newsflow {

inline constexpr int kWeekMinutes = 7 * 1440;
inline constexpr int kDefaultAttentionHorizon = 300;  // five hours

// Clicks of one article keyed by wall-clock minute offsets from publication.
struct ArticleClicks {
    std::string article_id;
    std::int64_t publish_epoch_minute = 0;
    std::vector<std::pair<std::int64_t, std::int64_t>> clicks;  // (epoch_minute, count)
};

// Joins click events to article publish instants. Attention runs on
// wall-clock time, nights and weekends included.
std::vector<ArticleClicks> collect_article_clicks(const std::vector<NewsArticle>& articles,
                                                  const std::vector<ClickEvent>& events);

// F(m) = clicks in [publish, publish+m] / clicks in the first week,
// m = 0..horizon. Throws InsufficientDataError when the week total is zero.
std::vector<double> article_cum_curve(const ArticleClicks& article, int horizon_minutes);

std::int64_t week_total_clicks(const ArticleClicks& article);

struct AttentionCurve {
    int decile = 0;  // 1..10, 1 = fewest clicks
    std::vector<double> mean_cum_fraction;  // index = minutes after publication
    int n_articles = 0;
};

// Ten equal-count groups by total first-week clicks (ties break by
// article_id), pointwise mean of the normalized curves.
std::vector<AttentionCurve> decile_curves(const std::vector<ArticleClicks>& articles,
                                          int horizon_minutes = kDefaultAttentionHorizon);

struct AttentionFit {
    int decile = 0;
    double tau = 0.0;  // minutes
    double se_tau = 0.0;
};

// Least squares of F(m) = A (1 - exp(-m/tau)), A in (0,1], tau > 0;
// grid-seeded Gauss-Newton with backtracking.
AttentionFit fit_tau(const AttentionCurve& curve);

std::string curves_to_csv(const std::vector<AttentionCurve>& curves);
std::string fits_to_csv(const std::vector<AttentionFit>& fits);

}  // namespace newsflow

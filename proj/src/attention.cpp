#include "newsflow/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include "newsflow/errors.hpp"
#include "newsflow/util.hpp"

namespace newsflow {

std::vector<ArticleClicks> collect_article_clicks(const std::vector<NewsArticle>& articles,
                                                  const std::vector<ClickEvent>& events) {
    std::unordered_map<std::string, std::size_t> index;
    std::vector<ArticleClicks> out;
    out.reserve(articles.size());
    for (const auto& a : articles) {
        index.emplace(a.article_id, out.size());
        ArticleClicks ac;
        ac.article_id = a.article_id;
        const EpochSeconds t = a.publish_instant;
        ac.publish_epoch_minute = t / 60 - (t % 60 < 0 ? 1 : 0);
        out.push_back(std::move(ac));
    }
    for (const auto& ev : events) {
        auto it = index.find(ev.article_id);
        if (it == index.end()) continue;
        out[it->second].clicks.emplace_back(ev.epoch_minute, ev.clicks);
    }
    for (auto& ac : out) {
        std::sort(ac.clicks.begin(), ac.clicks.end());
    }
    return out;
}

std::int64_t week_total_clicks(const ArticleClicks& article) {
    std::int64_t total = 0;
    for (const auto& [minute, count] : article.clicks) {
        const std::int64_t offset = minute - article.publish_epoch_minute;
        if (offset >= 0 && offset < kWeekMinutes) total += count;
    }
    return total;
}

std::vector<double> article_cum_curve(const ArticleClicks& article, int horizon_minutes) {
    const std::int64_t total = week_total_clicks(article);
    if (total <= 0) {
        throw InsufficientDataError("article " + article.article_id +
                                    " has no clicks in the first week");
    }
    std::vector<double> curve(static_cast<std::size_t>(horizon_minutes) + 1, 0.0);
    for (const auto& [minute, count] : article.clicks) {
        const std::int64_t offset = minute - article.publish_epoch_minute;
        if (offset < 0 || offset >= kWeekMinutes) continue;
        if (offset <= horizon_minutes) {
            curve[static_cast<std::size_t>(offset)] += static_cast<double>(count);
        }
    }
    double cum = 0.0;
    for (double& v : curve) {
        cum += v;
        v = cum / static_cast<double>(total);
    }
    return curve;
}

std::vector<AttentionCurve> decile_curves(const std::vector<ArticleClicks>& articles,
                                          int horizon_minutes) {
    struct Eligible {
        std::int64_t total;
        std::size_t index;
        const std::string* id;
    };
    std::vector<Eligible> eligible;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        const std::int64_t total = week_total_clicks(articles[i]);
        if (total > 0) eligible.push_back({total, i, &articles[i].article_id});
    }
    if (eligible.size() < 10) {
        throw InsufficientDataError("decile grouping needs at least 10 articles with clicks");
    }
    std::sort(eligible.begin(), eligible.end(), [](const Eligible& a, const Eligible& b) {
        if (a.total != b.total) return a.total < b.total;
        return *a.id < *b.id;
    });

    const std::size_t n = eligible.size();
    std::vector<AttentionCurve> curves;
    curves.reserve(10);
    for (int g = 0; g < 10; ++g) {
        const std::size_t begin = g * n / 10;
        const std::size_t end = (g + 1) * n / 10;
        AttentionCurve curve;
        curve.decile = g + 1;
        curve.n_articles = static_cast<int>(end - begin);
        curve.mean_cum_fraction.assign(static_cast<std::size_t>(horizon_minutes) + 1, 0.0);
        for (std::size_t i = begin; i < end; ++i) {
            const auto f = article_cum_curve(articles[eligible[i].index], horizon_minutes);
            for (std::size_t m = 0; m < f.size(); ++m) curve.mean_cum_fraction[m] += f[m];
        }
        for (double& v : curve.mean_cum_fraction) v /= static_cast<double>(curve.n_articles);
        curves.push_back(std::move(curve));
    }
    return curves;
}

namespace {

double sse_for(const std::vector<double>& f, double amplitude, double tau) {
    double sse = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
        const double g = 1.0 - std::exp(-static_cast<double>(m) / tau);
        const double r = amplitude * g - f[m];
        sse += r * r;
    }
    return sse;
}

// Profile the amplitude: for fixed tau the optimal A is linear least
// squares, clamped into (0, 1].
double best_amplitude(const std::vector<double>& f, double tau) {
    double gf = 0.0, gg = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
        const double g = 1.0 - std::exp(-static_cast<double>(m) / tau);
        gf += g * f[m];
        gg += g * g;
    }
    if (gg <= 0.0) return 1.0;
    return std::clamp(gf / gg, 1e-12, 1.0);
}

}  // namespace

AttentionFit fit_tau(const AttentionCurve& curve) {
    const auto& f = curve.mean_cum_fraction;
    if (f.size() < 10) throw InsufficientDataError("attention fit needs >= 10 curve points");
    const double fmax = *std::max_element(f.begin(), f.end());
    if (fmax <= 0.0) throw FitFailureError("attention curve is identically zero");

    // Grid seed over log-spaced tau, amplitude profiled out.
    double tau = 0.0, amplitude = 0.0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (double t = 2.0; t <= 2048.0; t *= 1.5) {
        const double a = best_amplitude(f, t);
        const double sse = sse_for(f, a, t);
        if (sse < best_sse) {
            best_sse = sse;
            tau = t;
            amplitude = a;
        }
    }

    // Gauss-Newton on (A, tau) with backtracking and box projection.
    constexpr int kMaxIter = 200;
    bool converged = false;
    for (int iter = 0; iter < kMaxIter; ++iter) {
        double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, jtr0 = 0.0, jtr1 = 0.0;
        for (std::size_t m = 0; m < f.size(); ++m) {
            const double e = std::exp(-static_cast<double>(m) / tau);
            const double g = 1.0 - e;
            const double r = amplitude * g - f[m];
            const double ja = g;
            const double jt = -amplitude * e * static_cast<double>(m) / (tau * tau);
            jtj00 += ja * ja;
            jtj01 += ja * jt;
            jtj11 += jt * jt;
            jtr0 += ja * r;
            jtr1 += jt * r;
        }
        const double det = jtj00 * jtj11 - jtj01 * jtj01;
        if (!(std::fabs(det) > 1e-300)) break;
        double da = (-jtr0 * jtj11 + jtr1 * jtj01) / det;
        double dt = (-jtj00 * jtr1 + jtj01 * jtr0) / det;

        double step = 1.0;
        const double sse0 = sse_for(f, amplitude, tau);
        double new_a = amplitude, new_t = tau;
        bool improved = false;
        for (int half = 0; half < 40; ++half) {
            new_a = std::clamp(amplitude + step * da, 1e-12, 1.0);
            new_t = std::clamp(tau + step * dt, 1e-6, 1e9);
            if (sse_for(f, new_a, new_t) <= sse0) {
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) {
            converged = true;  // no descent direction left at this scale
            break;
        }
        const double rel = std::max(std::fabs(new_a - amplitude) / std::max(1e-12, amplitude),
                                    std::fabs(new_t - tau) / std::max(1e-12, tau));
        amplitude = new_a;
        tau = new_t;
        if (rel < 1e-6) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw FitFailureError("attention fit did not converge (tau=" + format_double(tau) +
                              ", A=" + format_double(amplitude) + ")");
    }

    // Residual-based asymptotic covariance for se(tau).
    double jtj00 = 0.0, jtj01 = 0.0, jtj11 = 0.0, sse = 0.0;
    for (std::size_t m = 0; m < f.size(); ++m) {
        const double e = std::exp(-static_cast<double>(m) / tau);
        const double g = 1.0 - e;
        const double r = amplitude * g - f[m];
        const double ja = g;
        const double jt = -amplitude * e * static_cast<double>(m) / (tau * tau);
        jtj00 += ja * ja;
        jtj01 += ja * jt;
        jtj11 += jt * jt;
        sse += r * r;
    }
    AttentionFit fit;
    fit.decile = curve.decile;
    fit.tau = tau;
    const double det = jtj00 * jtj11 - jtj01 * jtj01;
    const int dof = static_cast<int>(f.size()) - 2;
    if (det > 0.0 && dof > 0) {
        const double sigma2 = sse / dof;
        fit.se_tau = std::sqrt(std::max(0.0, sigma2 * jtj00 / det));
    } else {
        fit.se_tau = std::numeric_limits<double>::infinity();
    }
    return fit;
}

std::string curves_to_csv(const std::vector<AttentionCurve>& curves) {
    std::ostringstream out;
    out << "decile,minute,mean_cum_fraction,n_articles\n";
    for (const auto& curve : curves) {
        for (std::size_t m = 0; m < curve.mean_cum_fraction.size(); ++m) {
            out << curve.decile << ',' << m << ',' << format_double(curve.mean_cum_fraction[m])
                << ',' << curve.n_articles << '\n';
        }
    }
    return out.str();
}

std::string fits_to_csv(const std::vector<AttentionFit>& fits) {
    std::ostringstream out;
    out << "decile,tau,se_tau\n";
    for (const auto& fit : fits) {
        out << fit.decile << ',' << format_double(fit.tau) << ',' << format_double(fit.se_tau)
            << '\n';
    }
    return out.str();
}

}  // namespace newsflow

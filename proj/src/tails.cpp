#include "newsflow/tails.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "newsflow/errors.hpp"
#include "newsflow/mathkit.hpp"

namespace newsflow {

namespace {

// B_{2j} / (2j)! for the Euler-Maclaurin correction terms.
constexpr double kBernoulliOverFactorial[] = {
    1.0 / 12.0,           -1.0 / 720.0,          1.0 / 30240.0,       -1.0 / 1209600.0,
    1.0 / 47900160.0,     -691.0 / 1307674368000.0,  1.0 / 74724249600.0};

// Direct terms are summed until the argument is comfortably inside the
// asymptotic regime of the tail expansion.
constexpr double kDirectCutoff = 16.0;

}  // namespace

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0)) throw DataError("hurwitz_zeta requires s > 1");
    if (!(a > 0.0)) throw DataError("hurwitz_zeta requires a > 0");

    double sum = 0.0;
    double base = a;
    while (base < kDirectCutoff) {
        sum += std::pow(base, -s);
        base += 1.0;
    }
    // Euler-Maclaurin tail at `base`.
    const double inv = 1.0 / base;
    const double pow_s = std::pow(base, -s);       // base^-s
    sum += pow_s * base / (s - 1.0);               // base^(1-s) / (s-1)
    sum += 0.5 * pow_s;
    double rising = s;                             // s (s+1) ... rising factorial
    double power = pow_s * inv;                    // base^(-s-1), then -s-3, ...
    for (double coeff : kBernoulliOverFactorial) {
        sum += coeff * rising * power;
        rising *= (s + 1.0) * (s + 2.0);
        s += 2.0;  // shift so the rising factorial keeps extending
        power *= inv * inv;
    }
    return sum;
}

double power_law_ccdf(double alpha, std::int64_t x_min, std::int64_t x) {
    if (x <= x_min) return 1.0;
    const double s = 1.0 + alpha;
    return hurwitz_zeta(s, static_cast<double>(x)) / hurwitz_zeta(s, static_cast<double>(x_min));
}

std::int64_t power_law_sample(double alpha, std::int64_t x_min, Rng& rng) {
    const double u = rng.uniform01_open0();  // target: largest x with CCDF(x) >= u
    if (u >= power_law_ccdf(alpha, x_min, x_min + 1)) return x_min;
    // Double until CCDF(hi) < u, then binary search the step.
    std::int64_t lo = x_min + 1;  // CCDF(lo) >= u
    std::int64_t hi = lo;
    while (power_law_ccdf(alpha, x_min, hi) >= u) {
        lo = hi;
        if (hi > (std::int64_t{1} << 60)) break;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (power_law_ccdf(alpha, x_min, mid) >= u) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

namespace {

// Sorted distinct values with tail counts and tail log-sums; shared by the
// MLE and the KS scan.
struct TailTable {
    std::vector<std::int64_t> values;      // ascending distinct
    std::vector<std::int64_t> tail_count;  // #samples >= values[i]
    std::vector<double> tail_log_sum;      // sum of log(x) over samples >= values[i]
};

TailTable build_table(std::vector<std::int64_t> sorted) {
    TailTable table;
    const std::size_t n = sorted.size();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
        table.values.push_back(sorted[i]);
        table.tail_count.push_back(0);
        table.tail_log_sum.push_back(0.0);
        i = j + 1;
    }
    // Fill suffix aggregates from the top.
    std::int64_t count = 0;
    double log_sum = 0.0;
    std::size_t v = table.values.size();
    i = n;
    while (v-- > 0) {
        while (i > 0 && sorted[i - 1] == table.values[v]) {
            --i;
            ++count;
            log_sum += std::log(static_cast<double>(table.values[v]));
        }
        table.tail_count[v] = count;
        table.tail_log_sum[v] = log_sum;
    }
    return table;
}

double tail_log_likelihood(double alpha, double x_min, std::int64_t n_tail, double log_sum) {
    const double s = 1.0 + alpha;
    return -static_cast<double>(n_tail) * std::log(hurwitz_zeta(s, x_min)) - s * log_sum;
}

// Golden-section maximization over the fixed alpha bracket; the discrete
// power law is an exponential family, so the likelihood is unimodal.
double maximize_alpha(double x_min, std::int64_t n_tail, double log_sum) {
    constexpr double kGolden = 0.6180339887498949;
    double lo = kAlphaSearchLo, hi = kAlphaSearchHi;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = tail_log_likelihood(x1, x_min, n_tail, log_sum);
    double f2 = tail_log_likelihood(x2, x_min, n_tail, log_sum);
    while (hi - lo > 1e-7) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = tail_log_likelihood(x2, x_min, n_tail, log_sum);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = tail_log_likelihood(x1, x_min, n_tail, log_sum);
        }
    }
    return 0.5 * (lo + hi);
}

double observed_information_se(double alpha, double x_min, std::int64_t n_tail, double log_sum) {
    const double h = 1e-4 * std::max(1.0, alpha);
    const double l0 = tail_log_likelihood(alpha, x_min, n_tail, log_sum);
    const double lp = tail_log_likelihood(alpha + h, x_min, n_tail, log_sum);
    const double lm = tail_log_likelihood(alpha - h, x_min, n_tail, log_sum);
    const double second = (lp - 2.0 * l0 + lm) / (h * h);
    if (!(second < 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / std::sqrt(-second);
}

// KS distance between the empirical tail CDF and the fitted model CDF,
// evaluated at the distinct tail values. The suffix zeta values are walked
// incrementally; small gaps subtract individual terms, large gaps re-expand.
double ks_distance(const TailTable& table, std::size_t start, double alpha) {
    const double s = 1.0 + alpha;
    const double x_min = static_cast<double>(table.values[start]);
    const double z_min = hurwitz_zeta(s, x_min);
    const double n_tail = static_cast<double>(table.tail_count[start]);

    double ks = 0.0;
    double z = z_min;  // zeta(s, values[j]) walked upward
    for (std::size_t j = start; j < table.values.size(); ++j) {
        if (j > start) {
            const std::int64_t gap = table.values[j] - table.values[j - 1];
            if (gap <= 24) {
                for (std::int64_t k = table.values[j - 1]; k < table.values[j]; ++k) {
                    z -= std::pow(static_cast<double>(k), -s);
                }
            } else {
                z = hurwitz_zeta(s, static_cast<double>(table.values[j]));
            }
        }
        // Model and empirical CDF just below the next distinct value, i.e.
        // at x = values[j] inclusive.
        const double model_ccdf_next =
            (z - std::pow(static_cast<double>(table.values[j]), -s)) / z_min;
        const double model_cdf = 1.0 - model_ccdf_next;
        const double tail_above =
            j + 1 < table.values.size() ? static_cast<double>(table.tail_count[j + 1]) : 0.0;
        const double empirical_cdf = (n_tail - tail_above) / n_tail;
        ks = std::max(ks, std::fabs(empirical_cdf - model_cdf));
    }
    return ks;
}

struct ScanResult {
    std::size_t index = 0;  // into the table
    double alpha = 0.0;
    double ks = std::numeric_limits<double>::infinity();
};

ScanResult scan_xmin(const TailTable& table, int n_tail_min) {
    ScanResult best;
    bool found = false;
    for (std::size_t i = 0; i < table.values.size(); ++i) {
        if (table.tail_count[i] < n_tail_min) break;  // tail counts only shrink
        const double alpha = maximize_alpha(static_cast<double>(table.values[i]),
                                            table.tail_count[i], table.tail_log_sum[i]);
        const double ks = ks_distance(table, i, alpha);
        if (ks < best.ks) {
            best = ScanResult{i, alpha, ks};
            found = true;
        }
    }
    if (!found) throw InsufficientDataError("no x_min candidate with enough tail samples");
    return best;
}

}  // namespace

AlphaFit fit_alpha(const std::vector<std::int64_t>& samples, std::int64_t x_min, int n_tail_min) {
    std::int64_t n_tail = 0;
    double log_sum = 0.0;
    for (std::int64_t x : samples) {
        if (x >= x_min) {
            ++n_tail;
            log_sum += std::log(static_cast<double>(x));
        }
    }
    if (n_tail < n_tail_min) {
        throw InsufficientDataError("tail has " + std::to_string(n_tail) + " samples, need " +
                                    std::to_string(n_tail_min));
    }
    AlphaFit fit;
    fit.alpha = maximize_alpha(static_cast<double>(x_min), n_tail, log_sum);
    fit.se_alpha = observed_information_se(fit.alpha, static_cast<double>(x_min), n_tail, log_sum);
    fit.at_bound = fit.alpha >= kAlphaSearchHi - 1e-3 || fit.alpha <= kAlphaSearchLo + 1e-3;
    return fit;
}

TailFit fit_tail(const std::vector<std::int64_t>& samples, const TailFitOptions& options) {
    for (std::int64_t x : samples) {
        if (x < 1) throw DataError("power-law samples must be positive integers");
    }
    std::vector<std::int64_t> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const TailTable table = build_table(sorted);
    if (static_cast<int>(table.values.size()) < 2 ||
        table.tail_count[0] < options.n_tail_min) {
        throw InsufficientDataError("not enough samples for a tail fit");
    }

    const ScanResult best = scan_xmin(table, options.n_tail_min);

    TailFit fit;
    fit.alpha = best.alpha;
    fit.x_min = table.values[best.index];
    fit.ks = best.ks;
    fit.n_tail = static_cast<int>(table.tail_count[best.index]);
    fit.se_alpha = observed_information_se(best.alpha, static_cast<double>(fit.x_min),
                                           table.tail_count[best.index],
                                           table.tail_log_sum[best.index]);
    fit.degenerate = fit.alpha >= kAlphaSearchHi - 1e-3 || fit.alpha <= kAlphaSearchLo + 1e-3;

    if (options.bootstrap_replicates > 0) {
        const std::size_t n = sorted.size();
        std::vector<double> xmins(options.bootstrap_replicates, 0.0);
        std::vector<std::uint64_t> seeds(options.bootstrap_replicates);
        for (int r = 0; r < options.bootstrap_replicates; ++r) {
            seeds[r] = derive_seed(options.seed, 0x424f4f54ULL, r);
        }
        parallel_for(options.bootstrap_replicates, [&](std::size_t r) {
            Rng rng(seeds[r]);
            std::vector<std::int64_t> resampled(n);
            for (std::size_t i = 0; i < n; ++i) {
                resampled[i] = sorted[static_cast<std::size_t>(rng.below(n))];
            }
            std::sort(resampled.begin(), resampled.end());
            const TailTable t = build_table(std::move(resampled));
            const ScanResult s = scan_xmin(t, options.n_tail_min);
            xmins[r] = static_cast<double>(t.values[s.index]);
        });
        fit.se_xmin = std::sqrt(variance(xmins));
    }
    return fit;
}

std::vector<std::pair<double, double>> ccdf_points(const std::vector<std::int64_t>& samples,
                                                   double rescale_max) {
    if (samples.empty()) throw InsufficientDataError("ccdf of an empty sample");
    std::vector<std::int64_t> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::vector<std::pair<double, double>> points;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        points.emplace_back(static_cast<double>(sorted[i]),
                            static_cast<double>(sorted.size() - i) / n);
        i = j + 1;
    }
    if (rescale_max > 0.0) {
        const double factor = rescale_max / points.back().first;
        for (auto& [x, p] : points) {
            x *= factor;
            p *= factor;
        }
    }
    return points;
}

}  // namespace newsflow

#pragma once

#include <cstdint>
#include <vector>

#include "newsflow/util.hpp"

namespace newsflow {

// Hurwitz zeta sum_{k>=0} (k+a)^(-s) for s > 1, a > 0; direct summation
// plus an Euler-Maclaurin tail, relative accuracy ~1e-12.
double hurwitz_zeta(double s, double a);

// Discrete power law p(x) = x^(-1-alpha) / zeta(1+alpha, x_min) on integers
// x >= x_min.
double power_law_ccdf(double alpha, std::int64_t x_min, std::int64_t x);  // P(X >= x)

// Exact inverse-transform draw.
std::int64_t power_law_sample(double alpha, std::int64_t x_min, Rng& rng);

struct AlphaFit {
    double alpha = 0.0;
    double se_alpha = 0.0;
    bool at_bound = false;  // maximizer pinned at the search bracket
};

inline constexpr double kAlphaSearchLo = 0.1;
inline constexpr double kAlphaSearchHi = 5.0;
inline constexpr int kDefaultTailMin = 50;

// Maximum-likelihood alpha for the tail x >= x_min; the standard error comes
// from the observed information (central differences at the optimum).
AlphaFit fit_alpha(const std::vector<std::int64_t>& samples, std::int64_t x_min,
                   int n_tail_min = kDefaultTailMin);

struct TailFit {
    double alpha = 0.0;
    std::int64_t x_min = 1;
    double se_alpha = 0.0;
    double se_xmin = 0.0;
    double ks = 0.0;
    int n_tail = 0;
    bool degenerate = false;
};

struct TailFitOptions {
    int n_tail_min = kDefaultTailMin;
    int bootstrap_replicates = 200;
    std::uint64_t seed = 0;
};

// Scans candidate x_min over the distinct sample values with at least
// n_tail_min points above, minimizing the KS distance between empirical and
// model tail CDFs; se_xmin by seeded nonparametric bootstrap.
TailFit fit_tail(const std::vector<std::int64_t>& samples, const TailFitOptions& options = {});

// Empirical CCDF on distinct values; optionally both coordinates are scaled
// by the common factor rescale_max / max(x), which preserves the log-log
// slope.
std::vector<std::pair<double, double>> ccdf_points(const std::vector<std::int64_t>& samples,
                                                   double rescale_max = 0.0);

}  // namespace newsflow

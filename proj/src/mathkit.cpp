#include "newsflow/mathkit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "newsflow/errors.hpp"

namespace newsflow {

namespace {

// Continued fraction for the incomplete beta (Lentz's method).
double betacf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kFpMin = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw std::runtime_error("incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_incomplete_beta(double a, double b, double x) {
    if (a <= 0.0 || b <= 0.0) throw std::runtime_error("incomplete beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * betacf(a, b, x) / a;
    }
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double f_tail_prob(double f, int d1, int d2) {
    if (d1 < 1 || d2 < 1) throw std::runtime_error("F degrees of freedom must be >= 1");
    if (f <= 0.0) return 1.0;
    const double x = d2 / (d2 + d1 * f);
    return reg_incomplete_beta(0.5 * d2, 0.5 * d1, x);
}

OlsFit ols_qr(const std::vector<double>& X, const std::vector<double>& y, int n, int k) {
    if (n <= 0 || k <= 0 || static_cast<int>(X.size()) != n * k ||
        static_cast<int>(y.size()) != n) {
        throw std::runtime_error("ols_qr: inconsistent dimensions");
    }
    if (n < k) throw SingularRegressionError("more regressors than observations");

    Eigen::MatrixXd A(n, k);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j) A(i, j) = X[static_cast<std::size_t>(i) * k + j];
    Eigen::Map<const Eigen::VectorXd> b(y.data(), n);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < k) throw SingularRegressionError("rank-deficient design matrix");
    const auto& R = qr.matrixR();
    double rmax = 0.0, rmin = std::numeric_limits<double>::infinity();
    for (int j = 0; j < k; ++j) {
        const double d = std::fabs(R(j, j));
        rmax = std::max(rmax, d);
        rmin = std::min(rmin, d);
    }
    if (!(rmin > 0.0) || rmax / rmin > 1e12) {
        throw SingularRegressionError("ill-conditioned design matrix");
    }

    Eigen::VectorXd beta = qr.solve(b);
    Eigen::VectorXd resid = b - A * beta;

    OlsFit fit;
    fit.coef.assign(beta.data(), beta.data() + k);
    fit.rss = resid.squaredNorm();
    fit.n = n;
    fit.k = k;
    return fit;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of 1-based ranks
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
        i = j + 1;
    }
    return ranks;
}

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance(const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size());
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    const double mx = mean(x), my = mean(y);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw DegenerateInputError("pearson correlation of a constant series");
    }
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace newsflow

#pragma once

#include <vector>

namespace newsflow {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
// Accurate to ~1e-12 relative on the tested domain.
double reg_incomplete_beta(double a, double b, double x);

// Upper tail P(F > f) of the F(d1, d2) distribution.
double f_tail_prob(double f, int d1, int d2);

struct OlsFit {
    std::vector<double> coef;
    double rss = 0.0;
    int n = 0;
    int k = 0;  // number of regressors (columns)
};

// Least squares of y on the columns of X (row-major, n x k) via
// column-pivoted Householder QR. Throws SingularRegressionError when the
// design is rank deficient or the condition number exceeds ~1e12.
OlsFit ols_qr(const std::vector<double>& X, const std::vector<double>& y, int n, int k);

// Average ranks (ties share the mean rank), 1-based.
std::vector<double> average_ranks(const std::vector<double>& v);

double pearson(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& v);
double variance(const std::vector<double>& v);  // population variance

}  // namespace newsflow

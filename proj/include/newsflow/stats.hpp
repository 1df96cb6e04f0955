#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "newsflow/calendar.hpp"
#include "newsflow/series.hpp"

namespace newsflow {

struct CorrelationResult {
    std::string pair;  // e.g., "WS~R"
    double rho = 0.0;
    double p_value = 1.0;
    int n = 0;
};

struct GrangerResult {
    std::string direction;  // e.g., "WS->R"
    int lag = 1;
    double f_stat = 0.0;
    double p_value = 1.0;
    int n_effective = 0;
};

// Spearman rank correlation: average ranks, then the Pearson formula on the
// rank series.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

// Two-sided permutation p-value: (1 + #{|rho_perm| >= |rho_obs|}) / (n_perm + 1),
// permuting y. Deterministic for a given seed.
double spearman_pvalue(const std::vector<double>& x, const std::vector<double>& y, int n_perm,
                       std::uint64_t seed, double* rho_out = nullptr);

// Asymptotic alternative kept behind the battery's use_permutation flag:
// t = rho sqrt((n-2)/(1-rho^2)) against Student t, via the F tail.
double spearman_pvalue_asymptotic(const std::vector<double>& x, const std::vector<double>& y,
                                  double* rho_out = nullptr);

// Tests "x Granger-causes y": restricted OLS of y on its own lags,
// unrestricted adds lags of x, upper-tail F on the RSS drop.
GrangerResult granger(const std::vector<double>& x, const std::vector<double>& y, int lag);

// Lag minimizing the BIC of the unrestricted model on a common sample;
// ties break to the smallest lag.
int select_lag(const std::vector<double>& x, const std::vector<double>& y, int max_lag);

// flag_i = (p_i < level / n_tests), the Bonferroni rule.
std::vector<bool> bonferroni(const std::vector<double>& p_values, double level, int n_tests);

struct CompanyTests {
    std::string company;
    std::vector<CorrelationResult> correlations;
    std::vector<GrangerResult> grangers;
    std::string error;  // nonempty when this company could not be tested
};

struct TestReport {
    std::string scale_label;
    double level = 0.05;
    int n_perm = 1000;
    int max_lag = 5;
    int fixed_lag = 0;  // 0 = BIC-selected
    std::uint64_t seed = 0;
    std::vector<std::string> pair_labels;
    std::vector<std::string> direction_labels;
    std::vector<CompanyTests> companies;

    // Rejection flags per family (pair or direction) across companies, in
    // company order; n_tests for the Bonferroni threshold is the number of
    // valid results in the family.
    std::vector<std::vector<bool>> corr_raw_reject, corr_bonf_reject;
    std::vector<std::vector<bool>> granger_raw_reject, granger_bonf_reject;
};

struct BatteryOptions {
    double level = 0.05;
    int n_perm = 1000;
    int max_lag = 5;
    int fixed_lag = 0;  // 0 = select by BIC
    std::uint64_t seed = 0;
    bool use_permutation = true;  // false = asymptotic t approximation
};

// Per company: 3 correlation pairs (C,V), (C,sigma), (WS,R) and 8 Granger
// directions S->R, R->S, R->WS, WS->R, V->C, C->V, C->sigma, sigma->C.
// Per-company failures are recorded, not fatal. Results are independent of
// worker scheduling.
TestReport run_test_battery(const std::vector<CompanyPanel>& panels, const TimeScale& scale,
                            const BatteryOptions& options);

// Serialized outputs: full JSON plus the two plot-ready CSV matrices.
std::string report_to_json(const TestReport& report);
std::string report_rho_csv(const TestReport& report);
std::string report_rejection_csv(const TestReport& report);

struct FamilySummary {
    std::string label;
    int n_valid = 0;
    int raw_rejections = 0;
    int bonf_rejections = 0;
};

struct BatterySummary {
    std::string scale_label;
    std::vector<FamilySummary> correlations;
    std::vector<FamilySummary> grangers;
};

BatterySummary summarize(const TestReport& report);

}  // namespace newsflow

#include "newsflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "newsflow/errors.hpp"
#include "newsflow/mathkit.hpp"
#include "newsflow/util.hpp"

namespace newsflow {

namespace {

void check_pair(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DataError("series length mismatch");
    if (x.size() < 3) throw InsufficientDataError("spearman needs n >= 3");
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    check_pair(x, y);
    return pearson(average_ranks(x), average_ranks(y));
}

double spearman_pvalue(const std::vector<double>& x, const std::vector<double>& y, int n_perm,
                       std::uint64_t seed, double* rho_out) {
    check_pair(x, y);
    if (n_perm < 1) throw DataError("need at least one permutation");
    const std::vector<double> rx = average_ranks(x);
    std::vector<double> ry = average_ranks(y);
    const double rho_obs = pearson(rx, ry);
    if (rho_out) *rho_out = rho_obs;

    // Permuting y permutes its rank vector, so ranks are computed once and
    // only the cross moment changes per permutation.
    const std::size_t n = rx.size();
    const double mx = mean(rx), my = mean(ry);
    double sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    const double denom = std::sqrt(sxx * syy);

    Rng rng(seed);
    const double threshold = std::fabs(rho_obs);
    int hits = 0;
    for (int p = 0; p < n_perm; ++p) {
        rng.shuffle(ry);
        double sxy = 0.0;
        for (std::size_t i = 0; i < n; ++i) sxy += (rx[i] - mx) * (ry[i] - my);
        if (std::fabs(sxy / denom) >= threshold) ++hits;
    }
    return static_cast<double>(hits + 1) / static_cast<double>(n_perm + 1);
}

double spearman_pvalue_asymptotic(const std::vector<double>& x, const std::vector<double>& y,
                                  double* rho_out) {
    const double rho = spearman(x, y);
    if (rho_out) *rho_out = rho;
    const int n = static_cast<int>(x.size());
    if (std::fabs(rho) >= 1.0) return 0.0;
    const double t2 = rho * rho * (n - 2) / (1.0 - rho * rho);
    return f_tail_prob(t2, 1, n - 2);  // t^2 ~ F(1, n-2) under the null
}

namespace {

// Builds the lagged design rows t = first_row..n-1 for y on [intercept,
// y lags, optionally x lags].
struct LaggedDesign {
    std::vector<double> X;
    std::vector<double> y;
    int rows = 0;
    int cols = 0;
};

LaggedDesign lagged_design(const std::vector<double>& x, const std::vector<double>& y, int lag,
                           bool include_x, int first_row) {
    const int n = static_cast<int>(y.size());
    LaggedDesign d;
    d.rows = n - first_row;
    d.cols = 1 + lag + (include_x ? lag : 0);
    d.X.reserve(static_cast<std::size_t>(d.rows) * d.cols);
    d.y.reserve(d.rows);
    for (int t = first_row; t < n; ++t) {
        d.X.push_back(1.0);
        for (int j = 1; j <= lag; ++j) d.X.push_back(y[t - j]);
        if (include_x) {
            for (int j = 1; j <= lag; ++j) d.X.push_back(x[t - j]);
        }
        d.y.push_back(y[t]);
    }
    return d;
}

}  // namespace

GrangerResult granger(const std::vector<double>& x, const std::vector<double>& y, int lag) {
    if (x.size() != y.size()) throw DataError("series length mismatch");
    if (lag < 1) throw DataError("granger lag must be >= 1");
    const int n = static_cast<int>(y.size());
    if (n <= 3 * lag + 5) {
        throw InsufficientDataError("granger needs n > 3*lag + 5");
    }
    for (double v : x) {
        if (!std::isfinite(v)) throw DataError("non-finite value in x");
    }
    for (double v : y) {
        if (!std::isfinite(v)) throw DataError("non-finite value in y");
    }

    const auto restricted = lagged_design(x, y, lag, /*include_x=*/false, lag);
    const auto unrestricted = lagged_design(x, y, lag, /*include_x=*/true, lag);
    const auto fit_r = ols_qr(restricted.X, restricted.y, restricted.rows, restricted.cols);
    const auto fit_u = ols_qr(unrestricted.X, unrestricted.y, unrestricted.rows, unrestricted.cols);

    const int n_eff = restricted.rows;
    const int df2 = n_eff - 2 * lag - 1;
    const double rss_drop = std::max(fit_r.rss - fit_u.rss, 0.0);

    GrangerResult result;
    result.lag = lag;
    result.n_effective = n_eff;
    if (fit_u.rss <= 0.0) {
        // Perfect unrestricted fit: any drop is maximal evidence.
        result.f_stat = std::numeric_limits<double>::infinity();
        result.p_value = 0.0;
        return result;
    }
    result.f_stat = (rss_drop / lag) / (fit_u.rss / df2);
    result.p_value = f_tail_prob(result.f_stat, lag, df2);
    return result;
}

int select_lag(const std::vector<double>& x, const std::vector<double>& y, int max_lag) {
    if (max_lag < 1) throw DataError("max_lag must be >= 1");
    const int n = static_cast<int>(y.size());
    if (n <= 3 * max_lag + 5) {
        throw InsufficientDataError("select_lag needs n > 3*max_lag + 5");
    }
    // All candidates share the same estimation rows so their BICs compare.
    int best_lag = 0;
    double best_bic = std::numeric_limits<double>::infinity();
    std::string last_error;
    for (int lag = 1; lag <= max_lag; ++lag) {
        const auto design = lagged_design(x, y, lag, /*include_x=*/true, max_lag);
        double bic;
        try {
            const auto fit = ols_qr(design.X, design.y, design.rows, design.cols);
            const double m = static_cast<double>(design.rows);
            bic = m * std::log(std::max(fit.rss / m, 1e-300)) +
                  (2.0 * lag + 1.0) * std::log(m);
        } catch (const SingularRegressionError& e) {
            last_error = e.what();
            continue;
        }
        if (bic < best_bic) {
            best_bic = bic;
            best_lag = lag;
        }
    }
    if (best_lag == 0) throw SingularRegressionError("all candidate lags singular: " + last_error);
    return best_lag;
}

std::vector<bool> bonferroni(const std::vector<double>& p_values, double level, int n_tests) {
    if (!(level > 0.0 && level < 1.0)) throw DataError("level must be in (0,1)");
    if (n_tests < 1) throw DataError("n_tests must be >= 1");
    const double threshold = level / n_tests;
    std::vector<bool> flags(p_values.size());
    for (std::size_t i = 0; i < p_values.size(); ++i) flags[i] = p_values[i] < threshold;
    return flags;
}

namespace {

const std::vector<std::string> kPairLabels = {"C~V", "C~sigma", "WS~R"};
const std::vector<std::string> kDirectionLabels = {"S->R",  "R->S",  "R->WS",    "WS->R",
                                                   "V->C",  "C->V",  "C->sigma", "sigma->C"};

const std::vector<double>& series_by_name(const CompanyPanel& panel, const std::string& name) {
    if (name == "V") return panel.V;
    if (name == "R") return panel.R;
    if (name == "sigma") return panel.sigma;
    if (name == "C") return panel.C;
    if (name == "S") return panel.S;
    return panel.WS;
}

}  // namespace

TestReport run_test_battery(const std::vector<CompanyPanel>& panels, const TimeScale& scale,
                            const BatteryOptions& options) {
    TestReport report;
    report.scale_label = scale.label();
    report.level = options.level;
    report.n_perm = options.n_perm;
    report.max_lag = options.max_lag;
    report.fixed_lag = options.fixed_lag;
    report.seed = options.seed;
    report.pair_labels = kPairLabels;
    report.direction_labels = kDirectionLabels;
    report.companies.resize(panels.size());

    const std::vector<std::pair<std::string, std::string>> pairs = {
        {"C", "V"}, {"C", "sigma"}, {"WS", "R"}};
    const std::vector<std::pair<std::string, std::string>> directions = {
        {"S", "R"}, {"R", "S"}, {"R", "WS"}, {"WS", "R"},
        {"V", "C"}, {"C", "V"}, {"C", "sigma"}, {"sigma", "C"}};

    parallel_for(panels.size(), [&](std::size_t i) {
        const CompanyPanel& panel = panels[i];
        CompanyTests tests;
        tests.company = panel.company;
        try {
            for (std::size_t p = 0; p < pairs.size(); ++p) {
                const auto& a = series_by_name(panel, pairs[p].first);
                const auto& b = series_by_name(panel, pairs[p].second);
                CorrelationResult r;
                r.pair = kPairLabels[p];
                r.n = static_cast<int>(a.size());
                if (options.use_permutation) {
                    const std::uint64_t seed = derive_seed(options.seed, 0x5045524dULL + p, i);
                    r.p_value = spearman_pvalue(a, b, options.n_perm, seed, &r.rho);
                } else {
                    r.p_value = spearman_pvalue_asymptotic(a, b, &r.rho);
                }
                tests.correlations.push_back(r);
            }
            for (std::size_t d = 0; d < directions.size(); ++d) {
                const auto& cause = series_by_name(panel, directions[d].first);
                const auto& effect = series_by_name(panel, directions[d].second);
                const int lag = options.fixed_lag > 0
                                    ? options.fixed_lag
                                    : select_lag(cause, effect, options.max_lag);
                GrangerResult g = granger(cause, effect, lag);
                g.direction = kDirectionLabels[d];
                tests.grangers.push_back(g);
            }
        } catch (const std::exception& e) {
            tests.error = e.what();
            tests.correlations.clear();
            tests.grangers.clear();
        }
        report.companies[i] = std::move(tests);
    });

    // Rejection flags per family; the Bonferroni denominator is the number
    // of valid tests in the family.
    auto flag_family = [&](auto getter, std::size_t family_count,
                           std::vector<std::vector<bool>>& raw,
                           std::vector<std::vector<bool>>& bonf) {
        raw.assign(family_count, std::vector<bool>(report.companies.size(), false));
        bonf.assign(family_count, std::vector<bool>(report.companies.size(), false));
        for (std::size_t f = 0; f < family_count; ++f) {
            int n_valid = 0;
            for (const auto& c : report.companies) {
                if (c.error.empty()) ++n_valid;
            }
            if (n_valid == 0) continue;
            const double bonf_threshold = options.level / n_valid;
            for (std::size_t i = 0; i < report.companies.size(); ++i) {
                const auto& c = report.companies[i];
                if (!c.error.empty()) continue;
                const double p = getter(c, f);
                raw[f][i] = p < options.level;
                bonf[f][i] = p < bonf_threshold;
            }
        }
    };
    flag_family([](const CompanyTests& c, std::size_t f) { return c.correlations[f].p_value; },
                kPairLabels.size(), report.corr_raw_reject, report.corr_bonf_reject);
    flag_family([](const CompanyTests& c, std::size_t f) { return c.grangers[f].p_value; },
                kDirectionLabels.size(), report.granger_raw_reject, report.granger_bonf_reject);
    return report;
}

std::string report_to_json(const TestReport& report) {
    nlohmann::json j;
    j["scale"] = report.scale_label;
    j["level"] = report.level;
    j["n_perm"] = report.n_perm;
    j["max_lag"] = report.max_lag;
    j["fixed_lag"] = report.fixed_lag;
    j["seed"] = report.seed;
    j["pairs"] = report.pair_labels;
    j["directions"] = report.direction_labels;
    auto& companies = j["companies"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.companies.size(); ++i) {
        const auto& c = report.companies[i];
        nlohmann::json jc;
        jc["company"] = c.company;
        if (!c.error.empty()) {
            jc["error"] = c.error;
            companies.push_back(std::move(jc));
            continue;
        }
        auto& corr = jc["correlations"] = nlohmann::json::array();
        for (std::size_t f = 0; f < c.correlations.size(); ++f) {
            const auto& r = c.correlations[f];
            corr.push_back({{"pair", r.pair},
                            {"rho", r.rho},
                            {"p_value", r.p_value},
                            {"n", r.n},
                            {"reject", static_cast<bool>(report.corr_raw_reject[f][i])},
                            {"reject_bonferroni",
                             static_cast<bool>(report.corr_bonf_reject[f][i])}});
        }
        auto& gr = jc["granger"] = nlohmann::json::array();
        for (std::size_t f = 0; f < c.grangers.size(); ++f) {
            const auto& g = c.grangers[f];
            gr.push_back({{"direction", g.direction},
                          {"lag", g.lag},
                          {"f_stat", g.f_stat},
                          {"p_value", g.p_value},
                          {"n_effective", g.n_effective},
                          {"reject", static_cast<bool>(report.granger_raw_reject[f][i])},
                          {"reject_bonferroni",
                           static_cast<bool>(report.granger_bonf_reject[f][i])}});
        }
        companies.push_back(std::move(jc));
    }
    return j.dump(2) + "\n";
}

std::string report_rho_csv(const TestReport& report) {
    std::ostringstream out;
    out << "company";
    for (const auto& label : report.pair_labels) out << ',' << label;
    out << '\n';
    for (const auto& c : report.companies) {
        out << c.company;
        for (std::size_t f = 0; f < report.pair_labels.size(); ++f) {
            out << ',';
            if (c.error.empty()) out << format_double(c.correlations[f].rho);
        }
        out << '\n';
    }
    return out.str();
}

std::string report_rejection_csv(const TestReport& report) {
    std::ostringstream out;
    out << "company";
    for (const auto& label : report.direction_labels) out << ',' << label;
    out << '\n';
    for (std::size_t i = 0; i < report.companies.size(); ++i) {
        const auto& c = report.companies[i];
        out << c.company;
        for (std::size_t f = 0; f < report.direction_labels.size(); ++f) {
            out << ',';
            if (c.error.empty()) out << (report.granger_raw_reject[f][i] ? '1' : '0');
        }
        out << '\n';
    }
    return out.str();
}

BatterySummary summarize(const TestReport& report) {
    BatterySummary summary;
    summary.scale_label = report.scale_label;
    auto family_counts = [&](const std::string& label, const std::vector<bool>& raw,
                             const std::vector<bool>& bonf) {
        FamilySummary fs;
        fs.label = label;
        for (std::size_t i = 0; i < report.companies.size(); ++i) {
            if (!report.companies[i].error.empty()) continue;
            ++fs.n_valid;
            if (raw[i]) ++fs.raw_rejections;
            if (bonf[i]) ++fs.bonf_rejections;
        }
        return fs;
    };
    for (std::size_t f = 0; f < report.pair_labels.size(); ++f) {
        summary.correlations.push_back(family_counts(
            report.pair_labels[f], report.corr_raw_reject[f], report.corr_bonf_reject[f]));
    }
    for (std::size_t f = 0; f < report.direction_labels.size(); ++f) {
        summary.grangers.push_back(family_counts(
            report.direction_labels[f], report.granger_raw_reject[f], report.granger_bonf_reject[f]));
    }
    return summary;
}

}  // namespace newsflow

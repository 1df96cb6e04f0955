#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "newsflow/calendar.hpp"

namespace newsflow {

// Generator configuration. Defaults give a quiet null cohort; the planted
// coupling routes the lagged click-weighted sentiment signal into returns at
// minute scale so detection exercises the full aggregation path.
struct SynthConfig {
    int n_companies = 10;
    int n_days = 20;
    std::uint64_t seed = 1;

    double click_alpha = 1.0;
    std::int64_t click_xmin = 50;
    std::vector<double> intraday_pattern;  // 390 positive values; default U-shape

    double causal_fraction = 0.0;
    double causal_strength = 0.0;
    int causal_lag = 1;             // in bins of target_scale_minutes
    int target_scale_minutes = 65;  // scale the coupling is aimed at

    // Noise scales.
    double return_sigma = 2e-4;   // per-minute log10 return sd
    double volume_sigma = 0.35;   // lognormal minute noise on volume
    double volume_base = 1e4;
    double day_factor_sigma = 0.0;  // per-day lognormal factor, per series

    double articles_per_day = 3.0;  // wall-clock publication rate
    double p_positive = 0.4;
    double p_negative = 0.4;
    double attention_tau_min = 30.0;   // minutes
    double attention_tau_max = 120.0;

    CivilDate start_date{2012, 6, 4};  // a Monday

    void validate() const;
    std::vector<double> pattern_or_default() const;
};

struct ArticleTruth {
    std::string article_id;
    std::string company;
    int sign = 0;
    std::int64_t total_clicks = 0;  // drawn power-law total
    double tau = 0.0;               // planted attention time scale
    std::int64_t publish_epoch_minute = 0;
};

struct CompanyTruth {
    std::string ticker;
    bool causal = false;
    double signal_sd = 0.0;  // sd of the planted minute signal before standardization
};

struct GroundTruth {
    SynthConfig config;
    std::vector<CivilDate> trading_days;
    std::vector<CompanyTruth> companies;
    std::vector<ArticleTruth> articles;

    std::string to_json() const;
    static GroundTruth from_json_file(const std::string& path);
};

struct SynthPaths {
    std::string market_csv;
    std::string clicks_csv;
    std::string news_jsonl;
    std::string trading_days_txt;
    std::string alias_csv;
    std::string ground_truth_json;
};

// Writes market.csv, clicks.csv, news.jsonl, trading_days.txt, aliases.csv
// and ground_truth.json under out_dir. Byte-identical for a given config.
GroundTruth generate(const SynthConfig& config, const std::string& out_dir,
                     SynthPaths* paths_out = nullptr);

SynthPaths synth_paths(const std::string& out_dir);

}  // namespace newsflow

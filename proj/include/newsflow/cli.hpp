#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "newsflow/calendar.hpp"
#include "newsflow/ingest.hpp"
#include "newsflow/stats.hpp"
#include "newsflow/synth.hpp"

namespace newsflow {

// Run configuration shared by the subcommands; populated from the config
// file and flag overrides (flags win).
struct RunConfig {
    // Inputs.
    std::string market_csv;
    std::string clicks_csv;
    std::string news_jsonl;
    std::string alias_csv;
    std::string trading_days;
    std::string lexicon_general;
    std::string lexicon_financial;
    std::string ground_truth;  // for validate

    std::vector<std::string> scales = {"65"};
    double level = 0.05;
    int permutations = 1000;
    int max_lag = 5;
    int fixed_lag = 0;  // 0 = BIC selection
    std::uint64_t seed = 42;
    std::string out_dir = "out";

    // Tail estimation.
    int bootstrap_replicates = 200;
    int n_tail_min = 50;

    // Attention.
    int attention_horizon = 300;

    // Validation thresholds.
    double power_threshold = 0.8;
    double false_positive_threshold = 0.10;

    std::string cache_dir() const { return out_dir + "/cache"; }
};

// Cached normalized dataset plus per-article sentiment signs.
struct CachedData {
    TradingCalendar cal;
    Dataset dataset;
    std::vector<int> signs;  // parallel to dataset.articles
};

// Parses the three raw inputs, applies the tagging filter, scores titles
// with the merged lexicon, and writes the normalized cache under
// out/cache/.
IngestSummary cmd_ingest(const RunConfig& config);

CachedData load_cache(const RunConfig& config);

// Builds panels for every (company, scale), runs the statistical battery,
// fits click tails and attention curves, and writes all reports plus a
// manifest with content digests. Returns the manifest path.
std::string cmd_analyze(const RunConfig& config);

// Compares battery detections against ground_truth.json. Returns true when
// the run passes calibration (null cohorts) or power thresholds (planted
// cohorts); prints a summary either way.
bool cmd_validate(const RunConfig& config);

// Standalone emitters for the tail table and the attention curves.
void cmd_tails(const RunConfig& config);
void cmd_attention(const RunConfig& config);

// Clicks-per-news totals per company over the whole dataset (all clicks of
// each article, wall-clock).
std::vector<std::pair<std::string, std::vector<std::int64_t>>> clicks_per_news(
    const CachedData& data);

}  // namespace newsflow

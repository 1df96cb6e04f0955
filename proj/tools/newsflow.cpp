// newsflow: batch analytics over market, click and news-sentiment series.
//
// Subcommands: synth, ingest, analyze, validate, tails, attention.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "newsflow/cli.hpp"
#include "newsflow/synth.hpp"

namespace {

struct SynthFlags {
    int companies = 10;
    int days = 20;
    double causal_fraction = 0.0;
    double causal_strength = 0.0;
    int causal_lag = 1;
    int target_scale = 65;
    double click_alpha = 1.0;
    long long click_xmin = 50;
    double articles_per_day = 3.0;
    double tau_min = 30.0;
    double tau_max = 120.0;
    double return_sigma = 2e-4;
    double day_factor_sigma = 0.0;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"news-attention market analytics"};
    app.set_config("--config", "", "key = value configuration file; flags override it");
    app.fallthrough();
    app.require_subcommand(1);

    newsflow::RunConfig config;
    SynthFlags synth;

    app.add_option("--market", config.market_csv, "market bars CSV");
    app.add_option("--clicks", config.clicks_csv, "click log CSV");
    app.add_option("--news", config.news_jsonl, "news metadata JSONL");
    app.add_option("--aliases", config.alias_csv, "ticker alias CSV");
    app.add_option("--trading-days", config.trading_days, "trading-day list file");
    app.add_option("--lexicon-general", config.lexicon_general, "general lexicon CSV");
    app.add_option("--lexicon-financial", config.lexicon_financial, "financial lexicon CSV");
    app.add_option("--ground-truth", config.ground_truth, "ground truth JSON (validate)");
    app.add_option("--scale", config.scales, "time scales: 1 10 30 65 130 daily");
    app.add_option("--level", config.level, "test significance level");
    app.add_option("--perms", config.permutations, "permutations for the correlation test");
    app.add_option("--max-lag", config.max_lag, "maximum Granger lag for BIC selection");
    app.add_option("--fixed-lag", config.fixed_lag, "fixed Granger lag (skips BIC)");
    app.add_option("--seed", config.seed, "master seed");
    app.add_option("--out", config.out_dir, "output directory");
    app.add_option("--bootstrap", config.bootstrap_replicates, "tail bootstrap replicates");
    app.add_option("--tail-min", config.n_tail_min, "minimum tail size for x_min candidates");
    app.add_option("--attention-horizon", config.attention_horizon, "attention horizon, minutes");
    app.add_option("--power-threshold", config.power_threshold, "validate: required power");
    app.add_option("--fp-threshold", config.false_positive_threshold,
                   "validate: allowed false-positive rate");

    auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
    synth_cmd->add_option("--companies", synth.companies, "number of companies");
    synth_cmd->add_option("--days", synth.days, "number of trading days");
    synth_cmd->add_option("--causal-fraction", synth.causal_fraction, "planted causal share");
    synth_cmd->add_option("--strength", synth.causal_strength, "coupling strength");
    synth_cmd->add_option("--causal-lag", synth.causal_lag, "coupling lag in target-scale bins");
    synth_cmd->add_option("--target-scale", synth.target_scale, "scale the coupling aims at");
    synth_cmd->add_option("--click-alpha", synth.click_alpha, "clicks-per-news tail exponent");
    synth_cmd->add_option("--click-xmin", synth.click_xmin, "clicks-per-news lower cutoff");
    synth_cmd->add_option("--articles-per-day", synth.articles_per_day, "publication rate");
    synth_cmd->add_option("--tau-min", synth.tau_min, "attention tau lower bound, minutes");
    synth_cmd->add_option("--tau-max", synth.tau_max, "attention tau upper bound, minutes");
    synth_cmd->add_option("--return-sigma", synth.return_sigma, "minute return noise");
    synth_cmd->add_option("--day-factor-sigma", synth.day_factor_sigma, "per-day activity noise");

    auto* ingest_cmd = app.add_subcommand("ingest", "parse inputs into the normalized cache");
    auto* analyze_cmd = app.add_subcommand("analyze", "build panels and run every report");
    auto* validate_cmd = app.add_subcommand("validate", "compare detections with ground truth");
    auto* tails_cmd = app.add_subcommand("tails", "fit clicks-per-news tail exponents");
    auto* attention_cmd = app.add_subcommand("attention", "attention decile curves and tau fits");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            newsflow::SynthConfig sc;
            sc.n_companies = synth.companies;
            sc.n_days = synth.days;
            sc.seed = config.seed;
            sc.causal_fraction = synth.causal_fraction;
            sc.causal_strength = synth.causal_strength;
            sc.causal_lag = synth.causal_lag;
            sc.target_scale_minutes = synth.target_scale;
            sc.click_alpha = synth.click_alpha;
            sc.click_xmin = synth.click_xmin;
            sc.articles_per_day = synth.articles_per_day;
            sc.attention_tau_min = synth.tau_min;
            sc.attention_tau_max = synth.tau_max;
            sc.return_sigma = synth.return_sigma;
            sc.day_factor_sigma = synth.day_factor_sigma;
            newsflow::SynthPaths paths;
            newsflow::generate(sc, config.out_dir, &paths);
            std::printf("synth: wrote %s\n", config.out_dir.c_str());
        } else if (ingest_cmd->parsed()) {
            const auto summary = newsflow::cmd_ingest(config);
            std::printf("ingest: %zu bars, %zu articles kept (%zu rejected), %zu click rows\n",
                        summary.market_rows, summary.articles_kept,
                        summary.articles_rejected_too_many_tags +
                            summary.articles_rejected_no_tag_match,
                        summary.click_rows);
        } else if (analyze_cmd->parsed()) {
            const std::string manifest = newsflow::cmd_analyze(config);
            std::printf("analyze: wrote %s\n", manifest.c_str());
        } else if (validate_cmd->parsed()) {
            if (!newsflow::cmd_validate(config)) return 2;
        } else if (tails_cmd->parsed()) {
            newsflow::cmd_tails(config);
            std::printf("tails: wrote %s/reports/tails.csv\n", config.out_dir.c_str());
        } else if (attention_cmd->parsed()) {
            newsflow::cmd_attention(config);
            std::printf("attention: wrote %s/reports\n", config.out_dir.c_str());
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

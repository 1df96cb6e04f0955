#include <doctest.h>

#include <filesystem>

#include <json.hpp>

#include "newsflow/cli.hpp"
#include "newsflow/errors.hpp"
#include "newsflow/synth.hpp"
#include "newsflow/util.hpp"

using namespace newsflow;

namespace {

struct TempDir {
    std::string path;
    explicit TempDir(const std::string& name) : path("test_tmp_" + name) {
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

RunConfig config_for(const std::string& synth_dir, const std::string& out_dir) {
    RunConfig config;
    config.market_csv = synth_dir + "/market.csv";
    config.clicks_csv = synth_dir + "/clicks.csv";
    config.news_jsonl = synth_dir + "/news.jsonl";
    config.alias_csv = synth_dir + "/aliases.csv";
    config.trading_days = synth_dir + "/trading_days.txt";
    config.ground_truth = synth_dir + "/ground_truth.json";
    config.lexicon_general = std::string(NEWSFLOW_DATA_DIR) + "/lexicon_general.csv";
    config.lexicon_financial = std::string(NEWSFLOW_DATA_DIR) + "/lexicon_financial.csv";
    config.out_dir = out_dir;
    config.scales = {"65"};
    config.permutations = 99;
    config.bootstrap_replicates = 5;
    config.seed = 5;
    return config;
}

SynthConfig pipeline_synth_config() {
    SynthConfig sc;
    sc.n_companies = 3;
    sc.n_days = 10;
    sc.seed = 21;
    sc.click_xmin = 10;
    sc.articles_per_day = 6.0;
    sc.attention_tau_min = 20.0;
    sc.attention_tau_max = 60.0;
    return sc;
}

}  // namespace

TEST_CASE("ingest builds a cache that loads back") {
    TempDir synth_dir("cli_synth"), out_dir("cli_out");
    generate(pipeline_synth_config(), synth_dir.path);
    RunConfig config = config_for(synth_dir.path, out_dir.path);

    const auto summary = cmd_ingest(config);
    CHECK(summary.market_rows == 3u * 10u * kSessionMinutes);
    CHECK(summary.articles_kept > 0);

    const auto cache = load_cache(config);
    CHECK(cache.dataset.companies.size() == 3);
    CHECK(cache.signs.size() == cache.dataset.articles.size());
    CHECK(cache.cal.day_count() == 10);

    // Re-running ingest on unchanged inputs rewrites an identical cache.
    const std::string before = read_file(config.cache_dir() + "/market.csv");
    const std::string before_summary = read_file(config.cache_dir() + "/summary.json");
    cmd_ingest(config);
    CHECK(read_file(config.cache_dir() + "/market.csv") == before);
    CHECK(read_file(config.cache_dir() + "/summary.json") == before_summary);
}

TEST_CASE("ingest errors name the offending input") {
    TempDir synth_dir("cli_badin"), out_dir("cli_badout");
    generate(pipeline_synth_config(), synth_dir.path);
    RunConfig config = config_for(synth_dir.path, out_dir.path);
    // Truncate the market file mid-row.
    auto market = read_file(config.market_csv);
    market.resize(market.size() / 2);
    while (!market.empty() && market.back() != '\n') market.pop_back();
    market += "S000,2012-06-99T09:30:00-04:00\n";
    write_file(synth_dir.path + "/market_bad.csv", market);
    config.market_csv = synth_dir.path + "/market_bad.csv";
    CHECK_THROWS_WITH_AS(cmd_ingest(config), doctest::Contains("market_bad.csv"), DataError);
}

TEST_CASE("analyze emits reports, panels and a digest manifest") {
    TempDir synth_dir("cli_an_synth"), out_dir("cli_an_out");
    generate(pipeline_synth_config(), synth_dir.path);
    RunConfig config = config_for(synth_dir.path, out_dir.path);
    config.scales = {"65", "daily"};
    cmd_ingest(config);
    const std::string manifest_path = cmd_analyze(config);

    const auto manifest = nlohmann::json::parse(read_file(manifest_path));
    REQUIRE(manifest.contains("outputs"));
    const auto& outputs = manifest["outputs"];
    CHECK(outputs.contains("reports/battery_65.json"));
    CHECK(outputs.contains("reports/battery_daily.json"));
    CHECK(outputs.contains("reports/rho_65.csv"));
    CHECK(outputs.contains("reports/granger_rejections_65.csv"));
    CHECK(outputs.contains("reports/summary_correlation.csv"));
    CHECK(outputs.contains("reports/summary_granger.csv"));
    CHECK(outputs.contains("reports/tails.csv"));
    CHECK(outputs.contains("panels/S000_65.csv"));
    CHECK(outputs.contains("profiles/S000.json"));

    // Digests in the manifest match the files on disk.
    for (const auto& [rel, digest] : outputs.items()) {
        CHECK(file_digest(out_dir.path + "/" + rel) == digest.get<std::string>());
    }

    // The summary table has one row per scale.
    const auto summary = read_file(out_dir.path + "/reports/summary_correlation.csv");
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);  // header + 2 scales
}

TEST_CASE("analyze reruns are byte-identical regardless of worker count") {
    TempDir synth_dir("cli_det_synth"), out_a("cli_det_a"), out_b("cli_det_b");
    generate(pipeline_synth_config(), synth_dir.path);

    RunConfig ca = config_for(synth_dir.path, out_a.path);
    RunConfig cb = config_for(synth_dir.path, out_b.path);
    setenv("NEWSFLOW_WORKERS", "1", 1);
    cmd_ingest(ca);
    cmd_analyze(ca);
    setenv("NEWSFLOW_WORKERS", "5", 1);
    cmd_ingest(cb);
    cmd_analyze(cb);
    unsetenv("NEWSFLOW_WORKERS");

    const auto manifest_a = nlohmann::json::parse(read_file(out_a.path + "/manifest.json"));
    const auto manifest_b = nlohmann::json::parse(read_file(out_b.path + "/manifest.json"));
    CHECK(manifest_a["outputs"] == manifest_b["outputs"]);
    for (const auto& [rel, digest] : manifest_a["outputs"].items()) {
        CHECK(read_file(out_a.path + "/" + rel) == read_file(out_b.path + "/" + rel));
    }
}

TEST_CASE("validate passes a quiet null cohort and fails a mismatched truth") {
    TempDir synth_dir("cli_val_synth"), out_dir("cli_val_out");
    SynthConfig sc = pipeline_synth_config();
    sc.n_companies = 12;  // enough companies for a meaningful band
    generate(sc, synth_dir.path);
    RunConfig config = config_for(synth_dir.path, out_dir.path);
    cmd_ingest(config);
    cmd_analyze(config);
    // A 12-company null cohort has a wide band; the check is that the
    // plumbing runs end to end and reports a verdict.
    cmd_validate(config);

    // Ground truth naming unknown companies is an explicit error.
    TempDir other_dir("cli_val_other");
    SynthConfig other = pipeline_synth_config();
    other.seed = 99;
    other.n_companies = 2;
    generate(other, other_dir.path);
    config.ground_truth = other_dir.path + "/ground_truth.json";
    CHECK_THROWS_AS(cmd_validate(config), DataError);
}

TEST_CASE("standalone tails and attention commands write their reports") {
    TempDir synth_dir("cli_ta_synth"), out_dir("cli_ta_out");
    SynthConfig sc = pipeline_synth_config();
    sc.articles_per_day = 12.0;
    generate(sc, synth_dir.path);
    RunConfig config = config_for(synth_dir.path, out_dir.path);
    cmd_ingest(config);
    cmd_tails(config);
    cmd_attention(config);
    const auto tails = read_file(out_dir.path + "/reports/tails.csv");
    CHECK(tails.rfind("ticker,alpha,se_alpha,x_min,se_x_min,ks,n_tail\n", 0) == 0);
    const auto fits = read_file(out_dir.path + "/reports/attention_fits.csv");
    CHECK(std::count(fits.begin(), fits.end(), '\n') == 11);  // header + 10 deciles
}

TEST_CASE("analyze without a cache is a clear error") {
    TempDir out_dir("cli_nocache");
    RunConfig config;
    config.out_dir = out_dir.path;
    CHECK_THROWS_WITH_AS(cmd_analyze(config), doctest::Contains("ingest"), DataError);
}

#include "newsflow/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "newsflow/attention.hpp"
#include "newsflow/errors.hpp"
#include "newsflow/sentiment.hpp"
#include "newsflow/series.hpp"
#include "newsflow/tails.hpp"
#include "newsflow/util.hpp"

namespace newsflow {

namespace {

Lexicon load_merged_lexicon(const RunConfig& config) {
    if (config.lexicon_general.empty() && config.lexicon_financial.empty()) {
        throw DataError("no lexicon configured");
    }
    if (config.lexicon_general.empty()) {
        return Lexicon::from_file(config.lexicon_financial, "financial");
    }
    if (config.lexicon_financial.empty()) {
        return Lexicon::from_file(config.lexicon_general, "general");
    }
    return merge_lexicons(Lexicon::from_file(config.lexicon_general, "general"),
                          Lexicon::from_file(config.lexicon_financial, "financial"));
}

std::string iso_from_epoch(EpochSeconds t) { return format_instant_eastern(t); }

}  // namespace

IngestSummary cmd_ingest(const RunConfig& config) {
    const TradingCalendar cal = TradingCalendar::from_file(config.trading_days);
    IngestPaths paths;
    paths.market_csv = config.market_csv;
    paths.clicks_csv = config.clicks_csv;
    paths.news_jsonl = config.news_jsonl;
    paths.alias_csv = config.alias_csv;
    Dataset ds = ingest_dataset(paths, cal);

    const Lexicon lexicon = load_merged_lexicon(config);

    const std::string cache = config.cache_dir();
    std::filesystem::create_directories(cache);

    {
        std::ostringstream out;
        out << "ticker,day_index,minute,last_price,volume\n";
        for (const auto& company : ds.companies) {
            for (const auto& bar : ds.market.at(company)) {
                out << bar.company << ',' << bar.day_index << ',' << bar.minute << ','
                    << format_double(bar.last_price) << ',' << format_double(bar.volume) << '\n';
            }
        }
        write_file(cache + "/market.csv", out.str());
    }
    {
        std::ostringstream out;
        out << "article_id,day_index,minute,clicks\n";
        for (const auto& row : ds.click_grid) {
            out << row.article_id << ',' << row.day_index << ',' << row.minute << ','
                << row.clicks << '\n';
        }
        write_file(cache + "/clicks_grid.csv", out.str());
    }
    {
        std::ostringstream out;
        out << "article_id,epoch_minute,clicks\n";
        for (const auto& ev : ds.click_events) {
            out << ev.article_id << ',' << ev.epoch_minute << ',' << ev.clicks << '\n';
        }
        write_file(cache + "/click_events.csv", out.str());
    }
    {
        std::ostringstream out;
        for (const auto& article : ds.articles) {
            nlohmann::json j;
            j["article_id"] = article.article_id;
            j["published"] = iso_from_epoch(article.publish_instant);
            j["title"] = article.title;
            if (article.first_paragraph) {
                j["first_paragraph"] = *article.first_paragraph;
            } else {
                j["first_paragraph"] = nullptr;
            }
            j["tickers"] = article.tagged_companies;
            j["sign"] = score_title(article.title, lexicon).sign;
            out << j.dump() << '\n';
        }
        write_file(cache + "/articles.jsonl", out.str());
    }
    {
        std::ostringstream out;
        for (const auto& d : cal.trading_days()) out << date_to_string(d) << '\n';
        write_file(cache + "/trading_days.txt", out.str());
    }
    {
        nlohmann::json j;
        j["market_rows"] = ds.summary.market_rows;
        j["market_dropped_out_of_session"] = ds.summary.market_dropped_out_of_session;
        j["click_rows"] = ds.summary.click_rows;
        j["click_rows_dropped_out_of_session"] = ds.summary.click_rows_dropped_out_of_session;
        j["click_rows_unknown_article"] = ds.summary.click_rows_unknown_article;
        j["articles_parsed"] = ds.summary.articles_parsed;
        j["articles_rejected_too_many_tags"] = ds.summary.articles_rejected_too_many_tags;
        j["articles_rejected_no_tag_match"] = ds.summary.articles_rejected_no_tag_match;
        j["articles_kept"] = ds.summary.articles_kept;
        j["lexicon_provenance"] = lexicon.provenance;
        j["inputs"] = {{"market", file_digest(config.market_csv)},
                       {"clicks", file_digest(config.clicks_csv)},
                       {"news", file_digest(config.news_jsonl)},
                       {"trading_days", file_digest(config.trading_days)}};
        write_file(cache + "/summary.json", j.dump(2) + "\n");
    }
    return ds.summary;
}

CachedData load_cache(const RunConfig& config) {
    const std::string cache = config.cache_dir();
    if (!std::filesystem::exists(cache + "/summary.json")) {
        throw DataError("cache not built; run the ingest command first (" + cache + ")");
    }
    TradingCalendar cal = TradingCalendar::from_file(cache + "/trading_days.txt");
    CachedData data{std::move(cal), {}, {}};

    {
        std::ifstream in(cache + "/market.csv");
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            MarketBar bar;
            char ticker[64];
            if (std::sscanf(line.c_str(), "%63[^,],%d,%d,%lf,%lf", ticker, &bar.day_index,
                            &bar.minute, &bar.last_price, &bar.volume) != 5) {
                throw DataError("bad cache row: " + line);
            }
            bar.company = ticker;
            data.dataset.market[bar.company].push_back(bar);
        }
        for (const auto& [company, _] : data.dataset.market) {
            data.dataset.companies.push_back(company);
        }
        std::sort(data.dataset.companies.begin(), data.dataset.companies.end());
    }
    {
        std::ifstream in(cache + "/clicks_grid.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ClickMinute row;
            char id[96];
            long long clicks = 0;
            if (std::sscanf(line.c_str(), "%95[^,],%d,%d,%lld", id, &row.day_index, &row.minute,
                            &clicks) != 4) {
                throw DataError("bad cache row: " + line);
            }
            row.article_id = id;
            row.clicks = clicks;
            data.dataset.click_grid.push_back(std::move(row));
        }
    }
    {
        std::ifstream in(cache + "/click_events.csv");
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ClickEvent ev;
            char id[96];
            long long minute = 0, clicks = 0;
            if (std::sscanf(line.c_str(), "%95[^,],%lld,%lld", id, &minute, &clicks) != 3) {
                throw DataError("bad cache row: " + line);
            }
            ev.article_id = id;
            ev.epoch_minute = minute;
            ev.clicks = clicks;
            data.dataset.click_events.push_back(std::move(ev));
        }
    }
    {
        std::ifstream in(cache + "/articles.jsonl");
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = nlohmann::json::parse(line);
            NewsArticle article;
            article.article_id = j.at("article_id").get<std::string>();
            article.publish_instant = parse_instant(j.at("published").get<std::string>());
            article.title = j.at("title").get<std::string>();
            if (!j.at("first_paragraph").is_null()) {
                article.first_paragraph = j["first_paragraph"].get<std::string>();
            }
            for (const auto& t : j.at("tickers")) {
                article.tagged_companies.push_back(t.get<std::string>());
            }
            data.dataset.articles.push_back(std::move(article));
            data.signs.push_back(j.at("sign").get<int>());
        }
    }
    return data;
}

std::vector<std::pair<std::string, std::vector<std::int64_t>>> clicks_per_news(
    const CachedData& data) {
    std::unordered_map<std::string, std::int64_t> totals;
    for (const auto& ev : data.dataset.click_events) totals[ev.article_id] += ev.clicks;

    std::map<std::string, std::vector<std::int64_t>> per_company;
    for (const auto& article : data.dataset.articles) {
        auto it = totals.find(article.article_id);
        if (it == totals.end() || it->second <= 0) continue;
        for (const auto& ticker : article.tagged_companies) {
            per_company[ticker].push_back(it->second);
        }
    }
    std::vector<std::pair<std::string, std::vector<std::int64_t>>> out;
    out.reserve(per_company.size());
    for (auto& [ticker, samples] : per_company) out.emplace_back(ticker, std::move(samples));
    return out;
}

namespace {

struct Manifest {
    std::map<std::string, std::string> digests;  // relative path -> fnv1a64

    void add(const std::string& out_dir, const std::string& rel, const std::string& content) {
        write_file(out_dir + "/" + rel, content);
        digests[rel] = fnv1a64_hex(content);
    }
};

std::string tails_csv(const RunConfig& config, const CachedData& data) {
    const auto per_company = clicks_per_news(data);
    struct Row {
        std::string ticker;
        TailFit fit;
        std::string error;
    };
    std::vector<Row> rows(per_company.size());
    parallel_for(per_company.size(), [&](std::size_t i) {
        rows[i].ticker = per_company[i].first;
        TailFitOptions options;
        options.n_tail_min = config.n_tail_min;
        options.bootstrap_replicates = config.bootstrap_replicates;
        options.seed = derive_seed(config.seed, 0x5441494cULL, i);
        try {
            rows[i].fit = fit_tail(per_company[i].second, options);
        } catch (const std::exception& e) {
            rows[i].error = e.what();
        }
    });
    std::ostringstream out;
    out << "ticker,alpha,se_alpha,x_min,se_x_min,ks,n_tail\n";
    for (const auto& row : rows) {
        if (!row.error.empty()) {
            out << row.ticker << ",,,,,,\n";
            continue;
        }
        out << row.ticker << ',' << format_double(row.fit.alpha) << ','
            << format_double(row.fit.se_alpha) << ',' << row.fit.x_min << ','
            << format_double(row.fit.se_xmin) << ',' << format_double(row.fit.ks) << ','
            << row.fit.n_tail << '\n';
    }
    return out.str();
}

void attention_outputs(const RunConfig& config, const CachedData& data,
                       std::vector<AttentionCurve>* curves_out,
                       std::vector<AttentionFit>* fits_out) {
    const auto article_clicks =
        collect_article_clicks(data.dataset.articles, data.dataset.click_events);
    *curves_out = decile_curves(article_clicks, config.attention_horizon);
    fits_out->clear();
    for (const auto& curve : *curves_out) {
        fits_out->push_back(fit_tau(curve));
    }
}

}  // namespace

std::string cmd_analyze(const RunConfig& config) {
    const CachedData data = load_cache(config);
    const auto& companies = data.dataset.companies;

    Manifest manifest;
    std::filesystem::create_directories(config.out_dir + "/panels");
    std::filesystem::create_directories(config.out_dir + "/profiles");
    std::filesystem::create_directories(config.out_dir + "/reports");

    // Minute-level work is shared across scales, built once per company.
    struct CompanyBuild {
        std::string error;
        CompanyMinuteData minute_data;
    };
    std::vector<CompanyBuild> builds(companies.size());
    parallel_for(companies.size(), [&](std::size_t i) {
        try {
            builds[i].minute_data =
                build_company_minute_data(data.dataset, data.cal, companies[i], data.signs);
        } catch (const std::exception& e) {
            builds[i].error = e.what();
        }
    });
    for (std::size_t i = 0; i < companies.size(); ++i) {
        if (!builds[i].error.empty()) continue;
        manifest.add(config.out_dir, "profiles/" + companies[i] + ".json",
                     profiles_to_json(builds[i].minute_data));
    }

    std::vector<BatterySummary> summaries;
    for (const auto& scale_text : config.scales) {
        const TimeScale scale = TimeScale::parse(scale_text);
        std::vector<CompanyPanel> panels;
        std::vector<std::string> panel_errors;
        for (std::size_t i = 0; i < companies.size(); ++i) {
            if (!builds[i].error.empty()) {
                CompanyPanel broken;
                broken.company = companies[i];
                broken.scale = scale;
                panels.push_back(std::move(broken));  // battery records the error
                panel_errors.push_back(builds[i].error);
                continue;
            }
            panels.push_back(build_panel(builds[i].minute_data, scale));
            panel_errors.emplace_back();
            manifest.add(config.out_dir,
                         "panels/" + companies[i] + "_" + scale.label() + ".csv",
                         panel_to_csv(panels.back(), data.cal));
        }

        BatteryOptions options;
        options.level = config.level;
        options.n_perm = config.permutations;
        options.max_lag = config.max_lag;
        options.fixed_lag = config.fixed_lag;
        options.seed = derive_seed(config.seed, 0x42415454ULL,
                                   std::hash<std::string>{}(scale.label()));
        TestReport report = run_test_battery(panels, scale, options);
        for (std::size_t i = 0; i < companies.size(); ++i) {
            if (!panel_errors[i].empty()) report.companies[i].error = panel_errors[i];
        }

        manifest.add(config.out_dir, "reports/battery_" + scale.label() + ".json",
                     report_to_json(report));
        manifest.add(config.out_dir, "reports/rho_" + scale.label() + ".csv",
                     report_rho_csv(report));
        manifest.add(config.out_dir, "reports/granger_rejections_" + scale.label() + ".csv",
                     report_rejection_csv(report));
        summaries.push_back(summarize(report));
    }

    // Table-style summaries: one row per scale.
    {
        std::ostringstream corr, granger;
        corr << "scale";
        for (const auto& fs : summaries.front().correlations) {
            corr << ',' << fs.label << "_pct," << fs.label << "_bonf_pct";
        }
        corr << '\n';
        granger << "scale";
        for (const auto& fs : summaries.front().grangers) {
            granger << ',' << fs.label << "," << fs.label << "_bonf";
        }
        granger << '\n';
        for (const auto& s : summaries) {
            corr << s.scale_label;
            for (const auto& fs : s.correlations) {
                const double denom = std::max(1, fs.n_valid);
                corr << ',' << format_double(100.0 * fs.raw_rejections / denom) << ','
                     << format_double(100.0 * fs.bonf_rejections / denom);
            }
            corr << '\n';
            granger << s.scale_label;
            for (const auto& fs : s.grangers) {
                granger << ',' << fs.raw_rejections << ',' << fs.bonf_rejections;
            }
            granger << '\n';
        }
        manifest.add(config.out_dir, "reports/summary_correlation.csv", corr.str());
        manifest.add(config.out_dir, "reports/summary_granger.csv", granger.str());
    }

    manifest.add(config.out_dir, "reports/tails.csv", tails_csv(config, data));

    {
        std::vector<AttentionCurve> curves;
        std::vector<AttentionFit> fits;
        try {
            attention_outputs(config, data, &curves, &fits);
            manifest.add(config.out_dir, "reports/attention_curves.csv", curves_to_csv(curves));
            manifest.add(config.out_dir, "reports/attention_fits.csv", fits_to_csv(fits));
        } catch (const InsufficientDataError& e) {
            manifest.add(config.out_dir, "reports/attention_curves.csv",
                         std::string("# skipped: ") + e.what() + "\n");
        }
    }

    nlohmann::json j;
    j["config"] = {{"level", config.level},
                   {"permutations", config.permutations},
                   {"max_lag", config.max_lag},
                   {"fixed_lag", config.fixed_lag},
                   {"seed", config.seed},
                   {"scales", config.scales},
                   {"bootstrap_replicates", config.bootstrap_replicates},
                   {"n_tail_min", config.n_tail_min},
                   {"attention_horizon", config.attention_horizon}};
    j["outputs"] = manifest.digests;
    const std::string manifest_path = config.out_dir + "/manifest.json";
    write_file(manifest_path, j.dump(2) + "\n");
    return manifest_path;
}

bool cmd_validate(const RunConfig& config) {
    const GroundTruth truth = GroundTruth::from_json_file(config.ground_truth);
    const std::string scale_label = config.scales.front();
    const std::string report_path =
        config.out_dir + "/reports/battery_" + scale_label + ".json";
    nlohmann::json report;
    try {
        report = nlohmann::json::parse(read_file(report_path));
    } catch (const std::exception& e) {
        throw DataError("cannot read battery report " + report_path + ": " + e.what());
    }

    std::unordered_map<std::string, bool> causal;
    for (const auto& c : truth.companies) causal[c.ticker] = c.causal;

    int n_planted = 0, n_null = 0;
    int ws_r_hits_planted = 0, ws_r_hits_null = 0, r_ws_hits = 0;
    std::map<std::string, int> direction_hits;
    int n_valid = 0;
    for (const auto& jc : report.at("companies")) {
        if (jc.contains("error")) continue;
        const std::string ticker = jc.at("company").get<std::string>();
        auto it = causal.find(ticker);
        if (it == causal.end()) {
            throw DataError("company " + ticker + " not present in ground truth");
        }
        ++n_valid;
        const bool planted = it->second;
        (planted ? n_planted : n_null) += 1;
        for (const auto& jg : jc.at("granger")) {
            const std::string dir = jg.at("direction").get<std::string>();
            const bool reject = jg.at("reject").get<bool>();
            if (reject) ++direction_hits[dir];
            if (dir == "WS->R" && reject) (planted ? ws_r_hits_planted : ws_r_hits_null) += 1;
            if (dir == "R->WS" && reject) ++r_ws_hits;
        }
    }
    if (n_valid == 0) throw DataError("no valid companies in the battery report");

    bool pass = true;
    std::printf("validate: %d companies (%d planted, %d null), scale %s\n", n_valid, n_planted,
                n_null, scale_label.c_str());
    if (n_planted > 0) {
        const double power = static_cast<double>(ws_r_hits_planted) / n_planted;
        const double false_pos =
            n_null > 0 ? static_cast<double>(ws_r_hits_null) / n_null : 0.0;
        const double reverse = static_cast<double>(r_ws_hits) / n_valid;
        std::printf("  WS->R power %.3f (threshold %.3f)\n", power, config.power_threshold);
        std::printf("  WS->R false positives %.3f (threshold %.3f)\n", false_pos,
                    config.false_positive_threshold);
        std::printf("  R->WS rejection rate %.3f\n", reverse);
        if (power < config.power_threshold) pass = false;
        if (false_pos > config.false_positive_threshold) pass = false;
    } else {
        // Null cohort: every direction should reject at ~level.
        const double sigma = std::sqrt(config.level * (1.0 - config.level) / n_valid);
        const double lo = config.level - 2.0 * sigma;
        const double hi = config.level + 2.0 * sigma;
        for (const auto& [dir, hits] : direction_hits) {
            const double rate = static_cast<double>(hits) / n_valid;
            const bool ok = rate >= lo && rate <= hi;
            std::printf("  %-10s rejection rate %.3f %s\n", dir.c_str(), rate,
                        ok ? "ok" : "OUT OF BAND");
            if (!ok) pass = false;
        }
        for (const auto& label :
             {"S->R", "R->S", "R->WS", "WS->R", "V->C", "C->V", "C->sigma", "sigma->C"}) {
            if (!direction_hits.count(label)) {
                const bool ok = lo <= 0.0;
                std::printf("  %-10s rejection rate 0.000 %s\n", label, ok ? "ok" : "OUT OF BAND");
                if (!ok) pass = false;
            }
        }
    }
    std::printf("validate: %s\n", pass ? "PASS" : "FAIL");
    return pass;
}

void cmd_tails(const RunConfig& config) {
    const CachedData data = load_cache(config);
    std::filesystem::create_directories(config.out_dir + "/reports");
    write_file(config.out_dir + "/reports/tails.csv", tails_csv(config, data));
}

void cmd_attention(const RunConfig& config) {
    const CachedData data = load_cache(config);
    std::filesystem::create_directories(config.out_dir + "/reports");
    std::vector<AttentionCurve> curves;
    std::vector<AttentionFit> fits;
    attention_outputs(config, data, &curves, &fits);
    write_file(config.out_dir + "/reports/attention_curves.csv", curves_to_csv(curves));
    write_file(config.out_dir + "/reports/attention_fits.csv", fits_to_csv(fits));
}

}  // namespace newsflow

#include "newsflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "newsflow/errors.hpp"
#include "newsflow/mathkit.hpp"
#include "newsflow/tails.hpp"
#include "newsflow/util.hpp"

namespace newsflow {

namespace {

constexpr std::int64_t kWeek = 7 * 1440;

const char* kPositiveWords[] = {"rally", "gains", "upbeat", "beats",
                                "record", "strong", "growth", "surge"};
const char* kNegativeWords[] = {"slump", "losses", "warning", "misses",
                                "weak", "downturn", "lawsuit", "default"};
const char* kNeutralWords[] = {"shares", "update", "report", "quarter",
                               "market", "outlook", "analysts", "note"};

std::string ticker_name(int i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%03d", i);
    return std::string(buf);
}

template <std::size_t N>
const char* pick(const char* const (&pool)[N], Rng& rng) {
    return pool[rng.below(N)];
}

std::string make_title(int sign, const std::string& ticker, Rng& rng) {
    std::ostringstream t;
    t << ticker << ' ';
    if (sign > 0) {
        t << pick(kPositiveWords, rng) << ' ' << pick(kNeutralWords, rng) << ' '
          << pick(kPositiveWords, rng);
    } else if (sign < 0) {
        t << pick(kNegativeWords, rng) << ' ' << pick(kNeutralWords, rng) << ' '
          << pick(kNegativeWords, rng);
    } else if (rng.uniform01() < 0.5) {
        t << pick(kNeutralWords, rng) << ' ' << pick(kNeutralWords, rng);
    } else {
        // Tied headline: one word each way still scores neutral.
        t << pick(kPositiveWords, rng) << " but " << pick(kNegativeWords, rng);
    }
    return t.str();
}

}  // namespace

void SynthConfig::validate() const {
    if (n_companies < 1 || n_days < 1) throw DataError("synth: need companies and days");
    if (!(click_alpha > 0.0) || click_xmin < 1) throw DataError("synth: bad click tail config");
    if (causal_fraction < 0.0 || causal_fraction > 1.0) {
        throw DataError("synth: causal_fraction must be in [0,1]");
    }
    if (causal_lag < 1 || target_scale_minutes < 1 ||
        kSessionMinutes % target_scale_minutes != 0) {
        throw DataError("synth: bad causal lag or target scale");
    }
    if (!(return_sigma > 0.0) || !(volume_sigma >= 0.0) || !(volume_base > 0.0) ||
        day_factor_sigma < 0.0) {
        throw DataError("synth: noise scales must be positive");
    }
    if (p_positive < 0.0 || p_negative < 0.0 || p_positive + p_negative > 1.0) {
        throw DataError("synth: bad sentiment probabilities");
    }
    if (!(attention_tau_min > 0.0) || attention_tau_max < attention_tau_min) {
        throw DataError("synth: bad attention tau range");
    }
    if (!intraday_pattern.empty()) {
        if (static_cast<int>(intraday_pattern.size()) != kSessionMinutes) {
            throw DataError("synth: intraday pattern must have 390 entries");
        }
        for (double p : intraday_pattern) {
            if (!(p > 0.0)) throw DataError("synth: intraday pattern must be strictly positive");
        }
    }
    if (articles_per_day <= 0.0) throw DataError("synth: articles_per_day must be positive");
}

std::vector<double> SynthConfig::pattern_or_default() const {
    if (!intraday_pattern.empty()) return intraday_pattern;
    std::vector<double> pattern(kSessionMinutes);
    for (int t = 0; t < kSessionMinutes; ++t) {
        const double u = (t - 195.0) / 195.0;  // -1 at open, +1 at close
        pattern[t] = 0.5 + 1.5 * u * u;        // U-shape, mean ~1
    }
    return pattern;
}

SynthPaths synth_paths(const std::string& out_dir) {
    SynthPaths p;
    p.market_csv = out_dir + "/market.csv";
    p.clicks_csv = out_dir + "/clicks.csv";
    p.news_jsonl = out_dir + "/news.jsonl";
    p.trading_days_txt = out_dir + "/trading_days.txt";
    p.alias_csv = out_dir + "/aliases.csv";
    p.ground_truth_json = out_dir + "/ground_truth.json";
    return p;
}

namespace {

struct CompanyOutput {
    std::string market_rows;
    std::string clicks_rows;
    std::string news_rows;
    CompanyTruth truth;
    std::vector<ArticleTruth> articles;
};

struct GenContext {
    const SynthConfig* config;
    std::vector<double> pattern;
    double pattern_mean = 0.0;
    double pattern_max = 0.0;
    double pattern_sum = 0.0;
    std::vector<CivilDate> trading_days;
    TradingCalendar* cal = nullptr;
    std::int64_t wall_start_minute = 0;  // epoch minute of start_date 00:00 ET
    std::int64_t wall_minutes = 0;
    std::vector<double> session_weight;  // pattern weight per wall minute, thinning
    std::vector<std::int32_t> grid_of_wall;  // trading-grid global minute or -1
    std::vector<bool> causal;
    std::vector<std::string> grid_timestamp;  // per trading-grid minute, shared by companies
    std::vector<std::string> wall_timestamp;  // per wall minute (clicks, publications)
};

CompanyOutput generate_company(const GenContext& ctx, int company_index) {
    const SynthConfig& cfg = *ctx.config;
    const std::string ticker = ticker_name(company_index);
    const std::int64_t n_grid = static_cast<std::int64_t>(cfg.n_days) * kSessionMinutes;

    CompanyOutput out;
    out.truth.ticker = ticker;
    out.truth.causal = ctx.causal[company_index];

    Rng rng_art(derive_seed(cfg.seed, 0x41525431ULL, company_index));
    Rng rng_clk(derive_seed(cfg.seed, 0x434c4b31ULL, company_index));
    Rng rng_mkt(derive_seed(cfg.seed, 0x4d4b5431ULL, company_index));

    // --- articles and clicks ---
    const std::int64_t n_wall_days = ctx.wall_minutes / 1440;
    const std::int64_t n_articles =
        std::max<std::int64_t>(1, std::llround(cfg.articles_per_day * n_wall_days));

    std::vector<double> click_sum(n_grid, 0.0);     // in-session clicks per grid minute
    std::vector<double> click_signed(n_grid, 0.0);  // clicks x sign per grid minute

    std::ostringstream news;
    std::string clicks;
    char row[160];
    for (std::int64_t j = 0; j < n_articles; ++j) {
        ArticleTruth art;
        art.company = ticker;
        {
            char buf[24];
            std::snprintf(buf, sizeof(buf), "%s-A%06lld", ticker.c_str(),
                          static_cast<long long>(j));
            art.article_id = buf;
        }
        art.publish_epoch_minute =
            ctx.wall_start_minute + static_cast<std::int64_t>(rng_art.below(ctx.wall_minutes));
        const double u = rng_art.uniform01();
        art.sign = u < cfg.p_positive ? 1 : (u < cfg.p_positive + cfg.p_negative ? -1 : 0);
        art.total_clicks = power_law_sample(cfg.click_alpha, cfg.click_xmin, rng_clk);
        art.tau = cfg.attention_tau_min +
                  (cfg.attention_tau_max - cfg.attention_tau_min) *
                      (1.0 - std::sqrt(static_cast<double>(cfg.click_xmin) /
                                       static_cast<double>(art.total_clicks)));

        // Click minute weights: exponential decay after publication thinned
        // by the intraday pattern (out-of-session minutes carry the mean).
        const std::int64_t support =
            std::min<std::int64_t>(kWeek, static_cast<std::int64_t>(std::ceil(art.tau * 30.0)) + 1);
        std::vector<double> weights(support);
        double total_weight = 0.0;
        for (std::int64_t d = 0; d < support; ++d) {
            const std::int64_t wall = art.publish_epoch_minute - ctx.wall_start_minute + d;
            const double g = (wall >= 0 && wall < ctx.wall_minutes)
                                 ? ctx.session_weight[static_cast<std::size_t>(wall)]
                                 : ctx.pattern_mean / ctx.pattern_max;
            weights[d] = std::exp(-static_cast<double>(d) / art.tau) * g;
            total_weight += weights[d];
        }
        std::int64_t remaining = art.total_clicks;
        double mass_left = total_weight;
        for (std::int64_t d = 0; d < support && remaining > 0; ++d) {
            std::int64_t c;
            if (d + 1 == support || mass_left <= weights[d]) {
                c = remaining;
            } else {
                c = rng_clk.binomial(remaining, weights[d] / mass_left);
            }
            mass_left -= weights[d];
            if (c <= 0) continue;
            remaining -= c;
            const std::int64_t minute = art.publish_epoch_minute + d;
            const std::int64_t wall = minute - ctx.wall_start_minute;
            const std::string& stamp =
                (wall >= 0 && wall < ctx.wall_minutes)
                    ? ctx.wall_timestamp[static_cast<std::size_t>(wall)]
                    : format_instant_eastern(minute * 60);
            std::snprintf(row, sizeof(row), "%s,%s,%lld\n", art.article_id.c_str(), stamp.c_str(),
                          static_cast<long long>(c));
            clicks += row;
            if (wall >= 0 && wall < ctx.wall_minutes) {
                const std::int32_t grid = ctx.grid_of_wall[static_cast<std::size_t>(wall)];
                if (grid >= 0) {
                    click_sum[grid] += static_cast<double>(c);
                    click_signed[grid] += static_cast<double>(c) * art.sign;
                }
            }
        }

        nlohmann::json jn;
        jn["article_id"] = art.article_id;
        jn["published"] =
            ctx.wall_timestamp[static_cast<std::size_t>(art.publish_epoch_minute -
                                                        ctx.wall_start_minute)];
        jn["title"] = make_title(art.sign, ticker, rng_art);
        jn["first_paragraph"] = ticker + " " + std::string("report details follow.");
        jn["tickers"] = nlohmann::json::array({ticker});
        news << jn.dump() << '\n';
        out.articles.push_back(std::move(art));
    }

    // --- planted minute signal: sign of signed clicks times rescaled clicks ---
    std::vector<double> z(n_grid, 0.0);
    for (std::int64_t g = 0; g < n_grid; ++g) {
        const int t = static_cast<int>(g % kSessionMinutes);
        const double zeta = ctx.pattern[t] / ctx.pattern_sum;  // planted click profile
        const double sgn = (click_signed[g] > 0.0) - (click_signed[g] < 0.0);
        z[g] = sgn * click_sum[g] / zeta;
    }
    const double z_mean = mean(z);
    const double z_sd = std::sqrt(variance(z));
    out.truth.signal_sd = z_sd;

    // --- market series ---
    const std::int64_t lag_minutes =
        static_cast<std::int64_t>(cfg.causal_lag) * cfg.target_scale_minutes;
    const bool coupled = out.truth.causal && z_sd > 0.0 && cfg.causal_strength != 0.0;

    std::string market;
    market.reserve(static_cast<std::size_t>(n_grid) * 56);
    double log_price = 2.0;  // price starts at 100
    for (int d = 0; d < cfg.n_days; ++d) {
        const double fv = cfg.day_factor_sigma > 0.0
                              ? std::exp(cfg.day_factor_sigma * rng_mkt.normal())
                              : 1.0;
        for (int t = 0; t < kSessionMinutes; ++t) {
            const std::int64_t g = static_cast<std::int64_t>(d) * kSessionMinutes + t;
            const double amp = ctx.pattern[t] / ctx.pattern_mean;
            double shock = rng_mkt.normal();
            if (coupled && g >= lag_minutes) {
                shock += cfg.causal_strength * (z[g - lag_minutes] - z_mean) / z_sd;
            }
            log_price += cfg.return_sigma * amp * shock;
            const double price = std::pow(10.0, log_price);
            const double volume = cfg.volume_base * (ctx.pattern[t] / ctx.pattern_mean) * fv *
                                  std::exp(cfg.volume_sigma * rng_mkt.normal() -
                                           0.5 * cfg.volume_sigma * cfg.volume_sigma);
            std::snprintf(row, sizeof(row), "%s,%s,%s,%s\n", ticker.c_str(),
                          ctx.grid_timestamp[static_cast<std::size_t>(g)].c_str(),
                          format_double(price).c_str(), format_double(volume).c_str());
            market += row;
        }
    }

    out.market_rows = std::move(market);
    out.clicks_rows = std::move(clicks);
    out.news_rows = news.str();
    return out;
}

}  // namespace

std::string GroundTruth::to_json() const {
    nlohmann::json j;
    j["config"] = {{"n_companies", config.n_companies},
                   {"n_days", config.n_days},
                   {"seed", config.seed},
                   {"click_alpha", config.click_alpha},
                   {"click_xmin", config.click_xmin},
                   {"causal_fraction", config.causal_fraction},
                   {"causal_strength", config.causal_strength},
                   {"causal_lag", config.causal_lag},
                   {"target_scale_minutes", config.target_scale_minutes},
                   {"return_sigma", config.return_sigma},
                   {"volume_sigma", config.volume_sigma},
                   {"volume_base", config.volume_base},
                   {"day_factor_sigma", config.day_factor_sigma},
                   {"articles_per_day", config.articles_per_day},
                   {"p_positive", config.p_positive},
                   {"p_negative", config.p_negative},
                   {"attention_tau_min", config.attention_tau_min},
                   {"attention_tau_max", config.attention_tau_max},
                   {"start_date", date_to_string(config.start_date)}};
    auto& days = j["trading_days"] = nlohmann::json::array();
    for (const auto& d : trading_days) days.push_back(date_to_string(d));
    auto& jc = j["companies"] = nlohmann::json::array();
    for (const auto& c : companies) {
        jc.push_back({{"ticker", c.ticker}, {"causal", c.causal}, {"signal_sd", c.signal_sd}});
    }
    auto& ja = j["articles"] = nlohmann::json::array();
    for (const auto& a : articles) {
        ja.push_back({{"article_id", a.article_id},
                      {"company", a.company},
                      {"sign", a.sign},
                      {"total_clicks", a.total_clicks},
                      {"tau", a.tau},
                      {"publish_epoch_minute", a.publish_epoch_minute}});
    }
    return j.dump(2) + "\n";
}

GroundTruth GroundTruth::from_json_file(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw DataError("bad ground truth file " + path + ": " + e.what());
    }
    GroundTruth gt;
    try {
        const auto& jc = j.at("config");
        gt.config.n_companies = jc.at("n_companies").get<int>();
        gt.config.n_days = jc.at("n_days").get<int>();
        gt.config.seed = jc.at("seed").get<std::uint64_t>();
        gt.config.click_alpha = jc.at("click_alpha").get<double>();
        gt.config.click_xmin = jc.at("click_xmin").get<std::int64_t>();
        gt.config.causal_fraction = jc.at("causal_fraction").get<double>();
        gt.config.causal_strength = jc.at("causal_strength").get<double>();
        gt.config.causal_lag = jc.at("causal_lag").get<int>();
        gt.config.target_scale_minutes = jc.at("target_scale_minutes").get<int>();
        gt.config.start_date = parse_date(jc.at("start_date").get<std::string>());
        for (const auto& d : j.at("trading_days")) {
            gt.trading_days.push_back(parse_date(d.get<std::string>()));
        }
        for (const auto& c : j.at("companies")) {
            gt.companies.push_back(CompanyTruth{c.at("ticker").get<std::string>(),
                                                c.at("causal").get<bool>(),
                                                c.at("signal_sd").get<double>()});
        }
        for (const auto& a : j.at("articles")) {
            gt.articles.push_back(ArticleTruth{a.at("article_id").get<std::string>(),
                                               a.at("company").get<std::string>(),
                                               a.at("sign").get<int>(),
                                               a.at("total_clicks").get<std::int64_t>(),
                                               a.at("tau").get<double>(),
                                               a.at("publish_epoch_minute").get<std::int64_t>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("ground truth file " + path + " missing fields: " + e.what());
    }
    return gt;
}

GroundTruth generate(const SynthConfig& config, const std::string& out_dir,
                     SynthPaths* paths_out) {
    config.validate();
    std::filesystem::create_directories(out_dir);
    const SynthPaths paths = synth_paths(out_dir);
    if (paths_out) *paths_out = paths;

    GenContext ctx;
    ctx.config = &config;
    ctx.pattern = config.pattern_or_default();
    ctx.pattern_sum = 0.0;
    ctx.pattern_max = 0.0;
    for (double p : ctx.pattern) {
        ctx.pattern_sum += p;
        ctx.pattern_max = std::max(ctx.pattern_max, p);
    }
    ctx.pattern_mean = ctx.pattern_sum / kSessionMinutes;

    // Trading days: consecutive weekdays from the start date.
    std::int64_t day = days_from_civil(config.start_date);
    while (static_cast<int>(ctx.trading_days.size()) < config.n_days) {
        const int wd = weekday_from_days(day);
        if (wd != 0 && wd != 6) ctx.trading_days.push_back(civil_from_days(day));
        ++day;
    }
    TradingCalendar cal(ctx.trading_days);
    ctx.cal = &cal;

    ctx.wall_start_minute = eastern_local_to_epoch(ctx.trading_days.front(), 0) / 60;
    const std::int64_t wall_end_minute =
        eastern_local_to_epoch(ctx.trading_days.back(), 0) / 60 + 1440;
    ctx.wall_minutes = wall_end_minute - ctx.wall_start_minute;

    ctx.session_weight.assign(static_cast<std::size_t>(ctx.wall_minutes), 0.0);
    ctx.grid_of_wall.assign(static_cast<std::size_t>(ctx.wall_minutes), -1);
    ctx.wall_timestamp.resize(static_cast<std::size_t>(ctx.wall_minutes));
    const double out_weight = ctx.pattern_mean / ctx.pattern_max;
    for (std::int64_t w = 0; w < ctx.wall_minutes; ++w) {
        const EpochSeconds t = (ctx.wall_start_minute + w) * 60;
        ctx.wall_timestamp[w] = format_instant_eastern(t);
        if (const auto g = cal.minute_index(t)) {
            ctx.session_weight[w] = ctx.pattern[g->minute] / ctx.pattern_max;
            ctx.grid_of_wall[w] =
                static_cast<std::int32_t>(g->day_index * kSessionMinutes + g->minute);
        } else {
            ctx.session_weight[w] = out_weight;
        }
    }
    ctx.grid_timestamp.resize(static_cast<std::size_t>(config.n_days) * kSessionMinutes);
    for (int d = 0; d < config.n_days; ++d) {
        const EpochSeconds open = cal.session_open_epoch(d);
        for (int t = 0; t < kSessionMinutes; ++t) {
            ctx.grid_timestamp[static_cast<std::size_t>(d) * kSessionMinutes + t] =
                format_instant_eastern(open + 60 * t);
        }
    }

    // Causal assignment: seeded shuffle, first k of the permutation.
    const int n_causal =
        static_cast<int>(std::llround(config.causal_fraction * config.n_companies));
    std::vector<int> order(config.n_companies);
    for (int i = 0; i < config.n_companies; ++i) order[i] = i;
    Rng assign_rng(derive_seed(config.seed, 0x43415553ULL));
    assign_rng.shuffle(order);
    ctx.causal.assign(config.n_companies, false);
    for (int i = 0; i < n_causal; ++i) ctx.causal[order[i]] = true;

    std::vector<CompanyOutput> outputs(config.n_companies);
    parallel_for(config.n_companies,
                 [&](std::size_t i) { outputs[i] = generate_company(ctx, static_cast<int>(i)); });

    GroundTruth truth;
    truth.config = config;
    truth.trading_days = ctx.trading_days;

    std::string market = "ticker,timestamp_iso8601,last_price,volume\n";
    std::string clicks = "article_id,timestamp_iso8601,clicks\n";
    std::string news, aliases, days_txt;
    for (const auto& d : ctx.trading_days) days_txt += date_to_string(d) + "\n";
    for (int i = 0; i < config.n_companies; ++i) {
        market += outputs[i].market_rows;
        clicks += outputs[i].clicks_rows;
        news += outputs[i].news_rows;
        aliases += ticker_name(i) + "," + ticker_name(i) + " Corp\n";
        truth.companies.push_back(outputs[i].truth);
        for (auto& a : outputs[i].articles) truth.articles.push_back(std::move(a));
    }

    write_file(paths.market_csv, market);
    write_file(paths.clicks_csv, clicks);
    write_file(paths.news_jsonl, news);
    write_file(paths.trading_days_txt, days_txt);
    write_file(paths.alias_csv, aliases);
    write_file(paths.ground_truth_json, truth.to_json());
    return truth;
}

}  // namespace newsflow

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "newsflow/calendar.hpp"

namespace newsflow {

struct MarketBar {
    std::string company;
    int day_index = 0;
    int minute = 0;  // 0..389
    double last_price = 0.0;
    double volume = 0.0;
};

struct NewsArticle {
    std::string article_id;
    EpochSeconds publish_instant = 0;
    std::string title;
    std::optional<std::string> first_paragraph;
    std::vector<std::string> tagged_companies;  // sorted, unique
};

// One in-session click observation on the trading grid.
struct ClickMinute {
    std::string article_id;
    int day_index = 0;
    int minute = 0;
    std::int64_t clicks = 0;
};

// Raw wall-clock click observation (minutes since the epoch); kept for the
// attention analysis, which runs outside the trading grid.
struct ClickEvent {
    std::string article_id;
    std::int64_t epoch_minute = 0;
    std::int64_t clicks = 0;
};

using AliasMap = std::unordered_map<std::string, std::vector<std::string>>;

// `ticker,alias1|alias2|...` per line.
AliasMap load_aliases(const std::string& path);

// Market CSV `ticker,timestamp_iso8601,last_price,volume`. Out-of-session
// rows are dropped; the result is sorted by (company, day, minute) and free
// of duplicates.
std::vector<MarketBar> parse_market(const std::string& path, const TradingCalendar& cal,
                                    std::size_t* dropped_out_of_session = nullptr);

struct ParsedClicks {
    std::vector<ClickMinute> grid;    // in-session, aggregated per (article, day, minute)
    std::vector<ClickEvent> events;   // every click row, floored to the minute
    std::size_t dropped_out_of_session = 0;  // grid-side drops
};

// Clicks CSV `article_id,timestamp_iso8601,clicks`.
ParsedClicks parse_clicks(const std::string& path, const TradingCalendar& cal);

// News JSONL with keys article_id, published, title, first_paragraph
// (nullable), tickers.
std::vector<NewsArticle> parse_news(const std::string& path);

// Tagging filter: reject articles tagged with more than max_tags companies;
// for multi-tag articles keep only companies whose ticker or alias appears
// (case-insensitive substring) in the title or first paragraph. Returns
// absent when the article is rejected.
std::optional<NewsArticle> filter_tags(const NewsArticle& article, const AliasMap& aliases,
                                       int max_tags = 4);

// Per-minute click attribution for one company.
struct CompanyClickSeries {
    std::string company;
    struct Entry {
        int day_index;
        int minute;
        std::int64_t clicks;
        std::size_t article_index;  // into the articles vector passed in
    };
    std::vector<Entry> entries;          // sorted by (day, minute, article_index)
    std::size_t unknown_article_rows = 0;
};

CompanyClickSeries company_click_series(const std::vector<NewsArticle>& articles,
                                        const std::vector<ClickMinute>& clicks,
                                        const std::string& company);

struct IngestSummary {
    std::size_t market_rows = 0;
    std::size_t market_dropped_out_of_session = 0;
    std::size_t click_rows = 0;
    std::size_t click_rows_dropped_out_of_session = 0;
    std::size_t click_rows_unknown_article = 0;
    std::size_t articles_parsed = 0;
    std::size_t articles_rejected_too_many_tags = 0;
    std::size_t articles_rejected_no_tag_match = 0;
    std::size_t articles_kept = 0;
};

// The parsed and filtered input bundle the pipeline runs on.
struct Dataset {
    std::vector<std::string> companies;                       // sorted, from market data
    std::unordered_map<std::string, std::vector<MarketBar>> market;  // per company
    std::vector<NewsArticle> articles;                        // filtered
    std::vector<ClickMinute> click_grid;                      // known articles only
    std::vector<ClickEvent> click_events;                     // known articles only
    IngestSummary summary;
};

struct IngestPaths {
    std::string market_csv;
    std::string clicks_csv;
    std::string news_jsonl;
    std::string alias_csv;  // optional, may be empty
};

Dataset ingest_dataset(const IngestPaths& paths, const TradingCalendar& cal);

}  // namespace newsflow

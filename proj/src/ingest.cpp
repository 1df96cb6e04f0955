#include "newsflow/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>

#include <json.hpp>

#include "newsflow/errors.hpp"

namespace newsflow {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_positive_double(const std::string& s, const std::string& ctx, bool allow_zero) {
    double v = 0.0;
    const auto* begin = s.data();
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) throw DataError(ctx + ": bad number '" + s + "'");
    if (v < 0.0 || (!allow_zero && v == 0.0)) {
        throw DataError(ctx + ": value out of range '" + s + "'");
    }
    return v;
}

std::int64_t parse_nonnegative_int(const std::string& s, const std::string& ctx) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
        throw DataError(ctx + ": bad count '" + s + "'");
    }
    return v;
}

std::string lowercase(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool contains_ci(const std::string& haystack_lower, const std::string& needle) {
    return haystack_lower.find(lowercase(needle)) != std::string::npos;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    return in;
}

bool read_line(std::ifstream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace

AliasMap load_aliases(const std::string& path) {
    auto in = open_or_throw(path);
    AliasMap aliases;
    std::string line;
    int line_no = 0;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 'ticker,aliases'");
        }
        const std::string ticker = line.substr(0, comma);
        std::vector<std::string> list;
        std::size_t start = comma + 1;
        while (start <= line.size()) {
            const auto bar = line.find('|', start);
            const std::string alias =
                line.substr(start, bar == std::string::npos ? std::string::npos : bar - start);
            if (!alias.empty()) list.push_back(alias);
            if (bar == std::string::npos) break;
            start = bar + 1;
        }
        aliases[ticker] = std::move(list);
    }
    return aliases;
}

std::vector<MarketBar> parse_market(const std::string& path, const TradingCalendar& cal,
                                    std::size_t* dropped_out_of_session) {
    auto in = open_or_throw(path);
    std::string line;
    if (!read_line(in, line) || line != "ticker,timestamp_iso8601,last_price,volume") {
        throw DataError(path + ": missing market CSV header");
    }
    std::vector<MarketBar> bars;
    std::size_t dropped = 0;
    int line_no = 1;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 4) throw DataError(ctx + ": expected 4 fields");
        const auto grid = cal.minute_index(parse_instant(fields[1]));
        const double price = parse_positive_double(fields[2], ctx, /*allow_zero=*/false);
        const double volume = parse_positive_double(fields[3], ctx, /*allow_zero=*/true);
        if (!grid) {
            ++dropped;
            continue;
        }
        bars.push_back(MarketBar{fields[0], grid->day_index, grid->minute, price, volume});
    }
    std::sort(bars.begin(), bars.end(), [](const MarketBar& a, const MarketBar& b) {
        return std::tie(a.company, a.day_index, a.minute) <
               std::tie(b.company, b.day_index, b.minute);
    });
    for (std::size_t i = 1; i < bars.size(); ++i) {
        const auto& p = bars[i - 1];
        const auto& c = bars[i];
        if (p.company == c.company && p.day_index == c.day_index && p.minute == c.minute) {
            throw DataError(path + ": duplicate bar for " + c.company + " day " +
                            std::to_string(c.day_index) + " minute " + std::to_string(c.minute));
        }
    }
    if (dropped_out_of_session) *dropped_out_of_session = dropped;
    return bars;
}

ParsedClicks parse_clicks(const std::string& path, const TradingCalendar& cal) {
    auto in = open_or_throw(path);
    std::string line;
    if (!read_line(in, line) || line != "article_id,timestamp_iso8601,clicks") {
        throw DataError(path + ": missing clicks CSV header");
    }
    ParsedClicks out;
    // Aggregate grid clicks per (article, day, minute); sub-minute stamps floor.
    std::map<std::tuple<std::string, int, int>, std::int64_t> grid;
    std::map<std::pair<std::string, std::int64_t>, std::int64_t> events;
    int line_no = 1;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path + ":" + std::to_string(line_no);
        const auto fields = split_csv_line(line);
        if (fields.size() != 3) throw DataError(ctx + ": expected 3 fields");
        const EpochSeconds t = parse_instant(fields[1]);
        const std::int64_t clicks = parse_nonnegative_int(fields[2], ctx);
        if (clicks == 0) continue;
        std::int64_t epoch_minute = t / 60 - (t % 60 < 0 ? 1 : 0);
        events[{fields[0], epoch_minute}] += clicks;
        if (const auto g = cal.minute_index(t)) {
            grid[{fields[0], g->day_index, g->minute}] += clicks;
        } else {
            out.dropped_out_of_session += 1;
        }
    }
    out.grid.reserve(grid.size());
    for (const auto& [key, clicks] : grid) {
        out.grid.push_back(
            ClickMinute{std::get<0>(key), std::get<1>(key), std::get<2>(key), clicks});
    }
    out.events.reserve(events.size());
    for (const auto& [key, clicks] : events) {
        out.events.push_back(ClickEvent{key.first, key.second, clicks});
    }
    return out;
}

std::vector<NewsArticle> parse_news(const std::string& path) {
    auto in = open_or_throw(path);
    std::vector<NewsArticle> articles;
    std::unordered_set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (read_line(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string ctx = path + ":" + std::to_string(line_no);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(ctx + ": bad JSON (" + e.what() + ")");
        }
        NewsArticle a;
        try {
            a.article_id = j.at("article_id").get<std::string>();
            a.publish_instant = parse_instant(j.at("published").get<std::string>());
            a.title = j.at("title").get<std::string>();
            if (j.contains("first_paragraph") && !j["first_paragraph"].is_null()) {
                a.first_paragraph = j["first_paragraph"].get<std::string>();
            }
            for (const auto& t : j.at("tickers")) {
                a.tagged_companies.push_back(t.get<std::string>());
            }
        } catch (const nlohmann::json::exception& e) {
            throw DataError(ctx + ": missing or mistyped field (" + e.what() + ")");
        }
        std::sort(a.tagged_companies.begin(), a.tagged_companies.end());
        a.tagged_companies.erase(
            std::unique(a.tagged_companies.begin(), a.tagged_companies.end()),
            a.tagged_companies.end());
        if (a.tagged_companies.empty()) throw DataError(ctx + ": article has no tickers");
        if (!seen.insert(a.article_id).second) {
            throw DataError(ctx + ": duplicate article_id '" + a.article_id + "'");
        }
        articles.push_back(std::move(a));
    }
    return articles;
}

std::optional<NewsArticle> filter_tags(const NewsArticle& article, const AliasMap& aliases,
                                       int max_tags) {
    if (static_cast<int>(article.tagged_companies.size()) > max_tags) return std::nullopt;
    if (article.tagged_companies.size() <= 1) return article;

    std::string haystack = lowercase(article.title);
    if (article.first_paragraph) {
        haystack += '\n';
        haystack += lowercase(*article.first_paragraph);
    }
    NewsArticle out = article;
    out.tagged_companies.clear();
    for (const auto& ticker : article.tagged_companies) {
        bool hit = contains_ci(haystack, ticker);
        if (!hit) {
            if (auto it = aliases.find(ticker); it != aliases.end()) {
                for (const auto& alias : it->second) {
                    if (contains_ci(haystack, alias)) {
                        hit = true;
                        break;
                    }
                }
            }
        }
        if (hit) out.tagged_companies.push_back(ticker);
    }
    if (out.tagged_companies.empty()) return std::nullopt;
    return out;
}

CompanyClickSeries company_click_series(const std::vector<NewsArticle>& articles,
                                        const std::vector<ClickMinute>& clicks,
                                        const std::string& company) {
    std::unordered_map<std::string, std::size_t> index_by_id;
    for (std::size_t i = 0; i < articles.size(); ++i) {
        const auto& tags = articles[i].tagged_companies;
        if (std::find(tags.begin(), tags.end(), company) != tags.end()) {
            index_by_id.emplace(articles[i].article_id, i);
        }
    }
    std::unordered_set<std::string> known;
    for (const auto& a : articles) known.insert(a.article_id);

    CompanyClickSeries series;
    series.company = company;
    for (const auto& row : clicks) {
        if (!known.count(row.article_id)) {
            ++series.unknown_article_rows;
            continue;
        }
        auto it = index_by_id.find(row.article_id);
        if (it == index_by_id.end()) continue;  // known article, other company
        series.entries.push_back(
            CompanyClickSeries::Entry{row.day_index, row.minute, row.clicks, it->second});
    }
    std::sort(series.entries.begin(), series.entries.end(),
              [](const CompanyClickSeries::Entry& a, const CompanyClickSeries::Entry& b) {
                  return std::tie(a.day_index, a.minute, a.article_index) <
                         std::tie(b.day_index, b.minute, b.article_index);
              });
    return series;
}

Dataset ingest_dataset(const IngestPaths& paths, const TradingCalendar& cal) {
    Dataset ds;
    AliasMap aliases;
    if (!paths.alias_csv.empty()) aliases = load_aliases(paths.alias_csv);

    auto bars = parse_market(paths.market_csv, cal, &ds.summary.market_dropped_out_of_session);
    ds.summary.market_rows = bars.size();
    for (auto& bar : bars) {
        ds.market[bar.company].push_back(bar);
    }
    for (const auto& [company, _] : ds.market) ds.companies.push_back(company);
    std::sort(ds.companies.begin(), ds.companies.end());

    auto raw_articles = parse_news(paths.news_jsonl);
    ds.summary.articles_parsed = raw_articles.size();
    for (const auto& article : raw_articles) {
        if (static_cast<int>(article.tagged_companies.size()) > 4) {
            ++ds.summary.articles_rejected_too_many_tags;
            continue;
        }
        auto kept = filter_tags(article, aliases);
        if (!kept) {
            ++ds.summary.articles_rejected_no_tag_match;
            continue;
        }
        ds.articles.push_back(std::move(*kept));
    }
    ds.summary.articles_kept = ds.articles.size();

    std::unordered_set<std::string> known;
    for (const auto& a : ds.articles) known.insert(a.article_id);

    auto clicks = parse_clicks(paths.clicks_csv, cal);
    ds.summary.click_rows = clicks.events.size();
    ds.summary.click_rows_dropped_out_of_session = clicks.dropped_out_of_session;
    for (auto& ev : clicks.events) {
        if (!known.count(ev.article_id)) {
            ++ds.summary.click_rows_unknown_article;
            continue;
        }
        ds.click_events.push_back(std::move(ev));
    }
    for (auto& row : clicks.grid) {
        if (!known.count(row.article_id)) continue;  // counted once via the event pass
        ds.click_grid.push_back(std::move(row));
    }
    return ds;
}

}  // namespace newsflow

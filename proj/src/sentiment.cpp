#include "newsflow/sentiment.hpp"

#include <cctype>
#include <fstream>

#include "newsflow/errors.hpp"

namespace newsflow {

Lexicon Lexicon::from_file(const std::string& path, const std::string& provenance) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open lexicon: " + path);
    Lexicon lex;
    lex.provenance = provenance;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw DataError(path + ":" + std::to_string(line_no) + ": expected 'token,valence'");
        }
        std::string token = line.substr(0, comma);
        for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (token.empty() || token.find_first_of(" \t") != std::string::npos) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad token '" + token + "'");
        }
        int valence = 0;
        try {
            valence = std::stoi(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw DataError(path + ":" + std::to_string(line_no) + ": bad valence");
        }
        if (valence == 0) {
            throw DataError(path + ":" + std::to_string(line_no) + ": zero valence not allowed");
        }
        lex.entries[token] = valence;
    }
    return lex;
}

std::vector<std::string> tokenize(const std::string& title) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : title) {
        const bool keep = std::isalnum(c) || c >= 0x80;  // pass UTF-8 continuation bytes through
        if (keep) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

SentimentScore score_title(const std::string& title, const Lexicon& lex) {
    SentimentScore score;
    for (const auto& token : tokenize(title)) {
        auto it = lex.entries.find(token);
        if (it == lex.entries.end()) continue;
        if (it->second > 0) {
            ++score.pos_hits;
        } else {
            ++score.neg_hits;
        }
    }
    const int diff = score.pos_hits - score.neg_hits;
    score.sign = (diff > 0) - (diff < 0);
    return score;
}

Lexicon merge_lexicons(const Lexicon& general, const Lexicon& financial) {
    Lexicon merged;
    merged.provenance = "merged";
    merged.entries = general.entries;
    for (const auto& [token, valence] : financial.entries) merged.entries[token] = valence;
    return merged;
}

double agreement_fraction(const Lexicon& a, const Lexicon& b,
                          const std::vector<std::string>& titles) {
    if (titles.empty()) throw InsufficientDataError("agreement harness needs a corpus");
    std::size_t same = 0;
    for (const auto& t : titles) {
        if (score_title(t, a).sign == score_title(t, b).sign) ++same;
    }
    return static_cast<double>(same) / static_cast<double>(titles.size());
}

}  // namespace newsflow

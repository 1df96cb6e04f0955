#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace newsflow {

// Token -> nonzero integer valence. Tokens are single lowercase words.
struct Lexicon {
    std::unordered_map<std::string, int> entries;
    std::string provenance;  // "general" | "financial" | "merged"

    static Lexicon from_file(const std::string& path, const std::string& provenance);
};

struct SentimentScore {
    int sign = 0;  // -1, 0, +1
    int pos_hits = 0;
    int neg_hits = 0;
};

// Unicode-agnostic split on non-alphanumeric bytes, lowercased. Multi-byte
// UTF-8 sequences are kept intact inside tokens.
std::vector<std::string> tokenize(const std::string& title);

// Counts positive/negative token hits; the sign is sign(pos - neg).
SentimentScore score_title(const std::string& title, const Lexicon& lex);

// Union of entries; the financial valence wins on conflicts.
Lexicon merge_lexicons(const Lexicon& general, const Lexicon& financial);

// Fraction of headlines classified with the same sign by both lexicons.
double agreement_fraction(const Lexicon& a, const Lexicon& b,
                          const std::vector<std::string>& titles);

}  // namespace newsflow

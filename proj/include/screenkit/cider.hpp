#pragma once

#include <string>
#include <unordered_map>
#include <vector>

namespace screenkit {

inline constexpr int kCiderMaxN = 4;
inline constexpr double kCiderSigma = 6.0;

struct CaptionItem {
    std::string prediction;
    std::vector<std::string> references;  // at least one
};

// Document frequencies over stemmed n-grams of the reference sides. Built
// from a scoring corpus, or supplied externally when scoring fewer than two
// items (IDF of a single-item corpus is degenerate).
struct CiderDocFreq {
    std::unordered_map<std::string, double> df;
    double log_corpus_size = 0.0;

    static CiderDocFreq build(const std::vector<CaptionItem>& items);
};

struct CiderResult {
    double corpus_score = 0.0;        // mean over items, range [0, 10]
    std::vector<double> per_item;
};

// CIDEr-D: TF-IDF vectors over stemmed n-grams (n = 1..4) with clipped
// counts and a Gaussian length penalty (sigma = 6); cosine similarities
// averaged over n and references, times 10.
CiderResult cider(const std::vector<CaptionItem>& items);  // needs >= 2 items
CiderResult cider(const std::vector<CaptionItem>& items, const CiderDocFreq& doc_freq);

// Lowercased, whitespace-split, Porter-stemmed tokens.
std::vector<std::string> cider_tokens(std::string_view caption);

}  // namespace screenkit

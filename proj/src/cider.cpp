#include "screenkit/cider.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "screenkit/errors.hpp"
#include "screenkit/text_norm.hpp"

namespace screenkit {

std::vector<std::string> cider_tokens(std::string_view caption) {
    std::vector<std::string> tokens = split_ws(ascii_lower(caption));
    for (auto& t : tokens) t = porter_stem(t);
    return tokens;
}

namespace {

using NgramCounts = std::unordered_map<std::string, int>;

NgramCounts count_ngrams(const std::vector<std::string>& tokens) {
    NgramCounts counts;
    for (int n = 1; n <= kCiderMaxN; ++n) {
        if (tokens.size() < static_cast<std::size_t>(n)) break;
        for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
            std::string key = tokens[i];
            for (int k = 1; k < n; ++k) {
                key += ' ';
                key += tokens[i + k];
            }
            ++counts[key];
        }
    }
    return counts;
}

int ngram_order(const std::string& key) {
    return 1 + static_cast<int>(std::count(key.begin(), key.end(), ' '));
}

struct TfIdfVec {
    std::array<std::unordered_map<std::string, double>, kCiderMaxN> weights;
    std::array<double, kCiderMaxN> norm{};
    double length = 0.0;  // token count, used only through the delta
};

TfIdfVec to_vec(const std::vector<std::string>& tokens, const CiderDocFreq& doc_freq) {
    TfIdfVec vec;
    vec.length = static_cast<double>(tokens.size());
    for (const auto& [key, tf] : count_ngrams(tokens)) {
        const int n = ngram_order(key) - 1;
        auto it = doc_freq.df.find(key);
        const double df = it != doc_freq.df.end() ? it->second : 0.0;
        const double idf = doc_freq.log_corpus_size - std::log(std::max(1.0, df));
        const double w = static_cast<double>(tf) * idf;
        vec.weights[n][key] = w;
        vec.norm[n] += w * w;
    }
    for (double& v : vec.norm) v = std::sqrt(v);
    return vec;
}

std::array<double, kCiderMaxN> similarity(const TfIdfVec& hyp, const TfIdfVec& ref) {
    std::array<double, kCiderMaxN> val{};
    const double delta = hyp.length - ref.length;
    const double penalty = std::exp(-(delta * delta) / (2.0 * kCiderSigma * kCiderSigma));
    for (int n = 0; n < kCiderMaxN; ++n) {
        double dot = 0.0;
        for (const auto& [key, w] : hyp.weights[n]) {
            auto it = ref.weights[n].find(key);
            if (it == ref.weights[n].end()) continue;
            dot += std::min(w, it->second) * it->second;  // clipped hypothesis counts
        }
        if (hyp.norm[n] != 0.0 && ref.norm[n] != 0.0) dot /= hyp.norm[n] * ref.norm[n];
        val[n] = dot * penalty;
    }
    return val;
}

void validate_items(const std::vector<CaptionItem>& items) {
    if (items.empty()) throw ValueError("cider needs a non-empty corpus");
    for (const auto& item : items)
        if (item.references.empty()) throw ValueError("cider item has no references");
}

}  // namespace

CiderDocFreq CiderDocFreq::build(const std::vector<CaptionItem>& items) {
    validate_items(items);
    CiderDocFreq out;
    out.log_corpus_size = std::log(static_cast<double>(items.size()));
    for (const auto& item : items) {
        std::set<std::string> seen;
        for (const auto& ref : item.references)
            for (const auto& [key, tf] : count_ngrams(cider_tokens(ref))) seen.insert(key);
        for (const auto& key : seen) out.df[key] += 1.0;
    }
    return out;
}

CiderResult cider(const std::vector<CaptionItem>& items) {
    if (items.size() < 2)
        throw ValueError("cider on fewer than 2 items needs an external document-frequency table");
    return cider(items, CiderDocFreq::build(items));
}

CiderResult cider(const std::vector<CaptionItem>& items, const CiderDocFreq& doc_freq) {
    validate_items(items);
    CiderResult out;
    out.per_item.reserve(items.size());
    for (const auto& item : items) {
        const TfIdfVec hyp = to_vec(cider_tokens(item.prediction), doc_freq);
        std::array<double, kCiderMaxN> acc{};
        for (const auto& ref : item.references) {
            const auto val = similarity(hyp, to_vec(cider_tokens(ref), doc_freq));
            for (int n = 0; n < kCiderMaxN; ++n) acc[n] += val[n];
        }
        double score = 0.0;
        for (int n = 0; n < kCiderMaxN; ++n) score += acc[n];
        score /= kCiderMaxN;
        score /= static_cast<double>(item.references.size());
        out.per_item.push_back(score * 10.0);
    }
    double sum = 0.0;
    for (double s : out.per_item) sum += s;
    out.corpus_score = sum / static_cast<double>(out.per_item.size());
    return out;
}

}  // namespace screenkit

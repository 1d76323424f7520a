#include "screenkit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "screenkit/text_norm.hpp"

namespace screenkit {

void PrfCounts::finalize() {
    precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    f1 = precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

namespace {

// O(n^3) assignment by successive shortest augmenting paths with potentials
// (Hungarian algorithm, 1-based bookkeeping). Returns the column assigned to
// each row, minimizing total cost.
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0);  // column -> row
    std::vector<int> way(n + 1, 0);

    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j] > 0) row_to_col[match[j] - 1] = j - 1;
    return row_to_col;
}

double token_bag_f1(const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
    if (pred.empty() || gold.empty()) return pred.empty() && gold.empty() ? 1.0 : 0.0;
    std::unordered_map<std::string, int> gold_counts;
    for (const auto& t : gold) ++gold_counts[t];
    std::size_t common = 0;
    for (const auto& t : pred) {
        auto it = gold_counts.find(t);
        if (it != gold_counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) return 0.0;
    const double p = static_cast<double>(common) / static_cast<double>(pred.size());
    const double r = static_cast<double>(common) / static_cast<double>(gold.size());
    return 2.0 * p * r / (p + r);
}

}  // namespace

DetectionMetrics match_detections(const std::vector<LabeledBox>& pred,
                                  const std::vector<LabeledBox>& gold, double iou_threshold) {
    // Group indices per class; matching is per class, never global.
    std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> classes;
    for (std::size_t i = 0; i < pred.size(); ++i) classes[pred[i].first.name()].first.push_back(i);
    for (std::size_t i = 0; i < gold.size(); ++i) classes[gold[i].first.name()].second.push_back(i);

    DetectionMetrics out;
    for (const auto& [cls, split] : classes) {
        const auto& p_idx = split.first;
        const auto& g_idx = split.second;
        PrfCounts& counts = out.per_class[cls];

        const std::size_t n = std::max(p_idx.size(), g_idx.size());
        if (n > 0 && !p_idx.empty() && !g_idx.empty()) {
            // Edge weight big + IoU for pairs above threshold so cardinality
            // dominates, total IoU breaks ties. Solved as min-cost with
            // negated weights; dummy/invalid cells cost 0.
            const double big = static_cast<double>(n) + 1.0;
            std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
            for (std::size_t a = 0; a < p_idx.size(); ++a) {
                for (std::size_t b = 0; b < g_idx.size(); ++b) {
                    const double v = iou(pred[p_idx[a]].second, gold[g_idx[b]].second);
                    if (v >= iou_threshold) cost[a][b] = -(big + v);
                }
            }
            const std::vector<int> row_to_col = min_cost_assignment(cost);
            for (std::size_t a = 0; a < p_idx.size(); ++a) {
                const int b = row_to_col[a];
                if (b < 0 || static_cast<std::size_t>(b) >= g_idx.size()) continue;
                const double v =
                    iou(pred[p_idx[a]].second, gold[g_idx[static_cast<std::size_t>(b)]].second);
                if (v >= iou_threshold) {
                    ++counts.tp;
                    out.matches.push_back({p_idx[a], g_idx[static_cast<std::size_t>(b)], v});
                }
            }
        }
        counts.fp = p_idx.size() - counts.tp;
        counts.fn = g_idx.size() - counts.tp;
        counts.finalize();
        out.overall.tp += counts.tp;
        out.overall.fp += counts.fp;
        out.overall.fn += counts.fn;
    }
    out.overall.finalize();
    std::sort(out.matches.begin(), out.matches.end(),
              [](const MatchedPair& a, const MatchedPair& b) { return a.pred_index < b.pred_index; });
    return out;
}

int acc_at_iou(const std::optional<QuantBox>& pred, const QuantBox& gold, double threshold) {
    if (!pred) return 0;
    return iou(*pred, gold) >= threshold ? 1 : 0;
}

double squad_f1(std::string_view prediction, const std::vector<std::string>& candidates) {
    if (candidates.empty()) throw ValueError("squad_f1 needs at least one candidate answer");
    const std::vector<std::string> pred_tokens = squad_tokens(prediction);
    double best = 0.0;
    for (const auto& c : candidates) best = std::max(best, token_bag_f1(pred_tokens, squad_tokens(c)));
    return best;
}

double anls(std::string_view prediction, const std::vector<std::string>& golds, double tau) {
    if (golds.empty()) throw ValueError("anls needs at least one gold answer");
    const std::string p = ascii_lower(trim_ws(prediction));
    double best = 0.0;
    for (const auto& gold : golds) {
        const std::string g = ascii_lower(trim_ws(gold));
        const std::size_t longest = std::max(p.size(), g.size());
        const double nl =
            longest == 0 ? 0.0 : static_cast<double>(levenshtein(p, g)) / static_cast<double>(longest);
        best = std::max(best, nl < tau ? 1.0 - nl : 0.0);
    }
    return best;
}

int relaxed_accuracy(std::string_view prediction, std::string_view gold) {
    const std::optional<double> p = parse_number(prediction);
    const std::optional<double> g = parse_number(gold);
    if (p && g) {
        if (*g == 0.0) return *p == 0.0 ? 1 : 0;
        return std::abs(*p - *g) <= 0.05 * std::abs(*g) ? 1 : 0;
    }
    return ascii_lower(trim_ws(prediction)) == ascii_lower(trim_ws(gold)) ? 1 : 0;
}

int exact_match(std::string_view prediction, std::string_view gold, bool fold_case) {
    if (!fold_case) return prediction == gold ? 1 : 0;
    return ascii_lower(prediction) == ascii_lower(gold) ? 1 : 0;
}

double aggregate_score(const std::map<std::string, double>& variant,
                       const std::map<std::string, double>& baseline) {
    if (variant.empty()) throw ValueError("aggregate_score needs at least one task");
    if (variant.size() != baseline.size()) throw ValueError("aggregate_score task keys differ");
    double log_sum = 0.0;
    bool zero = false;
    for (const auto& [task, score] : variant) {
        auto it = baseline.find(task);
        if (it == baseline.end()) throw ValueError("aggregate_score missing baseline for task: " + task);
        if (!(it->second > 0)) throw ValueError("aggregate_score baseline must be positive: " + task);
        const double ratio = score / it->second;
        if (ratio < 0) throw ValueError("aggregate_score ratio is negative: " + task);
        if (ratio == 0) zero = true;
        else log_sum += std::log(ratio);
    }
    if (zero) return 0.0;
    return std::exp(log_sum / static_cast<double>(variant.size()));
}

}  // namespace screenkit

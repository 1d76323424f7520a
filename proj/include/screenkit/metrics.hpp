#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "screenkit/geometry.hpp"
#include "screenkit/schema.hpp"

namespace screenkit {

inline constexpr double kDetectionIouThreshold = 0.1;

using LabeledBox = std::pair<ElementClass, QuantBox>;

struct MatchedPair {
    std::size_t pred_index = 0;
    std::size_t gold_index = 0;
    double iou = 0.0;
};

struct PrfCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;

    void finalize();
};

struct DetectionMetrics {
    PrfCounts overall;  // micro-averaged across classes
    std::map<std::string, PrfCounts> per_class;
    std::vector<MatchedPair> matches;  // indices into the original lists
};

// Per class, the one-to-one matching that maximizes the number of pairs with
// IoU >= threshold; among maximum matchings, the one with the largest total
// IoU (solved as an assignment problem).
DetectionMetrics match_detections(const std::vector<LabeledBox>& pred,
                                  const std::vector<LabeledBox>& gold,
                                  double iou_threshold = kDetectionIouThreshold);

// 1 iff the single predicted box reaches the IoU threshold; a missing
// prediction scores 0.
int acc_at_iou(const std::optional<QuantBox>& pred, const QuantBox& gold,
               double threshold = kDetectionIouThreshold);

// Token-bag F1 with multiplicity after SQuAD normalization; maximum over the
// candidate answers. Throws ValueError on an empty candidate list.
double squad_f1(std::string_view prediction, const std::vector<std::string>& candidates);

// Normalized Levenshtein similarity, max over golds: s = 1 - NL when
// NL < tau, else 0, with NL = edit distance / max length after lowercasing.
double anls(std::string_view prediction, const std::vector<std::string>& golds, double tau = 0.5);

// Numeric answers match within 5% relative tolerance (exact when gold is 0);
// non-numeric answers by case-insensitive string equality. One trailing '%'
// is stripped before numeric parsing.
int relaxed_accuracy(std::string_view prediction, std::string_view gold);

// Strict string equality; optional ASCII case folding.
int exact_match(std::string_view prediction, std::string_view gold, bool fold_case = false);

// Geometric mean of variant/baseline per-task ratios. Throws ValueError on a
// key mismatch or non-positive baseline score.
double aggregate_score(const std::map<std::string, double>& variant,
                       const std::map<std::string, double>& baseline);

}  // namespace screenkit

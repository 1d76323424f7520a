#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "screenkit/metrics.hpp"

namespace screenkit {

// One line of evaluation input: {id, task, prediction, gold |
// gold_candidates | gold_boxes | pred_boxes, variant/baseline for the
// aggregate score}.
struct EvalRecord {
    std::string id;
    std::string task;
    std::optional<std::string> prediction;
    std::optional<std::string> gold;
    std::vector<std::string> gold_candidates;
    std::vector<LabeledBox> pred_boxes;
    std::vector<LabeledBox> gold_boxes;
    std::optional<double> variant_score;
    std::optional<double> baseline_score;
};

EvalRecord eval_record_from_json(const nlohmann::json& j,
                                 CoordOrder order = CoordOrder::ymin_xmin_ymax_xmax);
EvalRecord parse_eval_record(std::string_view line,
                             CoordOrder order = CoordOrder::ymin_xmin_ymax_xmax);

struct MetricReport {
    std::string metric;
    double score = 0.0;
    std::size_t sample_count = 0;
    std::optional<std::vector<double>> per_sample;
    nlohmann::json details = nlohmann::json::object();
};

nlohmann::json metric_report_to_json(const MetricReport& report);

enum class EvalMode {
    serial,    // reference implementation
    parallel,  // OpenMP per-item map, same deterministic reduce
};

struct EvalOptions {
    EvalMode mode = EvalMode::serial;
    double iou_threshold = kDetectionIouThreshold;
    double anls_tau = 0.5;
    bool fold_case = false;      // exact_match only
    bool per_sample = false;     // include per-sample scores in the report
};

// Metric names: anls, squad_f1, relaxed_accuracy, exact_match, cider,
// detection_f1, acc_at_iou, aggregate.
const std::vector<std::string>& supported_metrics();

// Scores the corpus under the named metric. The per-item map may run under
// OpenMP; the reduce is a fixed-order fold, so both modes give bit-identical
// results. Records are validated up front; a record missing a field the
// metric needs raises ValueError.
MetricReport evaluate_corpus(const std::vector<EvalRecord>& records, const std::string& metric,
                             const EvalOptions& opts = {});

}  // namespace screenkit

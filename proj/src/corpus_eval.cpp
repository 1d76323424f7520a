#include "screenkit/corpus_eval.hpp"

#include <algorithm>
#include <map>

#include "screenkit/cider.hpp"

namespace screenkit {

namespace {

std::vector<LabeledBox> boxes_from_json(const nlohmann::json& arr, CoordOrder order,
                                        const char* field) {
    if (!arr.is_array()) throw ParseError(std::string(field) + " must be an array");
    std::vector<LabeledBox> out;
    for (const auto& entry : arr) {
        if (!entry.is_object() || !entry.contains("box"))
            throw ParseError(std::string(field) + " entry needs a 'box'");
        const auto& box = entry.at("box");
        if (!box.is_array() || box.size() != 4)
            throw ParseError(std::string(field) + " box must have 4 integers");
        std::array<int, 4> coords{};
        for (std::size_t i = 0; i < 4; ++i) {
            if (!box[i].is_number_integer()) throw ParseError("box coordinate must be an integer");
            coords[i] = box[i].get<int>();
        }
        std::string cls = entry.value("class", std::string("BOX"));
        try {
            out.emplace_back(ElementClass{std::move(cls)}, box_from_coords(coords, order));
        } catch (const ValueError& e) {
            throw ParseError(std::string(field) + ": " + e.what());
        }
    }
    return out;
}

// Per-record scalar scorers share this shape so the serial and OpenMP paths
// are one code path with two schedules.
template <typename Fn>
std::vector<double> map_records(std::size_t n, EvalMode mode, Fn&& score) {
    std::vector<double> out(n);
    if (mode == EvalMode::parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (long long i = 0; i < static_cast<long long>(n); ++i)
            out[static_cast<std::size_t>(i)] = score(static_cast<std::size_t>(i));
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = score(i);
    }
    return out;
}

double mean(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;  // fixed-order fold
    return sum / static_cast<double>(values.size());
}

const std::string& require_prediction(const EvalRecord& r) {
    if (!r.prediction) throw ValueError("record '" + r.id + "' has no prediction");
    return *r.prediction;
}

std::vector<std::string> gold_list(const EvalRecord& r) {
    if (!r.gold_candidates.empty()) return r.gold_candidates;
    if (r.gold) return {*r.gold};
    throw ValueError("record '" + r.id + "' has no gold or gold_candidates");
}

const std::string& require_gold(const EvalRecord& r) {
    if (!r.gold) throw ValueError("record '" + r.id + "' has no gold");
    return *r.gold;
}

MetricReport scalar_report(const std::string& metric, std::vector<double> per_sample,
                           const EvalOptions& opts) {
    MetricReport report;
    report.metric = metric;
    report.sample_count = per_sample.size();
    report.score = mean(per_sample);
    if (opts.per_sample) report.per_sample = std::move(per_sample);
    return report;
}

nlohmann::json prf_json(const PrfCounts& c) {
    return {{"tp", c.tp},        {"fp", c.fp},         {"fn", c.fn},
            {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}};
}

}  // namespace

EvalRecord eval_record_from_json(const nlohmann::json& j, CoordOrder order) try {
    if (!j.is_object()) throw ParseError("eval record must be a JSON object");
    EvalRecord r;
    r.id = j.value("id", std::string{});
    r.task = j.value("task", std::string{});
    if (j.contains("prediction")) r.prediction = j.at("prediction").get<std::string>();
    if (j.contains("gold")) r.gold = j.at("gold").get<std::string>();
    if (j.contains("gold_candidates")) {
        if (!j.at("gold_candidates").is_array())
            throw ParseError("gold_candidates must be an array");
        for (const auto& c : j.at("gold_candidates")) r.gold_candidates.push_back(c.get<std::string>());
    }
    if (j.contains("pred_boxes")) r.pred_boxes = boxes_from_json(j.at("pred_boxes"), order, "pred_boxes");
    if (j.contains("gold_boxes")) r.gold_boxes = boxes_from_json(j.at("gold_boxes"), order, "gold_boxes");
    if (j.contains("variant")) r.variant_score = j.at("variant").get<double>();
    if (j.contains("baseline")) r.baseline_score = j.at("baseline").get<double>();
    return r;
} catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("eval record: ") + e.what());
}

EvalRecord parse_eval_record(std::string_view line, CoordOrder order) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("eval record line is not valid JSON");
    return eval_record_from_json(j, order);
}

nlohmann::json metric_report_to_json(const MetricReport& report) {
    nlohmann::json body{{"score", report.score}, {"sample_count", report.sample_count}};
    if (report.per_sample) body["per_sample"] = *report.per_sample;
    if (!report.details.empty()) body["details"] = report.details;
    return nlohmann::json{{report.metric, body}};
}

const std::vector<std::string>& supported_metrics() {
    static const std::vector<std::string> names = {
        "anls",  "squad_f1",     "relaxed_accuracy", "exact_match",
        "cider", "detection_f1", "acc_at_iou",       "aggregate",
    };
    return names;
}

MetricReport evaluate_corpus(const std::vector<EvalRecord>& records, const std::string& metric,
                             const EvalOptions& opts) {
    const std::size_t n = records.size();

    if (metric == "anls" || metric == "squad_f1") {
        std::vector<std::pair<std::string, std::vector<std::string>>> pairs(n);
        for (std::size_t i = 0; i < n; ++i)
            pairs[i] = {require_prediction(records[i]), gold_list(records[i])};
        auto score = [&](std::size_t i) {
            return metric == "anls" ? anls(pairs[i].first, pairs[i].second, opts.anls_tau)
                                    : squad_f1(pairs[i].first, pairs[i].second);
        };
        return scalar_report(metric, map_records(n, opts.mode, score), opts);
    }

    if (metric == "relaxed_accuracy" || metric == "exact_match") {
        for (const auto& r : records) {
            require_prediction(r);
            require_gold(r);
        }
        auto score = [&](std::size_t i) -> double {
            const EvalRecord& r = records[i];
            return metric == "relaxed_accuracy"
                       ? relaxed_accuracy(*r.prediction, *r.gold)
                       : exact_match(*r.prediction, *r.gold, opts.fold_case);
        };
        return scalar_report(metric, map_records(n, opts.mode, score), opts);
    }

    if (metric == "acc_at_iou") {
        for (const auto& r : records) {
            if (r.gold_boxes.size() != 1)
                throw ValueError("record '" + r.id + "' needs exactly one gold box");
            if (r.pred_boxes.size() > 1)
                throw ValueError("record '" + r.id + "' has more than one predicted box");
        }
        auto score = [&](std::size_t i) -> double {
            const EvalRecord& r = records[i];
            std::optional<QuantBox> pred;
            if (!r.pred_boxes.empty()) pred = r.pred_boxes.front().second;
            return acc_at_iou(pred, r.gold_boxes.front().second, opts.iou_threshold);
        };
        return scalar_report(metric, map_records(n, opts.mode, score), opts);
    }

    if (metric == "detection_f1") {
        std::vector<DetectionMetrics> per_record(n);
        if (opts.mode == EvalMode::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
            for (long long i = 0; i < static_cast<long long>(n); ++i) {
                const auto idx = static_cast<std::size_t>(i);
                per_record[idx] = match_detections(records[idx].pred_boxes, records[idx].gold_boxes,
                                                   opts.iou_threshold);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i)
                per_record[i] =
                    match_detections(records[i].pred_boxes, records[i].gold_boxes, opts.iou_threshold);
        }

        PrfCounts overall;
        std::map<std::string, PrfCounts> per_class;
        std::vector<double> per_sample;
        per_sample.reserve(n);
        for (const auto& m : per_record) {
            overall.tp += m.overall.tp;
            overall.fp += m.overall.fp;
            overall.fn += m.overall.fn;
            for (const auto& [cls, counts] : m.per_class) {
                per_class[cls].tp += counts.tp;
                per_class[cls].fp += counts.fp;
                per_class[cls].fn += counts.fn;
            }
            per_sample.push_back(m.overall.f1);
        }
        overall.finalize();

        MetricReport report;
        report.metric = metric;
        report.sample_count = n;
        report.score = overall.f1;
        report.details = prf_json(overall);
        nlohmann::json classes = nlohmann::json::object();
        for (auto& [cls, counts] : per_class) {
            counts.finalize();
            classes[cls] = prf_json(counts);
        }
        report.details["per_class"] = classes;
        if (opts.per_sample) report.per_sample = std::move(per_sample);
        return report;
    }

    if (metric == "cider") {
        if (n < 2) throw ValueError("cider needs at least 2 corpus items");
        std::vector<CaptionItem> items(n);
        for (std::size_t i = 0; i < n; ++i)
            items[i] = CaptionItem{require_prediction(records[i]), gold_list(records[i])};
        const CiderDocFreq doc_freq = CiderDocFreq::build(items);
        // Per-item scoring through the shared map so both modes stay one path.
        auto score = [&](std::size_t i) {
            return cider({items[i]}, doc_freq).per_item.front();
        };
        std::vector<double> per_sample = map_records(n, opts.mode, score);
        return scalar_report(metric, std::move(per_sample), opts);
    }

    if (metric == "aggregate") {
        std::map<std::string, double> variant;
        std::map<std::string, double> baseline;
        for (const auto& r : records) {
            if (r.task.empty()) throw ValueError("aggregate record needs a task name");
            if (!r.variant_score || !r.baseline_score)
                throw ValueError("record '" + r.id + "' needs variant and baseline scores");
            if (!variant.emplace(r.task, *r.variant_score).second)
                throw ValueError("duplicate task in aggregate input: " + r.task);
            baseline.emplace(r.task, *r.baseline_score);
        }
        MetricReport report;
        report.metric = metric;
        report.sample_count = variant.size();
        report.score = aggregate_score(variant, baseline);
        return report;
    }

    throw ValueError("unknown metric: " + metric);
}

}  // namespace screenkit

#include "screenkit/mixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "screenkit/hash.hpp"
#include "screenkit/navigation.hpp"
#include "screenkit/rng.hpp"
#include "screenkit/schema.hpp"

namespace screenkit {

std::string to_string(TaskType t) {
    switch (t) {
        case TaskType::screen_annotation: return "screen_annotation";
        case TaskType::screen_qa: return "screen_qa";
        case TaskType::screen_navigation: return "screen_navigation";
        case TaskType::screen_summarization: return "screen_summarization";
        case TaskType::doc_vqa_page: return "doc_vqa_page";
    }
    return "screen_qa";
}

TaskType task_type_from_string(const std::string& name) {
    if (name == "screen_annotation") return TaskType::screen_annotation;
    if (name == "screen_qa") return TaskType::screen_qa;
    if (name == "screen_navigation") return TaskType::screen_navigation;
    if (name == "screen_summarization") return TaskType::screen_summarization;
    if (name == "doc_vqa_page") return TaskType::doc_vqa_page;
    throw ParseError("unknown task_type: " + name);
}

nlohmann::json task_record_to_json(const TaskRecord& r) {
    return nlohmann::json{{"task_type", to_string(r.task_type)},
                          {"image_ref", r.image_ref},
                          {"input_text", r.input_text},
                          {"target_text", r.target_text},
                          {"metadata", r.metadata}};
}

TaskRecord task_record_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ParseError("task record must be a JSON object");
    for (const char* key : {"task_type", "image_ref", "input_text", "target_text"})
        if (!j.contains(key)) throw ParseError(std::string("task record missing field: ") + key);

    TaskRecord r;
    try {
        r.task_type = task_type_from_string(j.at("task_type").get<std::string>());
        r.image_ref = j.at("image_ref").get<std::string>();
        r.input_text = j.at("input_text").get<std::string>();
        r.target_text = j.at("target_text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("task record: ") + e.what());
    }
    if (j.contains("metadata")) {
        if (!j.at("metadata").is_object()) throw ParseError("task record metadata must be an object");
        r.metadata = j.at("metadata");
    }

    if (r.task_type == TaskType::screen_navigation && !parse_click_text(r.target_text))
        throw ParseError("navigation target is not 'click INT INT INT INT': " + r.target_text);
    if (r.task_type == TaskType::screen_annotation) {
        try {
            parse_schema(r.target_text);
        } catch (const ParseError& e) {
            throw ParseError(std::string("annotation target is not valid schema text: ") + e.what());
        }
    }
    return r;
}

std::string serialize_task_record(const TaskRecord& r) { return task_record_to_json(r).dump(); }

TaskRecord parse_task_record(std::string_view line) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError("task record line is not valid JSON");
    return task_record_from_json(j);
}

std::map<std::string, double> compute_weights(const MixtureSpec& spec) {
    const std::size_t n = spec.entries.size();
    if (n == 0) throw ValueError("mixture spec has no tasks");
    if (!(spec.cap > 0.0 && spec.cap <= 1.0)) throw ValueError("mixture cap must be in (0,1]");
    if (spec.cap * static_cast<double>(n) < 1.0)
        throw ValueError("infeasible cap: cap * #tasks < 1");

    std::set<std::string> names;
    for (const auto& e : spec.entries) {
        if (e.size == 0) throw ValueError("mixture task size must be positive: " + e.task);
        if (!names.insert(e.task).second) throw ValueError("duplicate mixture task: " + e.task);
    }

    // Water-filling: proportional shares, clamp anything above the cap, then
    // re-share the remaining mass among the unclamped until nothing clamps.
    std::vector<double> weight(n, 0.0);
    std::vector<bool> clamped(n, false);
    while (true) {
        double free_mass = 1.0;
        double free_size = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (clamped[i]) free_mass -= spec.cap;
            else free_size += static_cast<double>(spec.entries[i].size);
        }
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            if (clamped[i]) {
                weight[i] = spec.cap;
                continue;
            }
            weight[i] = free_size > 0.0
                            ? free_mass * static_cast<double>(spec.entries[i].size) / free_size
                            : 0.0;
            if (weight[i] > spec.cap) {
                clamped[i] = true;
                changed = true;
            }
        }
        if (!changed) break;
    }

    std::map<std::string, double> out;
    for (std::size_t i = 0; i < n; ++i) out[spec.entries[i].task] = weight[i];
    return out;
}

void sample_mixture(const MixtureSpec& spec, const std::map<std::string, double>& weights,
                    const std::vector<std::vector<TaskRecord>>& sources, std::size_t n,
                    std::uint64_t seed, const std::function<void(const TaskRecord&)>& emit) {
    if (sources.size() != spec.entries.size())
        throw ValueError("sample_mixture: one source list per spec entry required");

    std::vector<double> cumulative;
    cumulative.reserve(spec.entries.size());
    double total = 0.0;
    for (std::size_t i = 0; i < spec.entries.size(); ++i) {
        auto it = weights.find(spec.entries[i].task);
        if (it == weights.end()) throw ValueError("missing weight for task: " + spec.entries[i].task);
        if (it->second < 0.0) throw ValueError("negative weight for task: " + spec.entries[i].task);
        if (it->second > 0.0 && sources[i].empty())
            throw ValueError("empty source for weighted task: " + spec.entries[i].task);
        total += it->second;
        cumulative.push_back(total);
    }
    if (!(total > 0.0)) throw ValueError("mixture weights sum to zero");

    std::mt19937_64 gen(seed);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = unit_double(gen) * total;
        // upper_bound so zero-width (zero-weight) intervals can never be hit
        std::size_t task = static_cast<std::size_t>(
            std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
        if (task >= sources.size()) task = sources.size() - 1;
        while (sources[task].empty()) --task;  // u rounded onto a trailing zero-weight task
        const std::uint64_t idx = bounded_u64(gen, sources[task].size());
        emit(sources[task][static_cast<std::size_t>(idx)]);
    }
}

std::vector<TaskRecord> load_task_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValueError("cannot open task record file: " + path);
    std::vector<TaskRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            out.push_back(parse_task_record(line));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

namespace {

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "missing";
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64_hex(buf.str());
}

}  // namespace

nlohmann::json mixture_manifest(const MixtureSpec& spec,
                                const std::map<std::string, double>& weights,
                                std::uint64_t seed) {
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& e : spec.entries) {
        tasks.push_back({{"task", e.task},
                         {"size", e.size},
                         {"source", e.source_path},
                         {"weight", weights.at(e.task)},
                         {"checksum_fnv1a64", file_checksum(e.source_path)}});
    }
    return nlohmann::json{{"cap", spec.cap}, {"seed", seed}, {"tasks", tasks}};
}

std::vector<PagePair> build_mpdocvqa_pairs(const std::string& question, const std::string& answer,
                                           const std::vector<std::string>& pages,
                                           std::size_t answer_page_index, double neg_keep_prob,
                                           std::uint64_t seed) {
    if (answer_page_index >= pages.size()) throw ValueError("answer page index out of range");
    if (!(neg_keep_prob >= 0.0 && neg_keep_prob <= 1.0))
        throw ValueError("neg_keep_prob must be in [0,1]");

    std::mt19937_64 gen(seed);
    std::vector<PagePair> out;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        if (i == answer_page_index) {
            out.push_back({question, pages[i], answer, PagePair::Polarity::positive});
        } else {
            const double u = unit_double(gen);
            if (u < neg_keep_prob)
                out.push_back({question, pages[i], kNoAnswerMarker, PagePair::Polarity::negative});
        }
    }
    return out;
}

std::string score_mpdocvqa(const std::vector<std::pair<std::string, double>>& page_predictions) {
    if (page_predictions.empty()) throw ValueError("score_mpdocvqa needs at least one prediction");
    const std::string* best = nullptr;
    double best_score = 0.0;
    for (const auto& [answer, score] : page_predictions) {
        if (answer == kNoAnswerMarker) continue;
        if (!best || score > best_score) {
            best = &answer;
            best_score = score;
        }
    }
    return best ? *best : kNoAnswerMarker;
}

}  // namespace screenkit

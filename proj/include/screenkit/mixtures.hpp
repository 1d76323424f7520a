#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "screenkit/errors.hpp"

namespace screenkit {

// Target text of negative MPDocVQA page pairs, and the fallback answer when
// every page abstains.
inline constexpr const char* kNoAnswerMarker = "no answer";

enum class TaskType {
    screen_annotation,
    screen_qa,
    screen_navigation,
    screen_summarization,
    doc_vqa_page,
};

std::string to_string(TaskType t);
TaskType task_type_from_string(const std::string& name);  // throws ParseError

// Unified training/eval sample. Metadata is an open map: unknown keys are
// preserved through round trips.
struct TaskRecord {
    TaskType task_type = TaskType::screen_qa;
    std::string image_ref;
    std::string input_text;
    std::string target_text;
    nlohmann::json metadata = nlohmann::json::object();

    bool operator==(const TaskRecord&) const = default;
};

nlohmann::json task_record_to_json(const TaskRecord& r);
// Validates task-specific target formats: navigation targets must parse as
// "click INT INT INT INT", annotation targets as schema text.
TaskRecord task_record_from_json(const nlohmann::json& j);

std::string serialize_task_record(const TaskRecord& r);  // one JSONL line, no newline
TaskRecord parse_task_record(std::string_view line);

struct MixtureEntry {
    std::string task;
    std::uint64_t size = 0;       // dataset size used for weighting
    std::string source_path;      // JSONL of TaskRecords
};

struct MixtureSpec {
    std::vector<MixtureEntry> entries;
    double cap = 0.15;  // maximum weight fraction per task
};

// Size-proportional weights, water-filled under the cap: clamp any weight
// above the cap, re-share the remainder proportionally among the unclamped
// tasks, repeat to fixed point. Weights sum to 1, none exceeds the cap.
std::map<std::string, double> compute_weights(const MixtureSpec& spec);

// n records drawn task-first by weight, then uniformly within the task.
// Deterministic per seed.
void sample_mixture(const MixtureSpec& spec, const std::map<std::string, double>& weights,
                    const std::vector<std::vector<TaskRecord>>& sources, std::size_t n,
                    std::uint64_t seed, const std::function<void(const TaskRecord&)>& emit);

std::vector<TaskRecord> load_task_records(const std::string& path);

// Manifest describing a sampled mixture: spec, resolved weights, cap, seed,
// FNV-1a checksums of the sources.
nlohmann::json mixture_manifest(const MixtureSpec& spec,
                                const std::map<std::string, double>& weights, std::uint64_t seed);

struct PagePair {
    std::string question;
    std::string page_ref;
    std::string answer;  // kNoAnswerMarker on negatives
    enum class Polarity { positive, negative } polarity = Polarity::positive;

    bool operator==(const PagePair&) const = default;
};

// One positive pair for the answer page; every other page kept as a negative
// with probability neg_keep_prob (seeded).
std::vector<PagePair> build_mpdocvqa_pairs(const std::string& question, const std::string& answer,
                                           const std::vector<std::string>& pages,
                                           std::size_t answer_page_index, double neg_keep_prob,
                                           std::uint64_t seed);

// Highest-scoring page answer, ties to the lowest page index. No-answer
// predictions are ignored unless every page predicts no answer.
std::string score_mpdocvqa(const std::vector<std::pair<std::string, double>>& page_predictions);

}  // namespace screenkit

#include "screenkit/taskgen.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <random>
#include <set>
#include <thread>

#include "screenkit/hash.hpp"
#include "screenkit/metrics.hpp"
#include "screenkit/rng.hpp"
#include "screenkit/text_norm.hpp"

namespace screenkit {

// --- templates and rendering ------------------------------------------------

PromptTemplate::PromptTemplate(std::string name_in, std::string body_in,
                               std::vector<std::string> placeholders_in)
    : name(std::move(name_in)), body(std::move(body_in)), placeholders(std::move(placeholders_in)) {
    const std::vector<std::string> found = scan_placeholders(body);
    const std::set<std::string> declared(placeholders.begin(), placeholders.end());
    if (std::set<std::string>(found.begin(), found.end()) != declared)
        throw ValueError("template '" + name + "': declared placeholders do not match the body");
}

std::vector<std::string> scan_placeholders(std::string_view body) {
    std::vector<std::string> out;
    std::set<std::string> seen;
    std::size_t i = 0;
    while (i < body.size()) {
        const char c = body[i];
        if (c == '{') {
            if (i + 1 < body.size() && body[i + 1] == '{') {
                i += 2;
                continue;
            }
            const std::size_t close = body.find('}', i + 1);
            if (close == std::string_view::npos)
                throw ParseError("unterminated placeholder", i);
            std::string name(body.substr(i + 1, close - i - 1));
            if (seen.insert(name).second) out.push_back(std::move(name));
            i = close + 1;
        } else if (c == '}') {
            if (i + 1 < body.size() && body[i + 1] == '}') {
                i += 2;
                continue;
            }
            throw ParseError("unescaped '}'", i);
        } else {
            ++i;
        }
    }
    return out;
}

std::string render_prompt(const PromptTemplate& t,
                          const std::map<std::string, std::string>& bindings) {
    std::string out;
    out.reserve(t.body.size());
    const std::string_view body = t.body;
    std::size_t i = 0;
    while (i < body.size()) {
        const char c = body[i];
        if (c == '{' && i + 1 < body.size() && body[i + 1] == '{') {
            out += '{';
            i += 2;
        } else if (c == '}' && i + 1 < body.size() && body[i + 1] == '}') {
            out += '}';
            i += 2;
        } else if (c == '{') {
            const std::size_t close = body.find('}', i + 1);
            const std::string name(body.substr(i + 1, close - i - 1));
            auto it = bindings.find(name);
            if (it == bindings.end())
                throw ValueError("unbound placeholder in template '" + t.name + "': {" + name + "}");
            out += it->second;
            i = close + 1;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

std::string render_prompt(const PromptTemplate& t, const ScreenSchema& schema,
                          std::map<std::string, std::string> extra) {
    extra.emplace("THE SCREEN SCHEMA", serialize_schema(schema));
    return render_prompt(t, extra);
}

// --- backends ----------------------------------------------------------------

HttpBackend::HttpBackend(std::string url, int timeout_ms)
    : url_(std::move(url)), timeout_ms_(timeout_ms) {
    const std::size_t scheme = url_.find("://");
    const std::size_t host_start = scheme == std::string::npos ? 0 : scheme + 3;
    const std::size_t slash = url_.find('/', host_start);
    if (slash == std::string::npos) {
        base_ = url_;
        path_ = "/";
    } else {
        base_ = url_.substr(0, slash);
        path_ = url_.substr(slash);
    }
}

std::string HttpBackend::complete_text(const CompletionRequest& req) {
    httplib::Client client(base_);
    client.set_connection_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_read_timeout(std::chrono::milliseconds(timeout_ms_));
    client.set_write_timeout(std::chrono::milliseconds(timeout_ms_));

    const nlohmann::json body{{"prompt", req.prompt},
                              {"temperature", req.temperature},
                              {"max_tokens", req.max_tokens}};
    httplib::Result res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw BackendError("backend unreachable: " + url_, /*transient=*/true);
    if (res->status >= 500)
        throw BackendError("backend error " + std::to_string(res->status), /*transient=*/true);
    if (res->status != 200)
        throw BackendError("backend rejected request: " + std::to_string(res->status),
                           /*transient=*/false);
    const nlohmann::json parsed = nlohmann::json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains("text") || !parsed.at("text").is_string())
        throw BackendError("backend response missing 'text'", /*transient=*/false);
    return parsed.at("text").get<std::string>();
}

FileStubBackend::FileStubBackend(const std::string& path) : path_(path) {
    std::ifstream in(path);
    if (!in) throw ValueError("cannot open stub response file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw ValueError("stub response file must be a JSON object: " + path);
    for (const auto& [key, value] : j.items()) {
        if (!value.is_string()) throw ValueError("stub response for key '" + key + "' must be a string");
        responses_[key] = value.get<std::string>();
    }
}

std::string FileStubBackend::request_key(const CompletionRequest& req) {
    return fnv1a64_hex(req.prompt);
}

std::string FileStubBackend::complete_text(const CompletionRequest& req) {
    auto it = responses_.find(request_key(req));
    if (it == responses_.end())
        throw BackendError("no canned response for request key " + request_key(req),
                           /*transient=*/false);
    return it->second;
}

CompletionResult complete(CompletionBackend& backend, const CompletionRequest& req,
                          const RetryPolicy& retry) {
    if (req.max_tokens < 1) throw ValueError("max_tokens must be >= 1");
    if (retry.max_attempts < 1) throw ValueError("max_attempts must be >= 1");

    std::mt19937_64 jitter_gen(retry.jitter_seed);
    for (int attempt = 1;; ++attempt) {
        try {
            return CompletionResult{backend.complete_text(req), backend.id()};
        } catch (const BackendError& e) {
            if (!e.transient()) throw;
            if (attempt >= retry.max_attempts)
                throw BackendError("permanent backend failure after " + std::to_string(attempt) +
                                       " attempts: " + e.what(),
                                   /*transient=*/false);
            const double scale = 1.0 + retry.jitter * unit_double(jitter_gen);
            const int delay = static_cast<int>(retry.base_delay_ms * (1 << (attempt - 1)) * scale);
            if (retry.sleep_ms) retry.sleep_ms(delay);
            else std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }
}

// --- response parsing ---------------------------------------------------------

namespace {

// End index of the balanced bracket region starting at `start`, respecting
// JSON string literals.
std::optional<std::size_t> balanced_end(std::string_view s, std::size_t start) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped) escaped = false;
            else if (c == '\\') escaped = true;
            else if (c == '"') in_string = false;
            continue;
        }
        if (c == '"') in_string = true;
        else if (c == '{' || c == '[') ++depth;
        else if (c == '}' || c == ']') {
            --depth;
            if (depth == 0) return i;
            if (depth < 0) return std::nullopt;
        }
    }
    return std::nullopt;
}

std::string json_scalar_to_text(const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    return {};
}

nlohmann::json questions_array(const nlohmann::json& j) {
    if (j.is_array()) return j;
    if (j.is_object() && j.contains("questions") && j.at("questions").is_array())
        return j.at("questions");
    throw ParseError("response has no 'questions' array");
}

}  // namespace

nlohmann::json extract_first_json(std::string_view text) {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '{' && text[i] != '[') continue;
        const auto end = balanced_end(text, i);
        if (!end) continue;
        const nlohmann::json parsed =
            nlohmann::json::parse(text.substr(i, *end - i + 1), nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }
    throw ParseError("no JSON object or array found in response");
}

std::vector<QaPair> parse_qa_response(std::string_view text) {
    const nlohmann::json arr = questions_array(extract_first_json(text));
    std::vector<QaPair> out;
    for (const auto& entry : arr) {
        if (!entry.is_object()) throw ParseError("qa entry is not an object");
        if (!entry.contains("question") || !entry.contains("answer"))
            throw ParseError("qa entry missing 'question' or 'answer'");
        QaPair pair{json_scalar_to_text(entry.at("question")), json_scalar_to_text(entry.at("answer"))};
        if (trim_ws(pair.question).empty() || trim_ws(pair.answer).empty())
            throw ParseError("qa entry has an empty question or answer");
        out.push_back(std::move(pair));
    }
    return out;
}

NavParseResult parse_nav_response(std::string_view text, const NavParseOptions& opts) {
    const nlohmann::json arr = questions_array(extract_first_json(text));
    NavParseResult result;
    for (const auto& entry : arr) {
        if (!entry.is_object() || !entry.contains("question") || !entry.contains("answer")) {
            ++result.rejected;
            continue;
        }
        const std::string instruction = json_scalar_to_text(entry.at("question"));
        const std::string answer = json_scalar_to_text(entry.at("answer"));
        const auto coords = parse_click_text(answer);
        if (trim_ws(instruction).empty() || !coords) {
            ++result.rejected;
            continue;
        }
        NavigationSample sample{instruction, *coords, std::nullopt};
        try {
            sample.target = box_from_coords(*coords, opts.coord_order);
        } catch (const ValueError&) {
            if (opts.reject_inconsistent) {
                ++result.rejected;
                continue;
            }
        }
        result.samples.push_back(std::move(sample));
    }
    if (result.samples.empty()) throw ParseError("no valid navigation entries in response");
    return result;
}

std::string parse_summary_response(std::string_view text) {
    const nlohmann::json j = extract_first_json(text);
    if (!j.is_object() || !j.contains("summary") || !j.at("summary").is_string())
        throw ParseError("response has no 'summary' field");
    std::string summary = j.at("summary").get<std::string>();
    if (trim_ws(summary).empty()) throw ParseError("summary is empty");
    return summary;
}

std::vector<std::string> parse_rephrase_response(std::string_view text) {
    const std::size_t open = text.find('[');
    if (open == std::string_view::npos) throw ParseError("no bracketed list in response");

    // The list uses Python-style quoting, so scan it directly. Quoted
    // content is kept verbatim; bare text only counts for unquoted items.
    std::vector<std::string> items;
    std::string quoted, bare;
    bool any_quote = false;
    char quote = 0;
    std::size_t i = open + 1;
    auto flush = [&]() {
        std::string value = any_quote ? quoted : std::string(trim_ws(bare));
        if (!trim_ws(value).empty()) items.push_back(std::move(value));
        quoted.clear();
        bare.clear();
        any_quote = false;
    };
    for (; i < text.size(); ++i) {
        const char c = text[i];
        if (quote != 0) {
            if (c == '\\' && i + 1 < text.size()) {
                quoted += text[i + 1];
                ++i;
            } else if (c == quote) {
                quote = 0;
            } else {
                quoted += c;
            }
            continue;
        }
        if (c == '\'' || c == '"') {
            quote = c;
            any_quote = true;
        } else if (c == ',') {
            flush();
        } else if (c == ']') {
            flush();
            break;
        } else {
            bare += c;
        }
    }
    if (i >= text.size()) throw ParseError("unterminated bracketed list", open);

    std::vector<std::string> out;
    std::set<std::string> seen;
    for (auto& item : items)
        if (seen.insert(item).second) out.push_back(std::move(item));
    return out;
}

// --- validation ----------------------------------------------------------------

std::string to_string(QaVerdict v) {
    switch (v) {
        case QaVerdict::grounded: return "grounded";
        case QaVerdict::numeric: return "numeric";
        case QaVerdict::ungrounded: return "ungrounded";
    }
    return "ungrounded";
}

QaVerdict validate_qa(const QaPair& pair, const ScreenSchema& schema) {
    const std::vector<std::string> answer_tokens = squad_tokens(pair.answer);
    if (answer_tokens.empty()) return QaVerdict::ungrounded;

    const bool all_numeric = std::all_of(answer_tokens.begin(), answer_tokens.end(),
                                         [](const std::string& t) { return parse_number(t).has_value(); });
    if (all_numeric) return QaVerdict::numeric;

    std::set<std::string> vocabulary;
    auto walk = [&](auto&& self, const UiElement& e) -> void {
        if (e.payload)
            for (auto& t : squad_tokens(*e.payload)) vocabulary.insert(std::move(t));
        for (const auto& child : e.children) self(self, child);
    };
    for (const auto& e : schema.elements) walk(walk, e);

    const bool grounded = std::all_of(answer_tokens.begin(), answer_tokens.end(),
                                      [&](const std::string& t) { return vocabulary.count(t) != 0; });
    return grounded ? QaVerdict::grounded : QaVerdict::ungrounded;
}

// --- generation pipeline ---------------------------------------------------------

namespace {

enum class PipelineKind { qa, navigation, summarization };

PipelineKind pipeline_kind(const std::string& template_name) {
    if (template_name == "screen_qa") return PipelineKind::qa;
    if (template_name == "screen_navigation") return PipelineKind::navigation;
    if (template_name == "screen_summarization") return PipelineKind::summarization;
    throw ValueError("template '" + template_name + "' is not schema-driven");
}

// Does the target box overlap any schema element at IoU >= 0.5?
bool anchored_in_schema(const QuantBox& target, const ScreenSchema& schema) {
    for (const auto& [cls, box] : schema_to_detections(schema))
        if (iou(target, box) >= 0.5) return true;
    return false;
}

struct ItemResult {
    std::optional<std::string> completion;
    std::optional<std::string> backend_error;
};

}  // namespace

GenerationStats generate_dataset(const std::vector<SchemaInput>& inputs,
                                 const PromptTemplate& tmpl, CompletionBackend& backend,
                                 const GenerationParams& params,
                                 const std::function<void(const TaskRecord&)>& emit) {
    const PipelineKind kind = pipeline_kind(tmpl.name);
    if (params.max_in_flight < 1) throw ValueError("max_in_flight must be >= 1");

    GenerationStats stats;
    std::vector<std::string> prompts;
    prompts.reserve(inputs.size());
    for (const auto& input : inputs) {
        std::map<std::string, std::string> extra;
        if (kind == PipelineKind::navigation)
            extra["num_samples"] = std::to_string(params.num_samples);
        prompts.push_back(render_prompt(tmpl, input.schema, std::move(extra)));
    }

    // Bounded concurrency: complete in batches of max_in_flight, then parse
    // and emit in input order.
    std::vector<ItemResult> results(inputs.size());
    for (std::size_t base = 0; base < inputs.size();
         base += static_cast<std::size_t>(params.max_in_flight)) {
        const std::size_t end =
            std::min(inputs.size(), base + static_cast<std::size_t>(params.max_in_flight));
        std::vector<std::future<std::string>> batch;
        for (std::size_t i = base; i < end; ++i) {
            CompletionRequest req{prompts[i], params.temperature, params.max_tokens};
            if (end - base == 1) {
                // single-request batch: skip the thread round-trip
                try {
                    results[i].completion = complete(backend, req, params.retry).text;
                } catch (const BackendError& e) {
                    results[i].backend_error = e.what();
                }
                continue;
            }
            batch.push_back(std::async(std::launch::async, [&backend, &params, req]() {
                return complete(backend, req, params.retry).text;
            }));
        }
        for (std::size_t i = base; i < end && !batch.empty(); ++i) {
            try {
                results[i].completion = batch[i - base].get();
            } catch (const BackendError& e) {
                results[i].backend_error = e.what();
            }
        }
    }

    for (std::size_t i = 0; i < inputs.size(); ++i) {
        ++stats.items;
        if (results[i].backend_error) {
            ++stats.backend_failures;
            continue;
        }
        const std::string& completion = *results[i].completion;
        const SchemaInput& input = inputs[i];
        try {
            switch (kind) {
                case PipelineKind::qa: {
                    for (const auto& pair : parse_qa_response(completion)) {
                        const QaVerdict verdict = validate_qa(pair, input.schema);
                        TaskRecord record{TaskType::screen_qa, input.image_ref, pair.question,
                                          pair.answer,
                                          {{"template", tmpl.name}, {"validation", to_string(verdict)}}};
                        if (verdict == QaVerdict::ungrounded) ++stats.flagged;
                        emit(record);
                        ++stats.emitted;
                    }
                    break;
                }
                case PipelineKind::navigation: {
                    const NavParseResult parsed = parse_nav_response(completion, params.nav);
                    stats.rejected += parsed.rejected;
                    for (const auto& sample : parsed.samples) {
                        TaskRecord record{TaskType::screen_navigation, input.image_ref,
                                          sample.instruction, format_click_text(sample.coords),
                                          {{"template", tmpl.name}}};
                        if (!sample.target) {
                            record.metadata["flag"] = "inconsistent_box";
                            ++stats.flagged;
                        } else if (!anchored_in_schema(*sample.target, input.schema)) {
                            record.metadata["flag"] = "unanchored_target";
                            ++stats.flagged;
                        }
                        emit(record);
                        ++stats.emitted;
                    }
                    break;
                }
                case PipelineKind::summarization: {
                    const std::string summary = parse_summary_response(completion);
                    emit(TaskRecord{TaskType::screen_summarization, input.image_ref, "", summary,
                                    {{"template", tmpl.name}}});
                    ++stats.emitted;
                    break;
                }
            }
        } catch (const ParseError&) {
            ++stats.rejected;
        }
    }

    stats.review_required =
        stats.emitted > 0 && static_cast<double>(stats.flagged) >
                                 params.flagged_fraction_limit * static_cast<double>(stats.emitted);
    return stats;
}

}  // namespace screenkit

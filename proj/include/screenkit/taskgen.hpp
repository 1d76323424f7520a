#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "screenkit/errors.hpp"
#include "screenkit/mixtures.hpp"
#include "screenkit/navigation.hpp"
#include "screenkit/schema.hpp"

namespace screenkit {

// Prompt body with {NAME} placeholder slots; "{{" and "}}" are literal-brace
// escapes. The declared placeholder list must match the set found in the
// body.
struct PromptTemplate {
    std::string name;
    std::string body;
    std::vector<std::string> placeholders;

    PromptTemplate(std::string name, std::string body, std::vector<std::string> placeholders);
};

// The five shipped prompts: screen_qa, screen_navigation,
// screen_summarization, rephrase_single, rephrase_multiple.
const std::vector<PromptTemplate>& builtin_templates();
const PromptTemplate& builtin_template(const std::string& name);

// Placeholder names in scan order (duplicates collapsed).
std::vector<std::string> scan_placeholders(std::string_view body);

// Substitutes every placeholder; throws ValueError on an unbound one.
std::string render_prompt(const PromptTemplate& t, const std::map<std::string, std::string>& bindings);
// Convenience binding of {THE SCREEN SCHEMA} to the serialized schema.
std::string render_prompt(const PromptTemplate& t, const ScreenSchema& schema,
                          std::map<std::string, std::string> extra = {});

struct CompletionRequest {
    std::string prompt;
    double temperature = 0.0;
    int max_tokens = 1024;  // >= 1
};

struct CompletionResult {
    std::string text;
    std::string backend_id;
};

class CompletionBackend {
public:
    virtual ~CompletionBackend() = default;
    virtual std::string id() const = 0;
    // Returns the completion text verbatim; throws BackendError on failure.
    virtual std::string complete_text(const CompletionRequest& req) = 0;
};

// POSTs {prompt, temperature, max_tokens} to the endpoint and expects a JSON
// object {text}. Connection failures and 5xx are transient, 4xx permanent.
class HttpBackend : public CompletionBackend {
public:
    explicit HttpBackend(std::string url, int timeout_ms = 30000);
    std::string id() const override { return url_; }
    std::string complete_text(const CompletionRequest& req) override;

private:
    std::string url_;
    std::string base_;
    std::string path_;
    int timeout_ms_;
};

// Canned responses from a JSON map file {request_key: text}, keyed by the
// FNV-1a hash of the prompt. A missing key is a permanent failure.
class FileStubBackend : public CompletionBackend {
public:
    explicit FileStubBackend(const std::string& path);
    std::string id() const override { return "stub:" + path_; }
    std::string complete_text(const CompletionRequest& req) override;

    static std::string request_key(const CompletionRequest& req);

private:
    std::string path_;
    std::unordered_map<std::string, std::string> responses_;
};

struct RetryPolicy {
    int max_attempts = 3;
    int base_delay_ms = 100;          // doubled per retry
    double jitter = 0.1;              // fraction of the delay
    std::uint64_t jitter_seed = 0;
    std::function<void(int)> sleep_ms;  // injectable; nullptr sleeps for real
};

// Retries transient failures with exponential backoff and jitter, up to the
// attempt cap; then fails permanently.
CompletionResult complete(CompletionBackend& backend, const CompletionRequest& req,
                          const RetryPolicy& retry = {});

// First balanced JSON object or array in the text, prose around it ignored.
nlohmann::json extract_first_json(std::string_view text);

struct QaPair {
    std::string question;
    std::string answer;

    bool operator==(const QaPair&) const = default;
};

// {"questions": [{"question":..., "answer":...}, ...]} or a bare array.
// Throws ParseError when no JSON is found or an entry misses a field.
std::vector<QaPair> parse_qa_response(std::string_view text);

struct NavigationSample {
    std::string instruction;
    std::array<int, 4> coords{};        // raw values as completed, each 0..999
    std::optional<QuantBox> target;     // set when consistent under the order

    bool operator==(const NavigationSample&) const = default;
};

struct NavParseOptions {
    CoordOrder coord_order = CoordOrder::ymin_xmin_ymax_xmax;
    // Raw coordinates are kept by default (completions are not always
    // geometrically consistent); strict mode drops order-violating entries.
    bool reject_inconsistent = false;
};

struct NavParseResult {
    std::vector<NavigationSample> samples;
    std::size_t rejected = 0;  // entries failing the click shape or strict ordering
};

NavParseResult parse_nav_response(std::string_view text, const NavParseOptions& opts = {});

// Value of the "summary" field; throws ParseError when missing or empty.
std::string parse_summary_response(std::string_view text);

// Bracketed list of short answers, e.g. ['on', 'enabled']; single- or
// double-quoted or bare items, deduplicated preserving order.
std::vector<std::string> parse_rephrase_response(std::string_view text);

enum class QaVerdict { grounded, numeric, ungrounded };
std::string to_string(QaVerdict v);

// grounded: every normalized answer token occurs in the schema payloads;
// numeric: the answer is purely numeric; else ungrounded (flagged, never
// dropped).
QaVerdict validate_qa(const QaPair& pair, const ScreenSchema& schema);

struct SchemaInput {
    std::string image_ref;
    ScreenSchema schema;
};

struct GenerationParams {
    int num_samples = 5;    // bound to {num_samples} for navigation prompts
    double temperature = 0.0;
    int max_tokens = 1024;
    int max_in_flight = 8;  // concurrent backend requests
    RetryPolicy retry;
    NavParseOptions nav;
    double flagged_fraction_limit = 0.2;
};

struct GenerationStats {
    std::size_t items = 0;             // schemas processed
    std::size_t emitted = 0;
    std::size_t rejected = 0;          // malformed responses + rejected entries
    std::size_t flagged = 0;           // emitted but suspicious
    std::size_t backend_failures = 0;  // permanent failures, item skipped
    bool review_required = false;      // flagged fraction above the limit
};

// render -> complete -> parse -> validate -> emit, per schema. Backend
// failures and malformed completions are counted per item; the stream never
// aborts. Output order follows input order regardless of concurrency.
GenerationStats generate_dataset(const std::vector<SchemaInput>& inputs,
                                 const PromptTemplate& tmpl, CompletionBackend& backend,
                                 const GenerationParams& params,
                                 const std::function<void(const TaskRecord&)>& emit);

}  // namespace screenkit

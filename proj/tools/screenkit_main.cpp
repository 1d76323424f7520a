#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "screenkit/config.hpp"
#include "screenkit/corpus_eval.hpp"
#include "screenkit/io.hpp"
#include "screenkit/mixtures.hpp"
#include "screenkit/patching.hpp"
#include "screenkit/svg.hpp"
#include "screenkit/taskgen.hpp"

namespace {

using namespace screenkit;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 1;
constexpr int kExitBackendError = 2;

void diag(const nlohmann::json& j) { std::cerr << j.dump() << "\n"; }

void diag_error(const std::string& message) { diag({{"error", message}}); }

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValueError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Applies `fn` per non-empty line; parse failures become one stderr
// diagnostic each and never abort the batch.
void for_each_line(const std::string& path, const std::function<void(std::size_t, const std::string&)>& fn) {
    const std::string content = read_input(path);
    std::istringstream in(content);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            fn(line_no, line);
        } catch (const ParseError& e) {
            nlohmann::json j{{"file", path}, {"line", line_no}, {"error", e.what()}};
            if (e.has_offset()) j["offset"] = e.offset();
            diag(j);
        } catch (const ValueError& e) {
            diag({{"file", path}, {"line", line_no}, {"error", e.what()}});
        } catch (const nlohmann::json::exception& e) {
            diag({{"file", path}, {"line", line_no}, {"error", e.what()}});
        }
    }
}

struct GlobalOptions {
    std::string config_path;
    std::string backend_url;
    std::uint64_t seed = 0;
    bool seed_set = false;

    Config resolve() const {
        Config c;
        if (!config_path.empty()) c = load_config(config_path);
        if (const char* env = std::getenv("SCREENKIT_BACKEND_URL")) c.backend_url = env;
        if (!backend_url.empty()) c.backend_url = backend_url;
        if (seed_set) c.seed = seed;
        return c;
    }
};

std::unique_ptr<CompletionBackend> make_backend(const std::string& spec, int timeout_ms) {
    if (spec.rfind("stub:", 0) == 0) return std::make_unique<FileStubBackend>(spec.substr(5));
    if (spec.empty()) throw ValueError("no backend configured (use --backend, --backend-url, "
                                       "SCREENKIT_BACKEND_URL, or the config file)");
    return std::make_unique<HttpBackend>(spec, timeout_ms);
}

// --- subcommand bodies ------------------------------------------------------

int run_schema_validate(const std::vector<std::string>& files) {
    int rc = kExitOk;
    for (const auto& f : files) {
        try {
            parse_schema(read_input(f));
        } catch (const ParseError& e) {
            nlohmann::json j{{"file", f}, {"error", e.what()}};
            if (e.has_offset()) j["offset"] = e.offset();
            diag(j);
            rc = kExitInputError;
        }
    }
    return rc;
}

int run_schema_fmt(const std::string& file) {
    const ScreenSchema s = parse_schema(read_input(file));
    std::cout << serialize_schema(s) << "\n";
    return kExitOk;
}

int run_schema_render(const std::string& file, double width, double height) {
    const ScreenSchema s = parse_schema(read_input(file));
    std::cout << render_schema_svg(s, width, height);
    return kExitOk;
}

int run_compose(const std::string& input) {
    for_each_line(input, [](std::size_t, const std::string& line) {
        const AnnotationInput ann = parse_annotation_record(line);
        const ScreenSchema schema =
            compose_schema(ann.detections, ann.ocr_words, ann.captions, ann.width, ann.height);
        const SchemaRecord record{ann.image_ref, ann.width, ann.height, serialize_schema(schema)};
        std::cout << schema_record_to_json(record).dump() << "\n";
    });
    return kExitOk;
}

int run_patch(const std::string& input) {
    for_each_line(input, [](std::size_t, const std::string& line) {
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded()) throw ParseError("line is not valid JSON");
        for (const char* key : {"width", "height", "patch", "budget"})
            if (!j.contains(key)) throw ParseError(std::string("missing field: ") + key);
        const PatchGrid g = compute_grid(j.at("width").get<int>(), j.at("height").get<int>(),
                                         j.at("patch").get<int>(), j.at("budget").get<long long>());
        std::cout << nlohmann::json{{"rows", g.rows},
                                    {"cols", g.cols},
                                    {"scaled_w", g.scaled_w},
                                    {"scaled_h", g.scaled_h},
                                    {"pad_right", g.pad_right},
                                    {"pad_bottom", g.pad_bottom}}
                         .dump()
                  << "\n";
    });
    return kExitOk;
}

int run_generate(const std::vector<std::string>& inputs, const std::string& template_name,
                 const std::string& backend_spec, const Config& config, int num_samples,
                 double temperature, int max_tokens) {
    std::vector<SchemaInput> schemas;
    for (const auto& path : inputs) {
        for_each_line(path, [&](std::size_t, const std::string& line) {
            const SchemaRecord record = parse_schema_record(line);
            schemas.push_back(SchemaInput{record.image_ref, parse_schema(record.schema_text)});
        });
    }

    auto backend = make_backend(backend_spec, config.timeout_ms);
    GenerationParams params;
    params.num_samples = num_samples;
    params.temperature = temperature;
    params.max_tokens = max_tokens;
    params.max_in_flight = config.concurrency;
    params.retry.max_attempts = config.max_attempts;
    params.retry.jitter_seed = config.seed;
    params.nav.coord_order = config.coord_order;
    params.flagged_fraction_limit = config.flagged_fraction_limit;

    const GenerationStats stats =
        generate_dataset(schemas, builtin_template(template_name), *backend, params,
                         [](const TaskRecord& r) { std::cout << serialize_task_record(r) << "\n"; });

    diag({{"items", stats.items},
          {"emitted", stats.emitted},
          {"rejected", stats.rejected},
          {"flagged", stats.flagged},
          {"backend_failures", stats.backend_failures},
          {"review_required", stats.review_required}});
    if (stats.items > 0 && stats.backend_failures == stats.items) return kExitBackendError;
    return kExitOk;
}

int run_eval(const std::string& input, const std::string& metric, bool parallel, double iou_threshold,
             double tau, bool fold_case, bool per_sample, const Config& config) {
    std::vector<EvalRecord> records;
    for_each_line(input, [&](std::size_t, const std::string& line) {
        records.push_back(parse_eval_record(line, config.coord_order));
    });
    EvalOptions opts;
    opts.mode = parallel ? EvalMode::parallel : EvalMode::serial;
    opts.iou_threshold = iou_threshold;
    opts.anls_tau = tau;
    opts.fold_case = fold_case;
    opts.per_sample = per_sample;
    const MetricReport report = evaluate_corpus(records, metric, opts);
    std::cout << metric_report_to_json(report).dump() << "\n";
    return kExitOk;
}

int run_mixture(const std::string& spec_path, std::size_t n, const std::string& manifest_path,
                const Config& config, std::optional<double> cap_override) {
    nlohmann::json j = nlohmann::json::parse(read_input(spec_path), nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError("mixture spec must be a JSON object");

    MixtureSpec spec;
    spec.cap = cap_override ? *cap_override : j.value("cap", config.mixture_cap);
    if (!j.contains("tasks") || !j.at("tasks").is_array())
        throw ParseError("mixture spec needs a 'tasks' array");
    for (const auto& t : j.at("tasks")) {
        for (const char* key : {"task", "size", "source"})
            if (!t.contains(key)) throw ParseError(std::string("mixture task missing field: ") + key);
        spec.entries.push_back(MixtureEntry{t.at("task").get<std::string>(),
                                            t.at("size").get<std::uint64_t>(),
                                            t.at("source").get<std::string>()});
    }

    const std::map<std::string, double> weights = compute_weights(spec);
    std::vector<std::vector<TaskRecord>> sources;
    sources.reserve(spec.entries.size());
    for (const auto& e : spec.entries) sources.push_back(load_task_records(e.source_path));

    const nlohmann::json manifest = mixture_manifest(spec, weights, config.seed);
    if (!manifest_path.empty()) {
        std::ofstream out(manifest_path);
        if (!out) throw ValueError("cannot write manifest: " + manifest_path);
        out << manifest.dump(2) << "\n";
    } else {
        diag(manifest);
    }

    sample_mixture(spec, weights, sources, n, config.seed,
                   [](const TaskRecord& r) { std::cout << serialize_task_record(r) << "\n"; });
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toolkit for screen-annotation schemas, patch grids, LLM task generation, "
                 "dataset mixtures, and evaluation metrics"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand too

    GlobalOptions global;
    app.add_option("--config", global.config_path, "JSON config file");
    app.add_option("--backend-url", global.backend_url, "Completion backend endpoint");
    app.add_option("--seed", global.seed, "Seed for all randomness")
        ->each([&](const std::string&) { global.seed_set = true; });

    // schema validate|fmt|render
    auto* schema_cmd = app.add_subcommand("schema", "Parse, canonicalize, or render schema text");
    schema_cmd->require_subcommand(1);
    std::vector<std::string> schema_files{"-"};
    auto* validate_cmd = schema_cmd->add_subcommand("validate", "Exit 0 iff all inputs parse");
    validate_cmd->add_option("files", schema_files, "Schema files ('-' for stdin)");
    std::string fmt_file = "-";
    auto* fmt_cmd = schema_cmd->add_subcommand("fmt", "Canonical single-space form");
    fmt_cmd->add_option("file", fmt_file, "Schema file ('-' for stdin)");
    std::string render_file = "-";
    double render_width = 1000.0, render_height = 1000.0;
    auto* render_cmd = schema_cmd->add_subcommand("render", "SVG overlay of the schema");
    render_cmd->add_option("file", render_file, "Schema file ('-' for stdin)");
    render_cmd->add_option("--width", render_width, "Canvas width in px");
    render_cmd->add_option("--height", render_height, "Canvas height in px");

    std::string compose_input = "-";
    auto* compose_cmd = app.add_subcommand("compose", "Annotation JSONL -> schema JSONL");
    compose_cmd->add_option("input", compose_input, "Annotation JSONL ('-' for stdin)");

    std::string patch_input = "-";
    auto* patch_cmd = app.add_subcommand("patch", "Dims JSONL -> grid JSONL");
    patch_cmd->add_option("input", patch_input, "{width,height,patch,budget} JSONL");

    std::vector<std::string> generate_inputs;
    std::string generate_template, generate_backend;
    int generate_num_samples = 5, generate_max_tokens = 1024;
    double generate_temperature = 0.0;
    auto* generate_cmd = app.add_subcommand("generate", "Schema JSONL -> task record JSONL");
    generate_cmd->add_option("inputs", generate_inputs, "Schema JSONL files")->required();
    generate_cmd->add_option("--template", generate_template, "Prompt template name")->required();
    generate_cmd->add_option("--backend", generate_backend, "Backend URL or stub:FILE");
    generate_cmd->add_option("--num-samples", generate_num_samples, "Samples per navigation prompt");
    generate_cmd->add_option("--temperature", generate_temperature, "Sampling temperature");
    generate_cmd->add_option("--max-tokens", generate_max_tokens, "Completion length cap");

    std::string eval_input = "-", eval_metric;
    bool eval_parallel = false, eval_fold_case = false, eval_per_sample = false;
    double eval_iou = kDetectionIouThreshold, eval_tau = 0.5;
    auto* eval_cmd = app.add_subcommand("eval", "Predictions JSONL -> metric report JSON");
    eval_cmd->add_option("input", eval_input, "Evaluation JSONL ('-' for stdin)");
    eval_cmd->add_option("--metric", eval_metric, "Metric name")->required();
    eval_cmd->add_flag("--parallel", eval_parallel, "Score items with OpenMP");
    eval_cmd->add_option("--iou-threshold", eval_iou, "IoU threshold for box metrics");
    eval_cmd->add_option("--tau", eval_tau, "ANLS cutoff");
    eval_cmd->add_flag("--fold-case", eval_fold_case, "Case-insensitive exact match");
    eval_cmd->add_flag("--per-sample", eval_per_sample, "Include per-sample scores");

    std::string mixture_spec, mixture_manifest_path;
    std::size_t mixture_n = 0;
    double mixture_cap = -1.0;
    auto* mixture_cmd = app.add_subcommand("mixture", "Sample a weighted task mixture");
    mixture_cmd->add_option("--spec", mixture_spec, "Mixture spec JSON file")->required();
    mixture_cmd->add_option("-n,--num-records", mixture_n, "Records to sample")->required();
    mixture_cmd->add_option("--manifest", mixture_manifest_path, "Write the manifest here");
    mixture_cmd->add_option("--cap", mixture_cap, "Max weight per task");

    CLI11_PARSE(app, argc, argv);

    try {
        const Config config = global.resolve();
        if (validate_cmd->parsed()) return run_schema_validate(schema_files);
        if (fmt_cmd->parsed()) return run_schema_fmt(fmt_file);
        if (render_cmd->parsed()) return run_schema_render(render_file, render_width, render_height);
        if (compose_cmd->parsed()) return run_compose(compose_input);
        if (patch_cmd->parsed()) return run_patch(patch_input);
        if (generate_cmd->parsed()) {
            const std::string backend =
                generate_backend.empty() ? config.backend_url : generate_backend;
            return run_generate(generate_inputs, generate_template, backend, config,
                                generate_num_samples, generate_temperature, generate_max_tokens);
        }
        if (eval_cmd->parsed())
            return run_eval(eval_input, eval_metric, eval_parallel, eval_iou, eval_tau,
                            eval_fold_case, eval_per_sample, config);
        if (mixture_cmd->parsed()) {
            std::optional<double> cap;
            if (mixture_cap >= 0.0) cap = mixture_cap;
            return run_mixture(mixture_spec, mixture_n, mixture_manifest_path, config, cap);
        }
    } catch (const BackendError& e) {
        diag_error(e.what());
        return kExitBackendError;
    } catch (const ParseError& e) {
        nlohmann::json j{{"error", e.what()}};
        if (e.has_offset()) j["offset"] = e.offset();
        diag(j);
        return kExitInputError;
    } catch (const ValueError& e) {
        diag_error(e.what());
        return kExitInputError;
    } catch (const std::exception& e) {
        diag_error(e.what());
        return kExitInputError;
    }
    return kExitOk;
}

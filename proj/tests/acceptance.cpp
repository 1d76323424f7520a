// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Criterion 9 drives the CLI binary passed as argv[1].

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "screenkit/cider.hpp"
#include "screenkit/corpus_eval.hpp"
#include "screenkit/metrics.hpp"
#include "screenkit/mixtures.hpp"
#include "screenkit/patching.hpp"
#include "screenkit/taskgen.hpp"
#include "screenkit/text_norm.hpp"
#include "testutil.hpp"

using namespace screenkit;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
std::string g_cli_path;

struct Failure {
    std::string message;
};

void expect(bool condition, const std::string& message) {
    if (!condition) throw Failure{message};
}

void expect_near(double actual, double want, double tol, const std::string& what) {
    if (!(std::abs(actual - want) <= tol)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << what << ": got " << actual << ", want " << want << " +/- " << tol;
        throw Failure{msg.str()};
    }
}

void run_criterion(int number, const std::string& name, double limit_seconds,
                   const std::function<void()>& body) {
    const auto start = std::chrono::steady_clock::now();
    std::string failure;
    try {
        body();
    } catch (const Failure& f) {
        failure = f.message;
    } catch (const std::exception& e) {
        failure = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (failure.empty() && limit_seconds > 0 && elapsed > limit_seconds) {
        std::ostringstream msg;
        msg << "runtime " << elapsed << "s exceeds " << limit_seconds << "s";
        failure = msg.str();
    }
    if (failure.empty()) {
        std::printf("PASS  %2d  %s (%.2fs)\n", number, name.c_str(), elapsed);
    } else {
        std::printf("FAIL  %2d  %s: %s\n", number, name.c_str(), failure.c_str());
        ++g_failures;
    }
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// --- criteria ----------------------------------------------------------------

void criterion_patch_budgets() {
    const PatchGrid g2b = compute_grid(756, 756, 14, 2916);
    expect(g2b.rows == 54 && g2b.cols == 54, "756x756/14/2916 must give 54x54");
    const PatchGrid g5b = compute_grid(812, 812, 14, 3364);
    expect(g5b.rows == 58 && g5b.cols == 58, "812x812/14/3364 must give 58x58");
    const PatchGrid g670 = compute_grid(720, 720, 16, 2024);
    expect(static_cast<long long>(g670.rows) * g670.cols <= 2024, "670M grid exceeds its budget");
    const int longest = std::max(g670.rows, g670.cols);
    expect(longest == 44 || longest == 45, "670M grid side must be 44 or 45");
}

void criterion_grid_oracle() {
    std::mt19937_64 gen(20240117);
    for (int trial = 0; trial < 500; ++trial) {
        const int width = 1 + static_cast<int>(bounded_u64(gen, 4000));
        const int height = 1 + static_cast<int>(bounded_u64(gen, 4000));
        const int patch = 1 + static_cast<int>(bounded_u64(gen, 64));
        const long long budget = 1 + static_cast<long long>(bounded_u64(gen, 200));
        const PatchGrid g = compute_grid(width, height, patch, budget);
        const testutil::OracleGrid want = testutil::grid_oracle(width, height, budget);
        if (g.rows != want.rows || g.cols != want.cols) {
            std::ostringstream msg;
            msg << "mismatch at w=" << width << " h=" << height << " p=" << patch
                << " b=" << budget << ": got " << g.rows << "x" << g.cols << ", oracle "
                << want.rows << "x" << want.cols;
            throw Failure{msg.str()};
        }
    }
}

void criterion_detection_oracle() {
    std::mt19937_64 gen(3333);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<LabeledBox> pred, gold;
        const char* classes[2] = {"TEXT", "BUTTON"};
        for (int c = 0; c < 2; ++c) {
            const std::size_t n_pred = bounded_u64(gen, 7);
            const std::size_t n_gold = bounded_u64(gen, 7);
            auto small_box = [&gen]() {
                const int y = static_cast<int>(bounded_u64(gen, 100));
                const int x = static_cast<int>(bounded_u64(gen, 100));
                const int h = static_cast<int>(bounded_u64(gen, 60));
                const int w = static_cast<int>(bounded_u64(gen, 60));
                return QuantBox{y, x, y + h, x + w};
            };
            for (std::size_t i = 0; i < n_pred; ++i)
                pred.emplace_back(ElementClass{classes[c]}, small_box());
            for (std::size_t i = 0; i < n_gold; ++i)
                gold.emplace_back(ElementClass{classes[c]}, small_box());
        }
        const DetectionMetrics got = match_detections(pred, gold, 0.1);
        const testutil::OracleDetectionResult want = testutil::detection_oracle(pred, gold, 0.1);
        expect(got.overall.tp == want.tp, "TP differs from the exhaustive oracle");
        expect_near(got.overall.precision, want.precision, 1e-12, "precision vs oracle");
        expect_near(got.overall.recall, want.recall, 1e-12, "recall vs oracle");
        expect_near(got.overall.f1, want.f1, 1e-12, "f1 vs oracle");
    }
}

void criterion_metric_hand_values() {
    expect_near(anls("hello", {"hallo"}), 0.8, 1e-9, "anls(hello, hallo)");
    expect_near(squad_f1("1", {"1 and 1"}), 0.5, 1e-9, "squad_f1(1, '1 and 1')");
    expect(relaxed_accuracy("104", "100") == 1, "relaxed_accuracy(104, 100)");
    expect(relaxed_accuracy("106", "100") == 0, "relaxed_accuracy(106, 100)");
    expect(levenshtein("kitten", "sitting") == 3, "levenshtein(kitten, sitting)");
    expect_near(aggregate_score({{"a", 2.0}, {"b", 0.5}}, {{"a", 1.0}, {"b", 1.0}}), 1.0, 1e-9,
                "aggregate_score({2, 0.5})");
}

void criterion_schema_roundtrip() {
    std::mt19937_64 gen(55);
    for (int i = 0; i < 1000; ++i) {
        const ScreenSchema s = testutil::random_schema(gen);
        const ScreenSchema back = parse_schema(serialize_schema(s));
        expect(back.elements == s.elements, "parse(serialize(s)) != s");
    }
    for (int i = 0; i < 1000; ++i) {
        const std::string bad = testutil::invalid_schema_text(gen);
        try {
            parse_schema(bad);
            throw Failure{"invalid input accepted: " + bad};
        } catch (const ParseError&) {
            // structured error, as required
        }
    }
}

void criterion_quantization() {
    for (double extent : {1.0, 720.0, 756.0, 812.0, 10000.0}) {
        for (int v = 0; v <= 999; ++v) {
            const QuantBox q{v, v, v, v};
            expect(quantize_box(dequantize_box(q, extent, extent), extent, extent) == q,
                   "quantize(dequantize(q)) != q at extent " + std::to_string(extent));
        }
    }
    std::mt19937_64 gen(9);
    for (int i = 0; i < 100000; ++i) {
        const double extent = 1.0 + unit_double(gen) * 9999.0;
        double c1 = unit_double(gen) * extent;
        double c2 = unit_double(gen) * extent;
        if (c1 > c2) std::swap(c1, c2);
        const int q1 = quantize_box({c1, 0, c1, 0}, extent, extent).ymin;
        const int q2 = quantize_box({c2, 0, c2, 0}, extent, extent).ymin;
        expect(q1 <= q2, "quantization must be monotone");
    }
}

void criterion_mpdocvqa() {
    const std::vector<std::string> pages{"p1", "p2", "p3"};
    const auto pairs = build_mpdocvqa_pairs("q", "ans", pages, 1, 1.0, 42);
    expect(pairs.size() == 3, "keep=1.0 must keep every page");
    std::size_t positives = 0;
    for (const auto& p : pairs) positives += p.polarity == PagePair::Polarity::positive ? 1 : 0;
    expect(positives == 1, "exactly one positive pair");

    const double keep = 0.25;
    const std::vector<std::string> five{"a", "b", "c", "d", "e"};
    std::size_t negatives = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        for (const auto& p :
             build_mpdocvqa_pairs("q", "ans", five, 2, keep, static_cast<std::uint64_t>(t)))
            negatives += p.polarity == PagePair::Polarity::negative ? 1 : 0;
    }
    const double expected = trials * 4 * keep;
    const double sigma = std::sqrt(trials * 4 * keep * (1.0 - keep));
    expect_near(static_cast<double>(negatives), expected, 3.0 * sigma,
                "negative count over 10^4 trials");
}

void criterion_mixture_weights() {
    MixtureSpec a;
    a.cap = 1.0;
    a.entries = {{"x", 100, ""}, {"y", 300, ""}};
    auto w = compute_weights(a);
    expect_near(w.at("x"), 0.25, 1e-12, "weights {100,300} cap 1");
    expect_near(w.at("y"), 0.75, 1e-12, "weights {100,300} cap 1");

    MixtureSpec b;
    b.cap = 0.5;
    b.entries = {{"x", 100, ""}, {"y", 900, ""}};
    w = compute_weights(b);
    expect_near(w.at("x"), 0.5, 1e-12, "weights {100,900} cap 0.5");
    expect_near(w.at("y"), 0.5, 1e-12, "weights {100,900} cap 0.5");

    MixtureSpec c;
    c.cap = 0.4;
    c.entries = {{"x", 1, ""}, {"y", 1, ""}, {"z", 8, ""}};
    w = compute_weights(c);
    expect_near(w.at("x"), 0.3, 1e-12, "weights {1,1,8} cap 0.4");
    expect_near(w.at("y"), 0.3, 1e-12, "weights {1,1,8} cap 0.4");
    expect_near(w.at("z"), 0.4, 1e-12, "weights {1,1,8} cap 0.4");

    std::mt19937_64 gen(4096);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + bounded_u64(gen, 10);
        MixtureSpec spec;
        for (std::size_t i = 0; i < n; ++i)
            spec.entries.push_back({"t" + std::to_string(i), 1 + bounded_u64(gen, 1000000), ""});
        const double min_cap = 1.0 / static_cast<double>(n);
        spec.cap = min_cap + (1.0 - min_cap) * unit_double(gen);
        const auto weights = compute_weights(spec);
        double sum = 0.0;
        for (const auto& [task, weight] : weights) {
            expect(weight <= spec.cap + 1e-12, "cap violated on a random spec");
            sum += weight;
        }
        expect_near(sum, 1.0, 1e-12, "weights must sum to 1");
    }
}

int run_command(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void criterion_end_to_end_generation() {
    expect(!g_cli_path.empty(), "CLI path missing: pass it as argv[1]");
    const fs::path dir = fs::temp_directory_path() / "screenkit_acceptance";
    fs::create_directories(dir);

    // Ten schema files, each one record. Two get malformed canned responses.
    const PromptTemplate& tmpl = builtin_template("screen_qa");
    nlohmann::json stub = nlohmann::json::object();
    std::string file_args;
    std::size_t expected_records = 0;
    for (int i = 0; i < 10; ++i) {
        const std::string schema_text =
            "TEXT \"Screen " + std::to_string(i) + "\" 10 20 50 800 BUTTON \"OK\" 100 100 200 200";
        const fs::path f = dir / ("schema_" + std::to_string(i) + ".jsonl");
        std::ofstream(f) << nlohmann::json{{"image_ref", "img" + std::to_string(i)},
                                           {"width", 720},
                                           {"height", 1280},
                                           {"schema", schema_text}}
                                .dump()
                         << "\n";
        file_args += " " + f.string();

        const std::string prompt = render_prompt(tmpl, parse_schema(schema_text));
        const std::string key = FileStubBackend::request_key({prompt, 0.0, 1024});
        if (i == 3) {
            stub[key] = "I'm sorry, I can only reply in prose today.";
        } else if (i == 7) {
            stub[key] = R"({"questions":[{"question":"incomplete"}]})";
        } else {
            nlohmann::json questions = nlohmann::json::array();
            for (int k = 0; k < 5; ++k) {
                questions.push_back({{"question", "What does screen " + std::to_string(i) +
                                                      " say, variant " + std::to_string(k) + "?"},
                                     {"answer", "Screen " + std::to_string(i)}});
                ++expected_records;
            }
            stub[key] = nlohmann::json{{"questions", questions}}.dump();
        }
    }
    const fs::path stub_path = dir / "stub.json";
    std::ofstream(stub_path) << stub.dump();

    const std::string base_cmd = g_cli_path + " --seed 7 generate" + file_args +
                                 " --template screen_qa --backend stub:" + stub_path.string();
    const fs::path out1 = dir / "out1.jsonl";
    const fs::path out2 = dir / "out2.jsonl";
    const fs::path err1 = dir / "err1.json";
    const fs::path err2 = dir / "err2.json";

    expect(run_command(base_cmd + " >" + out1.string() + " 2>" + err1.string()) == 0,
           "first generate run failed");
    expect(run_command(base_cmd + " >" + out2.string() + " 2>" + err2.string()) == 0,
           "second generate run failed");

    const std::string bytes1 = slurp(out1);
    expect(bytes1 == slurp(out2), "two runs with the same seed must be byte-identical");

    std::size_t lines = 0;
    for (char c : bytes1) lines += c == '\n' ? 1 : 0;
    expect(lines == expected_records,
           "expected " + std::to_string(expected_records) + " records, got " +
               std::to_string(lines));

    const nlohmann::json stats = nlohmann::json::parse(slurp(err1));
    expect(stats.at("emitted").get<std::size_t>() == expected_records, "emitted count mismatch");
    expect(stats.at("rejected").get<std::size_t>() == 2, "rejected count must be 2");
    expect(stats.at("backend_failures").get<std::size_t>() == 0, "no backend failures expected");
}

void criterion_template_fidelity() {
    const fs::path data_dir{SCREENKIT_TEST_DATA_DIR};
    const std::pair<const char*, const char*> files[] = {
        {"screen_qa", "prompt_screen_qa.txt"},
        {"screen_navigation", "prompt_screen_navigation.txt"},
        {"screen_summarization", "prompt_screen_summarization.txt"},
        {"rephrase_single", "prompt_rephrase_single.txt"},
        {"rephrase_multiple", "prompt_rephrase_multiple.txt"},
    };
    for (const auto& [name, file] : files) {
        std::string want = slurp(data_dir / file);
        expect(!want.empty(), std::string("missing golden file ") + file);
        if (want.back() == '\n') want.pop_back();
        expect(builtin_template(name).body == want,
               std::string("template body differs from golden text: ") + name);
    }
    for (const char* name : {"screen_qa", "screen_navigation", "screen_summarization"})
        expect(builtin_template(name).body.find(
                   "You only speak JSON. Do not write text that isn't JSON.") != std::string::npos,
               "QA-family template missing its opening sentence");
    for (const char* name : {"rephrase_single", "rephrase_multiple"})
        expect(builtin_template(name).body.find("List various ways to rephrase the answer.") !=
                   std::string::npos,
               "rephrase template missing its opening sentence");
}

void criterion_cider() {
    const std::vector<CaptionItem> identical = {
        {"red cat sat on the mat", {"red cat sat on the mat"}},
        {"blue dog ran to a tree", {"blue dog ran to a tree"}},
    };
    const CiderResult ident = cider(identical);
    expect_near(ident.per_item[0], 10.0, 1e-6, "identical caption item 1");
    expect_near(ident.per_item[1], 10.0, 1e-6, "identical caption item 2");

    const std::vector<CaptionItem> disjoint = {
        {"purple elephant", {"red cat sat"}},
        {"blue dog ran", {"blue dog ran"}},
    };
    expect(cider(disjoint).per_item[0] == 0.0, "zero-overlap caption must score 0");

    // Hand case: unigram cosine 1/2 on item 1 (idf ln2 everywhere), empty
    // higher orders; identical two-token item 2 -> mean(1,1,0,0)*10.
    const std::vector<CaptionItem> partial = {
        {"red cat", {"red dog"}},
        {"blue fish", {"blue fish"}},
    };
    const CiderResult r = cider(partial);
    expect_near(r.per_item[0], 1.25, 1e-6, "hand-computed partial overlap item");
    expect_near(r.per_item[1], 5.0, 1e-6, "identical two-token item");
    expect_near(r.corpus_score, 3.125, 1e-6, "partial-overlap corpus mean");
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli_path = argv[1];

    run_criterion(1, "patch-budget reproduction", 1.0, criterion_patch_budgets);
    run_criterion(2, "grid-oracle equivalence (500 cases)", 10.0, criterion_grid_oracle);
    run_criterion(3, "detection-matching oracle (200 cases)", 0.0, criterion_detection_oracle);
    run_criterion(4, "metric hand values", 0.0, criterion_metric_hand_values);
    run_criterion(5, "schema roundtrip + fuzz (1000 each)", 30.0, criterion_schema_roundtrip);
    run_criterion(6, "quantization idempotence and monotonicity", 0.0, criterion_quantization);
    run_criterion(7, "MPDocVQA decomposition", 0.0, criterion_mpdocvqa);
    run_criterion(8, "mixture weighting", 0.0, criterion_mixture_weights);
    run_criterion(9, "end-to-end generation via the CLI", 5.0, criterion_end_to_end_generation);
    run_criterion(10, "template fidelity", 0.0, criterion_template_fidelity);
    run_criterion(11, "CIDEr sanity", 0.0, criterion_cider);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}

// Serial vs OpenMP corpus evaluation. The serial path is the reference
// implementation; the parallel path must produce identical results (asserted
// in tests/test_corpus_eval.cpp), so this target only measures throughput.
//
//   cmake --build build --target screenkit_bench && ./build/screenkit_bench

#include <benchmark/benchmark.h>

#include <random>

#include "screenkit/corpus_eval.hpp"
#include "screenkit/rng.hpp"

using namespace screenkit;

namespace {

std::vector<EvalRecord> text_corpus(std::size_t n, std::size_t words_per_text) {
    static const std::vector<std::string> vocab = {
        "screen", "button", "image", "settings", "profile", "search", "menu",
        "toggle", "enabled", "wifi",  "battery", "signal",  "volume", "privacy",
    };
    std::mt19937_64 gen(1234);
    auto sentence = [&]() {
        std::string s;
        for (std::size_t k = 0; k < words_per_text; ++k) {
            if (k) s += ' ';
            s += vocab[bounded_u64(gen, vocab.size())];
        }
        return s;
    };
    std::vector<EvalRecord> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i].id = std::to_string(i);
        out[i].prediction = sentence();
        out[i].gold_candidates = {sentence(), sentence(), sentence()};
    }
    return out;
}

std::vector<EvalRecord> box_corpus(std::size_t n, std::size_t boxes_per_record) {
    std::mt19937_64 gen(987);
    auto box = [&]() {
        const int y = static_cast<int>(bounded_u64(gen, 900));
        const int x = static_cast<int>(bounded_u64(gen, 900));
        return QuantBox{y, x, y + static_cast<int>(bounded_u64(gen, 99)),
                        x + static_cast<int>(bounded_u64(gen, 99))};
    };
    std::vector<EvalRecord> out(n);
    for (auto& r : out) {
        for (std::size_t k = 0; k < boxes_per_record; ++k) {
            r.pred_boxes.emplace_back(ElementClass{"TEXT"}, box());
            r.gold_boxes.emplace_back(ElementClass{"TEXT"}, box());
        }
    }
    return out;
}

EvalOptions options(bool parallel) {
    EvalOptions opts;
    opts.mode = parallel ? EvalMode::parallel : EvalMode::serial;
    return opts;
}

void bench_metric(benchmark::State& state, const std::vector<EvalRecord>& corpus,
                  const char* metric, bool parallel) {
    const EvalOptions opts = options(parallel);
    for (auto _ : state) {
        const MetricReport report = evaluate_corpus(corpus, metric, opts);
        benchmark::DoNotOptimize(report.score);
    }
    state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) *
                            static_cast<int64_t>(corpus.size()));
}

void anls_serial(benchmark::State& state) {
    bench_metric(state, text_corpus(20000, 8), "anls", false);
}
void anls_parallel(benchmark::State& state) {
    bench_metric(state, text_corpus(20000, 8), "anls", true);
}
void squad_f1_serial(benchmark::State& state) {
    bench_metric(state, text_corpus(20000, 8), "squad_f1", false);
}
void squad_f1_parallel(benchmark::State& state) {
    bench_metric(state, text_corpus(20000, 8), "squad_f1", true);
}
void cider_serial(benchmark::State& state) {
    bench_metric(state, text_corpus(5000, 10), "cider", false);
}
void cider_parallel(benchmark::State& state) {
    bench_metric(state, text_corpus(5000, 10), "cider", true);
}
void detection_f1_serial(benchmark::State& state) {
    bench_metric(state, box_corpus(2000, 12), "detection_f1", false);
}
void detection_f1_parallel(benchmark::State& state) {
    bench_metric(state, box_corpus(2000, 12), "detection_f1", true);
}

BENCHMARK(anls_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(anls_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(squad_f1_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(squad_f1_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(cider_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(cider_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(detection_f1_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(detection_f1_parallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();

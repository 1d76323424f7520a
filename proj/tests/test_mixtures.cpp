#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "screenkit/mixtures.hpp"
#include "screenkit/rng.hpp"

using namespace screenkit;

namespace {

MixtureSpec spec_of(std::vector<std::pair<std::string, std::uint64_t>> sizes, double cap) {
    MixtureSpec s;
    s.cap = cap;
    for (auto& [task, size] : sizes) s.entries.push_back({task, size, ""});
    return s;
}

TaskRecord qa_record(const std::string& ref) {
    return TaskRecord{TaskType::screen_qa, ref, "q", "a", nlohmann::json::object()};
}

}  // namespace

TEST_CASE("compute_weights hand cases") {
    const auto plain = compute_weights(spec_of({{"a", 100}, {"b", 300}}, 1.0));
    CHECK(plain.at("a") == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(plain.at("b") == doctest::Approx(0.75).epsilon(1e-12));

    const auto clamped = compute_weights(spec_of({{"a", 100}, {"b", 900}}, 0.5));
    CHECK(clamped.at("a") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(clamped.at("b") == doctest::Approx(0.5).epsilon(1e-12));

    const auto filled = compute_weights(spec_of({{"a", 1}, {"b", 1}, {"c", 8}}, 0.4));
    CHECK(filled.at("a") == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(filled.at("b") == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(filled.at("c") == doctest::Approx(0.4).epsilon(1e-12));
}

TEST_CASE("compute_weights validation") {
    CHECK_THROWS_AS(compute_weights(spec_of({}, 0.5)), ValueError);
    CHECK_THROWS_AS(compute_weights(spec_of({{"a", 1}, {"b", 1}, {"c", 1}}, 0.2)), ValueError);
    CHECK_THROWS_AS(compute_weights(spec_of({{"a", 0}}, 1.0)), ValueError);
    CHECK_THROWS_AS(compute_weights(spec_of({{"a", 1}, {"a", 1}}, 1.0)), ValueError);
    CHECK_THROWS_AS(compute_weights(spec_of({{"a", 1}}, 0.0)), ValueError);
}

TEST_CASE("compute_weights invariants on random specs") {
    std::mt19937_64 gen(71);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + bounded_u64(gen, 10);
        MixtureSpec spec;
        for (std::size_t i = 0; i < n; ++i)
            spec.entries.push_back(
                {"t" + std::to_string(i), 1 + bounded_u64(gen, 1000000), ""});
        const double min_cap = 1.0 / static_cast<double>(n);
        spec.cap = min_cap + (1.0 - min_cap) * unit_double(gen);

        const auto weights = compute_weights(spec);
        double sum = 0.0;
        for (const auto& [task, w] : weights) {
            REQUIRE(w >= 0.0);
            REQUIRE(w <= spec.cap + 1e-12);
            sum += w;
        }
        REQUIRE(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("compute_weights is permutation equivariant") {
    std::mt19937_64 gen(73);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + bounded_u64(gen, 6);
        MixtureSpec spec;
        for (std::size_t i = 0; i < n; ++i)
            spec.entries.push_back({"t" + std::to_string(i), 1 + bounded_u64(gen, 10000), ""});
        spec.cap = std::max(1.0 / static_cast<double>(n) + 1e-9, unit_double(gen));

        MixtureSpec shuffled = spec;
        for (std::size_t i = shuffled.entries.size(); i > 1; --i)
            std::swap(shuffled.entries[i - 1], shuffled.entries[bounded_u64(gen, i)]);

        const auto a = compute_weights(spec);
        const auto b = compute_weights(shuffled);
        for (const auto& [task, w] : a) REQUIRE(w == doctest::Approx(b.at(task)).epsilon(1e-12));
    }
}

TEST_CASE("removing the cap reproduces plain proportionality") {
    const auto w = compute_weights(spec_of({{"a", 2}, {"b", 3}, {"c", 5}}, 1.0));
    CHECK(w.at("a") == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(w.at("b") == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(w.at("c") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("sample_mixture basics") {
    MixtureSpec spec = spec_of({{"only", 10}}, 1.0);
    const auto weights = compute_weights(spec);
    std::vector<std::vector<TaskRecord>> sources{{qa_record("a"), qa_record("b")}};
    std::vector<TaskRecord> out;
    sample_mixture(spec, weights, sources, 50, 1, [&](const TaskRecord& r) { out.push_back(r); });
    CHECK(out.size() == 50);

    // zero-weight task never drawn
    MixtureSpec two = spec_of({{"a", 10}, {"b", 10}}, 1.0);
    std::map<std::string, double> forced{{"a", 1.0}, {"b", 0.0}};
    std::vector<std::vector<TaskRecord>> both{{qa_record("from_a")}, {qa_record("from_b")}};
    std::vector<TaskRecord> drawn;
    sample_mixture(two, forced, both, 200, 7, [&](const TaskRecord& r) { drawn.push_back(r); });
    CHECK(std::all_of(drawn.begin(), drawn.end(),
                      [](const TaskRecord& r) { return r.image_ref == "from_a"; }));

    // weighted task with an empty source is an error
    std::vector<std::vector<TaskRecord>> empty_b{{qa_record("x")}, {}};
    CHECK_THROWS_AS(
        sample_mixture(two, compute_weights(two), empty_b, 10, 1, [](const TaskRecord&) {}),
        ValueError);
}

TEST_CASE("sample_mixture is deterministic and near binomial") {
    MixtureSpec spec = spec_of({{"a", 500}, {"b", 500}}, 1.0);
    const auto weights = compute_weights(spec);
    std::vector<std::vector<TaskRecord>> sources{{qa_record("a")}, {qa_record("b")}};

    std::vector<std::string> run1, run2;
    sample_mixture(spec, weights, sources, 10000, 99,
                   [&](const TaskRecord& r) { run1.push_back(r.image_ref); });
    sample_mixture(spec, weights, sources, 10000, 99,
                   [&](const TaskRecord& r) { run2.push_back(r.image_ref); });
    REQUIRE(run1 == run2);  // byte-identical across runs

    const auto count_a = static_cast<double>(std::count(run1.begin(), run1.end(), "a"));
    const double sigma = std::sqrt(10000 * 0.5 * 0.5);
    CHECK(std::abs(count_a - 5000.0) <= 3.0 * sigma);
}

TEST_CASE("task record round trip") {
    TaskRecord r{TaskType::screen_navigation, "img", "go back", "click 1 2 3 4",
                 {{"custom_key", "preserved"}, {"n", 7}}};
    const TaskRecord back = parse_task_record(serialize_task_record(r));
    CHECK(back == r);
    CHECK(back.metadata.at("custom_key") == "preserved");  // open map

    CHECK_THROWS_AS(parse_task_record(R"({"image_ref":"x"})"), ParseError);  // no task_type
    CHECK_THROWS_AS(parse_task_record(R"({"task_type":"bogus","image_ref":"x","input_text":"",)"
                                      R"("target_text":""})"),
                    ParseError);
    CHECK_THROWS_AS(
        parse_task_record(R"({"task_type":"screen_navigation","image_ref":"x","input_text":"",)"
                          R"("target_text":"press 1 2 3 4"})"),
        ParseError);
    CHECK_THROWS_AS(
        parse_task_record(R"({"task_type":"screen_annotation","image_ref":"x","input_text":"",)"
                          R"("target_text":"not a schema ("})"),
        ParseError);

    // annotation targets must parse as schema text
    const TaskRecord ann = parse_task_record(
        R"({"task_type":"screen_annotation","image_ref":"x","input_text":"",)"
        R"("target_text":"TEXT \"Hi\" 0 0 10 10"})");
    CHECK(ann.task_type == TaskType::screen_annotation);
}

TEST_CASE("build_mpdocvqa_pairs decomposition") {
    const std::vector<std::string> pages{"p0", "p1", "p2"};
    const auto pairs = build_mpdocvqa_pairs("q", "ans", pages, 1, 1.0, 5);
    REQUIRE(pairs.size() == 3);
    CHECK(pairs[0].polarity == PagePair::Polarity::negative);
    CHECK(pairs[0].answer == kNoAnswerMarker);
    CHECK(pairs[1].polarity == PagePair::Polarity::positive);
    CHECK(pairs[1].answer == "ans");
    CHECK(pairs[2].polarity == PagePair::Polarity::negative);

    const auto single = build_mpdocvqa_pairs("q", "ans", {"only"}, 0, 1.0, 5);
    REQUIRE(single.size() == 1);
    CHECK(single[0].polarity == PagePair::Polarity::positive);

    const auto none_kept = build_mpdocvqa_pairs("q", "ans", {"a", "b", "c", "d", "e"}, 2, 0.0, 5);
    REQUIRE(none_kept.size() == 1);
    CHECK(none_kept[0].page_ref == "c");

    CHECK_THROWS_AS(build_mpdocvqa_pairs("q", "a", pages, 3, 1.0, 5), ValueError);
    CHECK_THROWS_AS(build_mpdocvqa_pairs("q", "a", pages, 0, 1.5, 5), ValueError);
}

TEST_CASE("build_mpdocvqa_pairs negative count is binomial") {
    const std::vector<std::string> pages{"p0", "p1", "p2", "p3", "p4"};
    const double keep = 0.25;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    const int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        const auto pairs =
            build_mpdocvqa_pairs("q", "a", pages, 2, keep, static_cast<std::uint64_t>(t));
        for (const auto& p : pairs)
            (p.polarity == PagePair::Polarity::positive ? positives : negatives) += 1;
    }
    CHECK(positives == static_cast<std::size_t>(trials));  // exactly one positive, always
    const double expected = trials * 4 * keep;
    const double sigma = std::sqrt(trials * 4 * keep * (1 - keep));
    CHECK(std::abs(static_cast<double>(negatives) - expected) <= 3.0 * sigma);
}

TEST_CASE("score_mpdocvqa") {
    CHECK(score_mpdocvqa({{"only", 0.3}}) == "only");
    CHECK(score_mpdocvqa({{"a", 0.2}, {"b", 0.9}}) == "b");
    CHECK(score_mpdocvqa({{"a", 0.9}, {"b", 0.9}}) == "a");  // tie to the lowest page
    CHECK(score_mpdocvqa({{kNoAnswerMarker, 0.99}, {"real", 0.1}}) == "real");
    CHECK(score_mpdocvqa({{kNoAnswerMarker, 0.9}, {kNoAnswerMarker, 0.8}}) == kNoAnswerMarker);
    CHECK_THROWS_AS(score_mpdocvqa({}), ValueError);
}

TEST_CASE("mixture manifest includes weights and checksums") {
    MixtureSpec spec = spec_of({{"a", 1}, {"b", 3}}, 1.0);
    const auto weights = compute_weights(spec);
    const nlohmann::json manifest = mixture_manifest(spec, weights, 42);
    CHECK(manifest.at("seed") == 42);
    CHECK(manifest.at("cap") == 1.0);
    REQUIRE(manifest.at("tasks").size() == 2);
    CHECK(manifest.at("tasks")[0].at("weight").get<double>() == doctest::Approx(0.25));
    CHECK(manifest.at("tasks")[0].contains("checksum_fnv1a64"));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "screenkit/patching.hpp"
#include "testutil.hpp"

using namespace screenkit;

TEST_CASE("compute_grid reproduces the square budget cases") {
    const PatchGrid g2b = compute_grid(756, 756, 14, 2916);
    CHECK(g2b.rows == 54);
    CHECK(g2b.cols == 54);
    CHECK(g2b.scaled_w == 756);
    CHECK(g2b.pad_right == 0);

    const PatchGrid g5b = compute_grid(812, 812, 14, 3364);
    CHECK(g5b.rows == 58);
    CHECK(g5b.cols == 58);

    // 2024 cannot hold a 45x45 grid (2025 patches); the budget is binding.
    const PatchGrid g670 = compute_grid(720, 720, 16, 2024);
    CHECK(static_cast<long long>(g670.rows) * g670.cols <= 2024);
    CHECK(std::max(g670.rows, g670.cols) >= 44);
    CHECK(std::max(g670.rows, g670.cols) <= 45);
}

TEST_CASE("compute_grid budget one") {
    const PatchGrid g = compute_grid(1234, 777, 16, 1);
    CHECK(g.rows == 1);
    CHECK(g.cols == 1);
    CHECK(g.scaled_w <= 16);
    CHECK(g.scaled_h <= 16);
}

TEST_CASE("compute_grid upscales small images to fill the budget") {
    const PatchGrid g = compute_grid(10, 10, 16, 2916);
    CHECK(g.rows == 54);
    CHECK(g.cols == 54);
}

TEST_CASE("compute_grid rejects bad inputs") {
    CHECK_THROWS_AS(compute_grid(0, 10, 16, 100), ValueError);
    CHECK_THROWS_AS(compute_grid(10, -1, 16, 100), ValueError);
    CHECK_THROWS_AS(compute_grid(10, 10, 0, 100), ValueError);
    CHECK_THROWS_AS(compute_grid(10, 10, 16, 0), ValueError);
}

TEST_CASE("compute_grid agrees with the exhaustive oracle") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 500; ++trial) {
        const int width = 1 + static_cast<int>(bounded_u64(gen, 4000));
        const int height = 1 + static_cast<int>(bounded_u64(gen, 4000));
        const int patch = 1 + static_cast<int>(bounded_u64(gen, 64));
        const long long budget = 1 + static_cast<long long>(bounded_u64(gen, 200));
        const PatchGrid g = compute_grid(width, height, patch, budget);
        const testutil::OracleGrid expect = testutil::grid_oracle(width, height, budget);
        REQUIRE_MESSAGE(g.rows == expect.rows,
                        "w=" << width << " h=" << height << " p=" << patch << " b=" << budget);
        REQUIRE_MESSAGE(g.cols == expect.cols,
                        "w=" << width << " h=" << height << " p=" << patch << " b=" << budget);
    }
}

TEST_CASE("compute_grid respects the budget and monotonicity") {
    std::mt19937_64 gen(31);
    for (int trial = 0; trial < 300; ++trial) {
        const int width = 1 + static_cast<int>(bounded_u64(gen, 5000));
        const int height = 1 + static_cast<int>(bounded_u64(gen, 5000));
        const int patch = 1 + static_cast<int>(bounded_u64(gen, 32));
        const long long budget = 1 + static_cast<long long>(bounded_u64(gen, 4000));
        const PatchGrid g = compute_grid(width, height, patch, budget);
        REQUIRE(static_cast<long long>(g.rows) * g.cols <= budget);
        const PatchGrid bigger = compute_grid(width, height, patch, budget + 1 + static_cast<long long>(bounded_u64(gen, 100)));
        REQUIRE(static_cast<long long>(bigger.rows) * bigger.cols >=
                static_cast<long long>(g.rows) * g.cols);
    }
}

TEST_CASE("square input gives a square grid") {
    std::mt19937_64 gen(37);
    for (int trial = 0; trial < 100; ++trial) {
        const int side = 1 + static_cast<int>(bounded_u64(gen, 3000));
        const int patch = 1 + static_cast<int>(bounded_u64(gen, 32));
        const long long budget = 1 + static_cast<long long>(bounded_u64(gen, 4000));
        const PatchGrid g = compute_grid(side, side, patch, budget);
        CHECK(std::abs(g.rows - g.cols) <= 1);
    }
}

TEST_CASE("grid invariants: padding completes the canvas") {
    std::mt19937_64 gen(41);
    for (int trial = 0; trial < 200; ++trial) {
        const int width = 1 + static_cast<int>(bounded_u64(gen, 3000));
        const int height = 1 + static_cast<int>(bounded_u64(gen, 3000));
        const int patch = 1 + static_cast<int>(bounded_u64(gen, 32));
        const long long budget = 1 + static_cast<long long>(bounded_u64(gen, 3000));
        const PatchGrid g = compute_grid(width, height, patch, budget);
        CHECK(g.scaled_w + g.pad_right == g.cols * g.patch_size);
        CHECK(g.scaled_h + g.pad_bottom == g.rows * g.patch_size);
        CHECK(g.pad_right >= 0);
        CHECK(g.pad_bottom >= 0);
    }
}

TEST_CASE("fixed_grid takes the largest square under the budget") {
    CHECK(fixed_grid(14, 2025).rows == 45);
    CHECK(fixed_grid(14, 2024).rows == 44);  // floor(sqrt(2024))
    CHECK(fixed_grid(16, 1).rows == 1);
    const PatchGrid g = fixed_grid(16, 2025);
    CHECK(g.cols == 45);
    CHECK(g.pad_right == 0);  // stretched, never padded
    CHECK(g.scaled_w == 45 * 16);
    CHECK_THROWS_AS(fixed_grid(16, 0), ValueError);
}

TEST_CASE("patch_rects tiles the canvas exactly") {
    const auto single = patch_rects(PatchGrid{1, 1, 16, 16, 16, 0, 0});
    REQUIRE(single.size() == 1);
    CHECK(single[0] == PixelBox{0, 0, 16, 16});

    const auto four = patch_rects(PatchGrid{2, 2, 8, 16, 16, 0, 0});
    REQUIRE(four.size() == 4);
    for (std::size_t i = 0; i < four.size(); ++i)
        for (std::size_t j = i + 1; j < four.size(); ++j) CHECK(iou(four[i], four[j]) == 0.0);

    std::mt19937_64 gen(43);
    for (int trial = 0; trial < 50; ++trial) {
        PatchGrid g;
        g.rows = 1 + static_cast<int>(bounded_u64(gen, 20));
        g.cols = 1 + static_cast<int>(bounded_u64(gen, 20));
        g.patch_size = 1 + static_cast<int>(bounded_u64(gen, 32));
        const auto rects = patch_rects(g);
        REQUIRE(rects.size() == static_cast<std::size_t>(g.rows) * g.cols);
        double area = 0;
        for (const auto& r : rects) area += r.area();
        CHECK(area == doctest::Approx(static_cast<double>(g.canvas_w()) * g.canvas_h()));
    }
}

TEST_CASE("aspect_ratio_bucket") {
    CHECK(aspect_ratio_bucket(720, 1280) == AspectBucket::portrait);
    CHECK(aspect_ratio_bucket(1280, 720) == AspectBucket::landscape);
    CHECK(aspect_ratio_bucket(100, 100) == AspectBucket::square);
    CHECK(to_string(AspectBucket::portrait) == "portrait");
    CHECK_THROWS_AS(aspect_ratio_bucket(0, 10), ValueError);
}

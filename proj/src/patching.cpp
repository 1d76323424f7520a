#include "screenkit/patching.hpp"

#include <algorithm>
#include <cmath>

namespace screenkit {

namespace {

struct GridShape {
    long long rows, cols;
};

GridShape shape_at(double scale, int width, int height, int patch_size) {
    auto dim = [&](int extent) -> long long {
        const double patches = scale * extent / patch_size;
        return std::max(1LL, static_cast<long long>(std::ceil(patches)));
    };
    return {dim(height), dim(width)};
}

// A pair (rows, cols) is achievable when some scale s yields exactly
// rows = ceil(s*h/p) and cols = ceil(s*w/p). At the pair's own maximal scale
// min(rows*p/h, cols*p/w) the binding dimension is exact and the other must
// round up to its value; the patch size cancels, so the test is exact in
// integers.
bool pair_achievable(long long rows, long long cols, long long width, long long height) {
    if (rows < 1 || cols < 1) return false;
    if (rows * width <= cols * height)  // rows bind
        return height * (cols - 1) < rows * width && rows * width <= height * cols;
    return width * (rows - 1) < cols * height && cols * height <= width * rows;  // cols bind
}

// Maximal scale of an achievable pair, as a fraction (patch size dropped).
struct ScaleFrac {
    long long num, den;
};

ScaleFrac pair_scale(long long rows, long long cols, long long width, long long height) {
    if (rows * width <= cols * height) return {rows, height};
    return {cols, width};
}

bool scale_less(const ScaleFrac& a, const ScaleFrac& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

}  // namespace

PatchGrid compute_grid(int width, int height, int patch_size, long long budget) {
    if (width <= 0 || height <= 0) throw ValueError("image dimensions must be positive");
    if (patch_size <= 0) throw ValueError("patch size must be positive");
    if (budget < 1) throw ValueError("patch budget must be at least 1");

    auto fits = [&](double s) {
        const GridShape g = shape_at(s, width, height, patch_size);
        return g.rows * g.cols <= budget;
    };

    // Bracket the maximal feasible scale, then bisect until the interval
    // collapses (well past the 1e-6 precision the contract asks for).
    double lo = 0.0;
    double hi = 1.0;
    while (fits(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (fits(mid)) lo = mid;
        else hi = mid;
    }

    // The bisected scale sits within rounding error of the true optimum,
    // where a doubly-critical boundary (both dimensions at exact patch
    // counts) can land float evaluation one step off. Snap to the exact
    // optimum among the +/-2 neighborhood, compared in integer arithmetic.
    const GridShape fp = shape_at(lo, width, height, patch_size);
    long long best_rows = 1, best_cols = 1;  // 1x1 is always achievable
    ScaleFrac best_scale = pair_scale(1, 1, width, height);
    for (long long r = std::max(1LL, fp.rows - 2); r <= fp.rows + 2; ++r) {
        for (long long c = std::max(1LL, fp.cols - 2); c <= fp.cols + 2; ++c) {
            if (r * c > budget || !pair_achievable(r, c, width, height)) continue;
            const ScaleFrac s = pair_scale(r, c, width, height);
            if (scale_less(best_scale, s)) {
                best_scale = s;
                best_rows = r;
                best_cols = c;
            }
        }
    }

    const double scale =
        static_cast<double>(best_scale.num) * patch_size / static_cast<double>(best_scale.den);
    PatchGrid out;
    out.rows = static_cast<int>(best_rows);
    out.cols = static_cast<int>(best_cols);
    out.patch_size = patch_size;
    out.scaled_w = static_cast<int>(
        std::clamp<long long>(std::llround(scale * width), 1, best_cols * patch_size));
    out.scaled_h = static_cast<int>(
        std::clamp<long long>(std::llround(scale * height), 1, best_rows * patch_size));
    out.pad_right = out.canvas_w() - out.scaled_w;
    out.pad_bottom = out.canvas_h() - out.scaled_h;
    return out;
}

PatchGrid fixed_grid(int patch_size, long long budget) {
    if (patch_size <= 0) throw ValueError("patch size must be positive");
    if (budget < 1) throw ValueError("patch budget must be at least 1");

    long long side = static_cast<long long>(std::sqrt(static_cast<double>(budget)));
    while (side * side > budget) --side;
    while ((side + 1) * (side + 1) <= budget) ++side;

    PatchGrid out;
    out.rows = out.cols = static_cast<int>(side);
    out.patch_size = patch_size;
    out.scaled_w = out.canvas_w();  // stretched, no padding
    out.scaled_h = out.canvas_h();
    out.pad_right = 0;
    out.pad_bottom = 0;
    return out;
}

std::vector<PixelBox> patch_rects(const PatchGrid& g) {
    if (g.rows < 1 || g.cols < 1 || g.patch_size < 1) throw ValueError("invalid patch grid");
    std::vector<PixelBox> out;
    out.reserve(static_cast<std::size_t>(g.rows) * static_cast<std::size_t>(g.cols));
    const double p = g.patch_size;
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            out.push_back(PixelBox{r * p, c * p, (r + 1) * p, (c + 1) * p});
    return out;
}

AspectBucket aspect_ratio_bucket(int width, int height) {
    if (width <= 0 || height <= 0) throw ValueError("image dimensions must be positive");
    if (width > height) return AspectBucket::landscape;
    if (width < height) return AspectBucket::portrait;
    return AspectBucket::square;
}

std::string to_string(AspectBucket bucket) {
    switch (bucket) {
        case AspectBucket::portrait: return "portrait";
        case AspectBucket::landscape: return "landscape";
        case AspectBucket::square: return "square";
    }
    return "square";
}

}  // namespace screenkit

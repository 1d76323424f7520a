#pragma once

#include <string>
#include <vector>

#include "screenkit/geometry.hpp"

namespace screenkit {

// A rows x cols patch decomposition. The content is resized to
// scaled_w x scaled_h preserving aspect ratio, then padded right/bottom to
// the patch-multiple canvas.
struct PatchGrid {
    int rows = 1;
    int cols = 1;
    int patch_size = 1;
    int scaled_w = 1;
    int scaled_h = 1;
    int pad_right = 0;
    int pad_bottom = 0;

    bool operator==(const PatchGrid&) const = default;

    int canvas_w() const { return cols * patch_size; }
    int canvas_h() const { return rows * patch_size; }
};

// Variable grid: the maximal uniform scale s (binary search) such that
// ceil(s*h/p) * ceil(s*w/p) <= budget; rows/cols from that scale, each at
// least 1. Upscales small images when the budget allows.
PatchGrid compute_grid(int width, int height, int patch_size, long long budget);

// Ablation baseline: a square grid of side floor(sqrt(budget)); images are
// stretched to side*patch_size regardless of aspect ratio.
PatchGrid fixed_grid(int patch_size, long long budget);

// Row-major, non-overlapping tiling of the padded canvas.
std::vector<PixelBox> patch_rects(const PatchGrid& g);

enum class AspectBucket { portrait, landscape, square };

// landscape iff w/h > 1, portrait iff < 1, else square.
AspectBucket aspect_ratio_bucket(int width, int height);
std::string to_string(AspectBucket bucket);

}  // namespace screenkit

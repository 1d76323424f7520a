#pragma once

#include <array>
#include <string>

#include "screenkit/errors.hpp"

namespace screenkit {

inline constexpr int kQuantBuckets = 1000;
inline constexpr int kQuantMax = 999;

// Bounding box in bucketized coordinates, each value in 0..999 inclusive.
struct QuantBox {
    int ymin = 0;
    int xmin = 0;
    int ymax = 0;
    int xmax = 0;

    bool operator==(const QuantBox&) const = default;

    bool valid() const {
        return 0 <= ymin && ymin <= ymax && ymax <= kQuantMax && 0 <= xmin && xmin <= xmax &&
               xmax <= kQuantMax;
    }
    long long area() const {
        return static_cast<long long>(ymax - ymin) * static_cast<long long>(xmax - xmin);
    }
};

// Box in pixel units. The owning image's extent is carried separately.
struct PixelBox {
    double ymin = 0;
    double xmin = 0;
    double ymax = 0;
    double xmax = 0;

    bool operator==(const PixelBox&) const = default;

    bool valid() const { return ymin >= 0 && xmin >= 0 && ymin <= ymax && xmin <= xmax; }
    double area() const { return (ymax - ymin) * (xmax - xmin); }
};

// Serialization order of the four box coordinates in schema text, click
// targets, and JSONL box arrays.
enum class CoordOrder {
    ymin_xmin_ymax_xmax,  // default
    xmin_ymin_xmax_ymax,
};

CoordOrder coord_order_from_string(const std::string& name);
std::string to_string(CoordOrder order);

std::array<int, 4> box_to_coords(const QuantBox& b, CoordOrder order);
// Throws ValueError when the values are out of range or min/max are inverted.
QuantBox box_from_coords(const std::array<int, 4>& c, CoordOrder order);

// floor(c / extent * 1000) per coordinate, clamped to 0..999. Rejects
// non-positive extents and boxes outside [0,width]x[0,height].
QuantBox quantize_box(const PixelBox& b, double width, double height);

// Bucket-center mapping: c_px = (q + 0.5) / 1000 * extent.
PixelBox dequantize_box(const QuantBox& q, double width, double height);

// Intersection over union. Zero-area boxes score 0 against everything,
// including themselves.
double iou(const QuantBox& a, const QuantBox& b);
double iou(const PixelBox& a, const PixelBox& b);

}  // namespace screenkit

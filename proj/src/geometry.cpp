#include "screenkit/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace screenkit {

CoordOrder coord_order_from_string(const std::string& name) {
    if (name == "yxyx" || name == "ymin_xmin_ymax_xmax") return CoordOrder::ymin_xmin_ymax_xmax;
    if (name == "xyxy" || name == "xmin_ymin_xmax_ymax") return CoordOrder::xmin_ymin_xmax_ymax;
    throw ValueError("unknown coordinate order: " + name);
}

std::string to_string(CoordOrder order) {
    return order == CoordOrder::ymin_xmin_ymax_xmax ? "yxyx" : "xyxy";
}

std::array<int, 4> box_to_coords(const QuantBox& b, CoordOrder order) {
    if (order == CoordOrder::ymin_xmin_ymax_xmax) return {b.ymin, b.xmin, b.ymax, b.xmax};
    return {b.xmin, b.ymin, b.xmax, b.ymax};
}

QuantBox box_from_coords(const std::array<int, 4>& c, CoordOrder order) {
    QuantBox b;
    if (order == CoordOrder::ymin_xmin_ymax_xmax) {
        b = {c[0], c[1], c[2], c[3]};
    } else {
        b = {c[1], c[0], c[3], c[2]};
    }
    if (b.ymin < 0 || b.xmin < 0 || b.ymax > kQuantMax || b.xmax > kQuantMax)
        throw ValueError("box coordinate outside 0..999");
    if (b.ymax < b.ymin) throw ValueError("box has ymax < ymin");
    if (b.xmax < b.xmin) throw ValueError("box has xmax < xmin");
    return b;
}

namespace {

int quantize_coord(double c, double extent) {
    int q = static_cast<int>(std::floor(c / extent * kQuantBuckets));
    return std::clamp(q, 0, kQuantMax);
}

}  // namespace

QuantBox quantize_box(const PixelBox& b, double width, double height) {
    if (!(width > 0) || !(height > 0)) throw ValueError("image extent must be positive");
    if (!b.valid()) throw ValueError("pixel box has negative or inverted coordinates");
    if (b.ymax > height || b.xmax > width) throw ValueError("pixel box exceeds image extent");
    return QuantBox{quantize_coord(b.ymin, height), quantize_coord(b.xmin, width),
                    quantize_coord(b.ymax, height), quantize_coord(b.xmax, width)};
}

PixelBox dequantize_box(const QuantBox& q, double width, double height) {
    if (!(width > 0) || !(height > 0)) throw ValueError("image extent must be positive");
    if (!q.valid()) throw ValueError("invalid quantized box");
    auto center = [](int v, double extent) { return (v + 0.5) / kQuantBuckets * extent; };
    return PixelBox{center(q.ymin, height), center(q.xmin, width), center(q.ymax, height),
                    center(q.xmax, width)};
}

double iou(const QuantBox& a, const QuantBox& b) {
    const long long ay = std::max(0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
    const long long ax = std::max(0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
    const long long inter = ay * ax;
    const long long uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double iou(const PixelBox& a, const PixelBox& b) {
    const double ay = std::max(0.0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
    const double ax = std::max(0.0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
    const double inter = ay * ax;
    const double uni = a.area() + b.area() - inter;
    if (uni <= 0) return 0.0;
    return inter / uni;
}

}  // namespace screenkit

#pragma once

#include <string>
#include <vector>

#include "screenkit/schema.hpp"

namespace screenkit {

struct Detection {
    ElementClass cls;
    PixelBox box;
    double score = 1.0;  // in [0,1]; composition never filters by score
};

struct OcrWord {
    std::string text;  // non-empty
    PixelBox box;
};

struct CaptionAnnotation {
    std::string text;  // non-empty
    PixelBox box;
};

// Fraction of a child's area a parent box must cover, on quantized boxes.
inline constexpr double kContainmentThreshold = 0.9;

// Stable sort by (ymin, xmin) of the quantized boxes: top-to-bottom, then
// left-to-right.
std::vector<UiElement> reading_order(std::vector<UiElement> elements);

// Builds a forest from a flat element list: B becomes a child of the
// smallest A whose box covers >= kContainmentThreshold of B's area. Ties go
// to the earlier list index. A zero-area element never nests, and an element
// only attaches to a strictly larger box (or an equal-area earlier one), so
// mutual containment cannot form a cycle. Sibling order follows input order.
ScreenSchema nest_by_containment(std::vector<UiElement> elements);

// The combination step: detections become elements with quantized boxes;
// OCR words attach to the smallest element containing their center (payload
// in reading order) or become TEXT roots; captions attach to the
// max-IoU IMAGE/PICTOGRAM element. Hierarchy from nest_by_containment,
// siblings sorted in reading order.
ScreenSchema compose_schema(const std::vector<Detection>& detections,
                            const std::vector<OcrWord>& ocr_words,
                            const std::vector<CaptionAnnotation>& captions, double width,
                            double height);

}  // namespace screenkit

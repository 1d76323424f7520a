#include "screenkit/compose.hpp"

#include <algorithm>
#include <limits>
#include <optional>

namespace screenkit {

namespace {

bool is_ws_char(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool trimmed_empty(const std::string& s) {
    return std::all_of(s.begin(), s.end(), is_ws_char);
}

void check_in_extent(const PixelBox& b, double width, double height, const char* what) {
    if (!b.valid()) throw ValueError(std::string(what) + " box has invalid coordinates");
    if (b.ymax > height || b.xmax > width)
        throw ValueError(std::string(what) + " box exceeds image extent");
}

struct ReadingKey {
    int ymin, xmin;
    bool operator<(const ReadingKey& o) const {
        return ymin != o.ymin ? ymin < o.ymin : xmin < o.xmin;
    }
};

void sort_siblings_recursive(std::vector<UiElement>& elements) {
    std::stable_sort(elements.begin(), elements.end(), [](const UiElement& a, const UiElement& b) {
        return ReadingKey{a.box.ymin, a.box.xmin} < ReadingKey{b.box.ymin, b.box.xmin};
    });
    for (auto& e : elements) sort_siblings_recursive(e.children);
}

}  // namespace

std::vector<UiElement> reading_order(std::vector<UiElement> elements) {
    std::stable_sort(elements.begin(), elements.end(), [](const UiElement& a, const UiElement& b) {
        return ReadingKey{a.box.ymin, a.box.xmin} < ReadingKey{b.box.ymin, b.box.xmin};
    });
    return elements;
}

ScreenSchema nest_by_containment(std::vector<UiElement> elements) {
    const std::size_t n = elements.size();
    for (const auto& e : elements)
        if (!e.children.empty()) throw ValueError("nest_by_containment expects a flat list");

    auto intersection_area = [](const QuantBox& a, const QuantBox& b) -> long long {
        const long long ay = std::max(0, std::min(a.ymax, b.ymax) - std::max(a.ymin, b.ymin));
        const long long ax = std::max(0, std::min(a.xmax, b.xmax) - std::max(a.xmin, b.xmin));
        return ay * ax;
    };

    std::vector<std::optional<std::size_t>> parent(n);
    for (std::size_t child = 0; child < n; ++child) {
        const long long child_area = elements[child].box.area();
        if (child_area == 0) continue;
        std::optional<std::size_t> best;
        long long best_area = std::numeric_limits<long long>::max();
        for (std::size_t cand = 0; cand < n; ++cand) {
            if (cand == child) continue;
            const long long cand_area = elements[cand].box.area();
            // Attach only upward in (area, index) so the forest stays acyclic
            // when two boxes mutually contain each other.
            if (cand_area < child_area || (cand_area == child_area && cand > child)) continue;
            const double covered =
                static_cast<double>(intersection_area(elements[cand].box, elements[child].box));
            if (covered < kContainmentThreshold * static_cast<double>(child_area)) continue;
            if (cand_area < best_area || (cand_area == best_area && (!best || cand < *best))) {
                best = cand;
                best_area = cand_area;
            }
        }
        parent[child] = best;
    }

    // Assemble bottom-up: move each node into its parent's child list in
    // input order. Children are attached deepest-first so subtrees are
    // complete before they move.
    std::vector<std::size_t> depth(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t d = 0;
        for (auto p = parent[i]; p; p = parent[*p]) ++d;
        depth[i] = d;
    }
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return depth[a] > depth[b]; });

    std::vector<UiElement> nodes = std::move(elements);
    for (std::size_t i : order) {
        if (!parent[i]) continue;
        nodes[*parent[i]].children.push_back(std::move(nodes[i]));
    }
    ScreenSchema out;
    for (std::size_t i = 0; i < n; ++i)
        if (!parent[i]) out.elements.push_back(std::move(nodes[i]));
    return out;
}

ScreenSchema compose_schema(const std::vector<Detection>& detections,
                            const std::vector<OcrWord>& ocr_words,
                            const std::vector<CaptionAnnotation>& captions, double width,
                            double height) {
    if (!(width > 0) || !(height > 0)) throw ValueError("image extent must be positive");
    for (const auto& d : detections) {
        check_in_extent(d.box, width, height, "detection");
        if (!(d.score >= 0.0 && d.score <= 1.0)) throw ValueError("detection score outside [0,1]");
    }
    for (const auto& w : ocr_words) {
        check_in_extent(w.box, width, height, "ocr word");
        if (trimmed_empty(w.text)) throw ValueError("ocr word text is empty");
    }
    for (const auto& c : captions) {
        check_in_extent(c.box, width, height, "caption");
        if (trimmed_empty(c.text)) throw ValueError("caption text is empty");
    }

    struct Attachment {
        double ymin, xmin;  // pixel reading-order key
        std::size_t input_index;
        const std::string* text;
        bool operator<(const Attachment& o) const {
            if (ymin != o.ymin) return ymin < o.ymin;
            if (xmin != o.xmin) return xmin < o.xmin;
            return input_index < o.input_index;
        }
    };
    std::vector<std::vector<Attachment>> ocr_for(detections.size());
    std::vector<std::vector<Attachment>> caption_for(detections.size());
    std::vector<const OcrWord*> unattached;

    // Word center containment against the pixel-space detection boxes;
    // smallest area wins, ties to the earlier detection.
    for (std::size_t wi = 0; wi < ocr_words.size(); ++wi) {
        const auto& w = ocr_words[wi];
        const double cy = (w.box.ymin + w.box.ymax) / 2.0;
        const double cx = (w.box.xmin + w.box.xmax) / 2.0;
        std::optional<std::size_t> best;
        double best_area = std::numeric_limits<double>::infinity();
        for (std::size_t di = 0; di < detections.size(); ++di) {
            const auto& b = detections[di].box;
            if (cy < b.ymin || cy > b.ymax || cx < b.xmin || cx > b.xmax) continue;
            if (b.area() < best_area) {
                best = di;
                best_area = b.area();
            }
        }
        if (best) ocr_for[*best].push_back({w.box.ymin, w.box.xmin, wi, &w.text});
        else unattached.push_back(&w);
    }

    // Captions go to the max-IoU IMAGE/PICTOGRAM element; a caption that
    // overlaps none of them has no target and is dropped.
    for (std::size_t ci = 0; ci < captions.size(); ++ci) {
        const auto& cap = captions[ci];
        std::optional<std::size_t> best;
        double best_iou = 0.0;
        for (std::size_t di = 0; di < detections.size(); ++di) {
            const std::string& cls = detections[di].cls.name();
            if (cls != "IMAGE" && cls != "PICTOGRAM") continue;
            const double v = iou(cap.box, detections[di].box);
            if (v > best_iou) {
                best = di;
                best_iou = v;
            }
        }
        if (best) caption_for[*best].push_back({cap.box.ymin, cap.box.xmin, ci, &cap.text});
    }

    std::vector<UiElement> flat;
    flat.reserve(detections.size());
    for (std::size_t di = 0; di < detections.size(); ++di) {
        const auto& d = detections[di];
        UiElement e{d.cls, std::nullopt, quantize_box(d.box, width, height), {}, false};
        std::sort(ocr_for[di].begin(), ocr_for[di].end());
        std::sort(caption_for[di].begin(), caption_for[di].end());
        std::string payload;
        for (const auto& a : ocr_for[di]) {
            if (!payload.empty()) payload += ' ';
            payload += *a.text;
        }
        for (const auto& a : caption_for[di]) {
            if (!payload.empty()) payload += ' ';
            payload += *a.text;
        }
        if (!payload.empty()) e.payload = std::move(payload);
        flat.push_back(std::move(e));
    }

    ScreenSchema out = nest_by_containment(std::move(flat));
    for (const OcrWord* w : unattached) {
        out.elements.push_back(
            UiElement{ElementClass{"TEXT"}, w->text, quantize_box(w->box, width, height), {}, false});
    }
    sort_siblings_recursive(out.elements);
    out.source_dims = {width, height};
    return out;
}

}  // namespace screenkit

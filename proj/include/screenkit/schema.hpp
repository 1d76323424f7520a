#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "screenkit/geometry.hpp"

namespace screenkit {

// Payload value that marks a masked element.
inline constexpr const char* kMaskToken = "<mask>";

// Uppercase UI element class name (TEXT, BUTTON, ...), matching
// [A-Z][A-Z0-9_]*.
class ElementClass {
public:
    explicit ElementClass(std::string name);

    const std::string& name() const { return name_; }
    bool operator==(const ElementClass&) const = default;
    auto operator<=>(const ElementClass&) const = default;

    static bool valid_name(std::string_view name);

private:
    std::string name_;
};

// Known class names. Parsing never consults the registry (the vocabulary is
// open); it exists for callers that want to pin a closed set.
class ClassRegistry {
public:
    ClassRegistry();

    void register_class(const std::string& name);
    bool contains(const std::string& name) const { return names_.count(name) != 0; }
    const std::set<std::string>& names() const { return names_; }

private:
    std::set<std::string> names_;
};

struct UiElement {
    ElementClass cls;
    // OCR text, icon name, or caption. Non-empty after trimming when present.
    std::optional<std::string> payload;
    QuantBox box;
    std::vector<UiElement> children;
    bool masked = false;

    bool operator==(const UiElement&) const = default;
};

struct ScreenSchema {
    std::vector<UiElement> elements;  // roots
    std::optional<std::pair<double, double>> source_dims;  // (width, height) in px

    bool operator==(const ScreenSchema&) const = default;
};

struct SchemaTextOptions {
    CoordOrder coord_order = CoordOrder::ymin_xmin_ymax_xmax;
};

// Grammar:
//   schema   := ws? (element ws?)*
//   element  := CLASS (ws STRING)? ws INT ws INT ws INT ws INT (ws "(" schema ")")?
//   CLASS    := [A-Z][A-Z0-9_]*
//   STRING   := double-quoted, escapes \" \\ \n
//   INT      := 0 | [1-9][0-9]{0,2}
// Throws ParseError with the byte offset of the first problem.
ScreenSchema parse_schema(std::string_view text, const SchemaTextOptions& opts = {});

// Canonical form: single spaces between tokens, child blocks as
// "( child ... )" after the coordinates. parse(serialize(s)) == s.
std::string serialize_schema(const ScreenSchema& s, const SchemaTextOptions& opts = {});

// Copy of the schema with floor(fraction * N) of the payload-bearing TEXT
// elements masked, chosen by the seeded generator. Deterministic per seed.
ScreenSchema mask_text_elements(const ScreenSchema& s, double fraction, std::uint64_t seed);

// Number of elements eligible for masking (class TEXT, unmasked payload).
std::size_t count_maskable_text(const ScreenSchema& s);

// Pre-order flattening; hierarchy and payloads discarded.
std::vector<std::pair<ElementClass, QuantBox>> schema_to_detections(const ScreenSchema& s);

}  // namespace screenkit

#include "screenkit/schema.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include "screenkit/rng.hpp"

namespace screenkit {

namespace {

bool is_class_start(char c) { return c >= 'A' && c <= 'Z'; }
bool is_class_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}
bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_ws(s.back())) s.remove_suffix(1);
    return s;
}

struct Parser {
    std::string_view text;
    std::size_t pos = 0;
    const SchemaTextOptions& opts;

    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }

    [[noreturn]] void fail(const std::string& msg, std::size_t at) const {
        throw ParseError(msg, at);
    }

    // Returns true when at least one whitespace byte was consumed.
    bool skip_ws() {
        std::size_t start = pos;
        while (!eof() && is_ws(peek())) ++pos;
        return pos != start;
    }

    void require_ws(const char* before) {
        if (!skip_ws()) fail(std::string("expected whitespace before ") + before, pos);
    }

    std::string lex_class() {
        std::size_t start = pos;
        if (eof() || !is_class_start(peek()))
            fail("expected element class ([A-Z][A-Z0-9_]*)", pos);
        while (!eof() && is_class_char(peek())) ++pos;
        return std::string(text.substr(start, pos - start));
    }

    std::string lex_string() {
        std::size_t open = pos;
        ++pos;  // consume opening quote
        std::string out;
        while (true) {
            if (eof()) fail("unterminated string", open);
            char c = text[pos];
            if (c == '"') {
                ++pos;
                break;
            }
            if (c == '\\') {
                ++pos;
                if (eof()) fail("unterminated escape", pos - 1);
                char e = text[pos];
                if (e == '"') out.push_back('"');
                else if (e == '\\') out.push_back('\\');
                else if (e == 'n') out.push_back('\n');
                else fail("unknown escape sequence", pos - 1);
                ++pos;
            } else {
                out.push_back(c);
                ++pos;
            }
        }
        if (trim(out).empty()) fail("payload is empty after trimming", open);
        return out;
    }

    int lex_int() {
        std::size_t start = pos;
        while (!eof() && peek() >= '0' && peek() <= '9') ++pos;
        std::size_t len = pos - start;
        if (len == 0) fail("expected coordinate", start);
        if (len > 1 && text[start] == '0') fail("coordinate has a leading zero", start);
        if (len > 3) fail("coordinate out of range (0..999)", start);
        int v = 0;
        for (std::size_t i = start; i < pos; ++i) v = v * 10 + (text[i] - '0');
        return v;
    }

    UiElement parse_element() {
        ElementClass cls{lex_class()};
        std::optional<std::string> payload;
        bool masked = false;

        // Optional STRING, then four INTs, all whitespace-separated.
        std::size_t after_class = pos;
        bool had_ws = skip_ws();
        if (!eof() && peek() == '"') {
            if (!had_ws) fail("expected whitespace before payload string", after_class);
            payload = lex_string();
            if (*payload == kMaskToken) masked = true;
            require_ws("coordinates");
        } else if (!had_ws) {
            fail("expected whitespace after element class", after_class);
        }

        std::size_t coords_at = pos;
        std::array<int, 4> coords{};
        coords[0] = lex_int();
        for (int i = 1; i < 4; ++i) {
            require_ws("coordinate");
            coords[static_cast<std::size_t>(i)] = lex_int();
        }
        QuantBox box;
        try {
            box = box_from_coords(coords, opts.coord_order);
        } catch (const ValueError& e) {
            fail(e.what(), coords_at);
        }

        UiElement element{cls, std::move(payload), box, {}, masked};

        // Optional child block: ws "(" schema ")".
        std::size_t after_coords = pos;
        bool ws_before_paren = skip_ws();
        if (!eof() && peek() == '(') {
            if (!ws_before_paren) fail("expected whitespace before '('", after_coords);
            std::size_t open = pos;
            ++pos;
            element.children = parse_elements(/*in_block=*/true, open);
        } else {
            pos = after_coords;  // whitespace belongs to the enclosing schema
        }
        return element;
    }

    std::vector<UiElement> parse_elements(bool in_block, std::size_t open_at) {
        std::vector<UiElement> out;
        while (true) {
            skip_ws();
            if (eof()) {
                if (in_block) fail("unbalanced '(': block is never closed", open_at);
                return out;
            }
            if (peek() == ')') {
                if (!in_block) fail("unbalanced ')'", pos);
                ++pos;
                return out;
            }
            out.push_back(parse_element());
        }
    }
};

void serialize_element(const UiElement& e, CoordOrder order, std::string& out) {
    out += e.cls.name();
    if (e.payload) {
        out += " \"";
        for (char c : *e.payload) {
            if (c == '"') out += "\\\"";
            else if (c == '\\') out += "\\\\";
            else if (c == '\n') out += "\\n";
            else out.push_back(c);
        }
        out += '"';
    }
    for (int v : box_to_coords(e.box, order)) {
        out += ' ';
        out += std::to_string(v);
    }
    if (!e.children.empty()) {
        out += " ( ";
        for (std::size_t i = 0; i < e.children.size(); ++i) {
            if (i > 0) out += ' ';
            serialize_element(e.children[i], order, out);
        }
        out += " )";
    }
}

void collect_maskable(ScreenSchema& s, std::vector<UiElement*>& out) {
    auto walk = [&](auto&& self, UiElement& e) -> void {
        if (e.cls.name() == "TEXT" && e.payload && !e.masked) out.push_back(&e);
        for (auto& child : e.children) self(self, child);
    };
    for (auto& e : s.elements) walk(walk, e);
}

}  // namespace

ElementClass::ElementClass(std::string name) : name_(std::move(name)) {
    if (!valid_name(name_)) throw ValueError("invalid element class name: '" + name_ + "'");
}

bool ElementClass::valid_name(std::string_view name) {
    if (name.empty() || !is_class_start(name[0])) return false;
    return std::all_of(name.begin(), name.end(), is_class_char);
}

ClassRegistry::ClassRegistry() : names_{"IMAGE", "PICTOGRAM", "BUTTON", "TEXT"} {}

void ClassRegistry::register_class(const std::string& name) {
    if (!ElementClass::valid_name(name)) throw ValueError("invalid element class name: '" + name + "'");
    names_.insert(name);
}

ScreenSchema parse_schema(std::string_view text, const SchemaTextOptions& opts) {
    Parser p{text, 0, opts};
    ScreenSchema s;
    s.elements = p.parse_elements(/*in_block=*/false, 0);
    return s;
}

std::string serialize_schema(const ScreenSchema& s, const SchemaTextOptions& opts) {
    std::string out;
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
        if (i > 0) out += ' ';
        serialize_element(s.elements[i], opts.coord_order, out);
    }
    return out;
}

ScreenSchema mask_text_elements(const ScreenSchema& s, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw ValueError("mask fraction must be in [0,1]");
    ScreenSchema copy = s;
    std::vector<UiElement*> eligible;
    collect_maskable(copy, eligible);
    const auto k = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(eligible.size())));
    if (k == 0) return copy;

    // Partial Fisher-Yates over the eligible indices; first k are masked.
    std::mt19937_64 gen(seed);
    std::vector<std::size_t> idx(eligible.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t j = i + bounded_u64(gen, idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    for (std::size_t i = 0; i < k; ++i) {
        UiElement* e = eligible[idx[i]];
        e->payload = kMaskToken;
        e->masked = true;
    }
    return copy;
}

std::size_t count_maskable_text(const ScreenSchema& s) {
    std::size_t n = 0;
    auto walk = [&](auto&& self, const UiElement& e) -> void {
        if (e.cls.name() == "TEXT" && e.payload && !e.masked) ++n;
        for (const auto& child : e.children) self(self, child);
    };
    for (const auto& e : s.elements) walk(walk, e);
    return n;
}

std::vector<std::pair<ElementClass, QuantBox>> schema_to_detections(const ScreenSchema& s) {
    std::vector<std::pair<ElementClass, QuantBox>> out;
    auto walk = [&](auto&& self, const UiElement& e) -> void {
        out.emplace_back(e.cls, e.box);
        for (const auto& child : e.children) self(self, child);
    };
    for (const auto& e : s.elements) walk(walk, e);
    return out;
}

}  // namespace screenkit

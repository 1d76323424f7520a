#include "screenkit/navigation.hpp"

#include "screenkit/text_norm.hpp"

namespace screenkit {

std::optional<std::array<int, 4>> parse_click_text(std::string_view text) {
    const std::vector<std::string> parts = split_ws(trim_ws(text));
    if (parts.size() != 5 || parts[0] != "click") return std::nullopt;
    std::array<int, 4> coords{};
    for (int i = 0; i < 4; ++i) {
        const std::string& p = parts[i + 1];
        if (p.empty() || p.size() > 3) return std::nullopt;
        if (p.size() > 1 && p[0] == '0') return std::nullopt;
        int v = 0;
        for (char c : p) {
            if (c < '0' || c > '9') return std::nullopt;
            v = v * 10 + (c - '0');
        }
        coords[i] = v;
    }
    return coords;
}

std::string format_click_text(const std::array<int, 4>& coords) {
    std::string out = "click";
    for (int v : coords) {
        out += ' ';
        out += std::to_string(v);
    }
    return out;
}

std::string format_click_text(const QuantBox& box, CoordOrder order) {
    return format_click_text(box_to_coords(box, order));
}

}  // namespace screenkit

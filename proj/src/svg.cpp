#include "screenkit/svg.hpp"

#include <sstream>

#include "screenkit/hash.hpp"

namespace screenkit {

namespace {

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string class_color(const std::string& name) {
    const unsigned hue = static_cast<unsigned>(fnv1a64(name) % 360);
    return "hsl(" + std::to_string(hue) + ",70%,45%)";
}

void render_element(const UiElement& e, double sx, double sy, std::ostringstream& out) {
    const double x = e.box.xmin * sx;
    const double y = e.box.ymin * sy;
    const double w = (e.box.xmax - e.box.xmin) * sx;
    const double h = (e.box.ymax - e.box.ymin) * sy;
    const std::string color = class_color(e.cls.name());
    out << "  <rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << w << "\" height=\"" << h
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    std::string label = e.cls.name();
    if (e.payload) label += ": " + *e.payload;
    out << "  <text x=\"" << x + 2 << "\" y=\"" << y + 12 << "\" font-size=\"10\" fill=\"" << color
        << "\">" << xml_escape(label) << "</text>\n";
    for (const auto& child : e.children) render_element(child, sx, sy, out);
}

}  // namespace

std::string render_schema_svg(const ScreenSchema& schema, double width, double height) {
    if (!(width > 0) || !(height > 0)) throw ValueError("svg canvas must be positive");
    const double sx = width / kQuantBuckets;
    const double sy = height / kQuantBuckets;
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    for (const auto& e : schema.elements) render_element(e, sx, sy, out);
    out << "</svg>\n";
    return out.str();
}

}  // namespace screenkit

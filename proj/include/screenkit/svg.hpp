#pragma once

#include <string>

#include "screenkit/schema.hpp"

namespace screenkit {

// Overlay rendering of a schema: one rectangle per element, stroke color
// from a stable hash of the class name, payload text as a label. No image
// decoding; boxes are scaled from bucket space onto the given canvas.
std::string render_schema_svg(const ScreenSchema& schema, double width = 1000.0,
                              double height = 1000.0);

}  // namespace screenkit

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "screenkit/geometry.hpp"

namespace screenkit {

// Navigation target text: "click" followed by four integers in 0..999.
// Returns nullopt when the text does not have that shape.
std::optional<std::array<int, 4>> parse_click_text(std::string_view text);

std::string format_click_text(const std::array<int, 4>& coords);
std::string format_click_text(const QuantBox& box, CoordOrder order);

}  // namespace screenkit

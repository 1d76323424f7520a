#pragma once

#include <cstdint>
#include <string>

#include "screenkit/geometry.hpp"

namespace screenkit {

// Tool configuration; loadable from a JSON file. Unknown keys are rejected.
struct Config {
    std::string backend_url;
    int concurrency = 8;
    int timeout_ms = 30000;
    int max_attempts = 3;
    std::uint64_t seed = 0;
    CoordOrder coord_order = CoordOrder::ymin_xmin_ymax_xmax;
    double mixture_cap = 0.15;
    double neg_keep_prob = 0.25;
    double flagged_fraction_limit = 0.2;
};

Config load_config(const std::string& path);

}  // namespace screenkit

#include "screenkit/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

#include "screenkit/errors.hpp"

namespace screenkit {

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValueError("cannot open config file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValueError("config must be a JSON object: " + path);

    static const std::set<std::string> known = {
        "backend_url", "concurrency",   "timeout_ms",    "max_attempts",           "seed",
        "coord_order", "mixture_cap",   "neg_keep_prob", "flagged_fraction_limit",
    };
    for (const auto& [key, value] : j.items())
        if (!known.count(key)) throw ValueError("unknown config key: " + key);

    Config c;
    try {
        if (j.contains("backend_url")) c.backend_url = j.at("backend_url").get<std::string>();
        if (j.contains("concurrency")) c.concurrency = j.at("concurrency").get<int>();
        if (j.contains("timeout_ms")) c.timeout_ms = j.at("timeout_ms").get<int>();
        if (j.contains("max_attempts")) c.max_attempts = j.at("max_attempts").get<int>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("coord_order"))
            c.coord_order = coord_order_from_string(j.at("coord_order").get<std::string>());
        if (j.contains("mixture_cap")) c.mixture_cap = j.at("mixture_cap").get<double>();
        if (j.contains("neg_keep_prob")) c.neg_keep_prob = j.at("neg_keep_prob").get<double>();
        if (j.contains("flagged_fraction_limit"))
            c.flagged_fraction_limit = j.at("flagged_fraction_limit").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ValueError(std::string("config: ") + e.what());
    }

    if (c.concurrency <= 0) throw ValueError("concurrency must be positive");
    if (c.timeout_ms <= 0) throw ValueError("timeout_ms must be positive");
    if (c.max_attempts <= 0) throw ValueError("max_attempts must be positive");
    if (!(c.mixture_cap > 0.0 && c.mixture_cap <= 1.0))
        throw ValueError("mixture_cap must be in (0,1]");
    if (!(c.neg_keep_prob >= 0.0 && c.neg_keep_prob <= 1.0))
        throw ValueError("neg_keep_prob must be in [0,1]");
    if (!(c.flagged_fraction_limit >= 0.0 && c.flagged_fraction_limit <= 1.0))
        throw ValueError("flagged_fraction_limit must be in [0,1]");
    return c;
}

}  // namespace screenkit

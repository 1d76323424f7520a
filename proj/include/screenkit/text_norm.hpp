#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace screenkit {

// SQuAD answer normalization: lowercase, drop ASCII punctuation, drop the
// articles a/an/the, collapse whitespace.
std::vector<std::string> squad_tokens(std::string_view text);
std::string squad_normalize(std::string_view text);

std::string ascii_lower(std::string_view text);
std::string_view trim_ws(std::string_view text);
std::vector<std::string> split_ws(std::string_view text);

// Unit-cost edit distance over bytes.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Porter 1980 stemming algorithm. Input is expected lowercase ASCII; other
// bytes pass through untouched.
std::string porter_stem(std::string_view word);

// Numeric parse used by relaxed accuracy and answer-validation heuristics:
// trims whitespace, strips one trailing '%', then requires the whole
// remainder to parse as a double.
std::optional<double> parse_number(std::string_view text);

}  // namespace screenkit

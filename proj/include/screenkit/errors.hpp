#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace screenkit {

// Malformed input text or records. Carries the byte offset into the
// offending input when one is known.
class ParseError : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    explicit ParseError(std::string message, std::size_t offset = npos)
        : std::runtime_error(std::move(message)), offset_(offset) {}

    bool has_offset() const { return offset_ != npos; }
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

// Argument outside its documented domain (bad fraction, infeasible cap, ...).
class ValueError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Completion backend failure. Transient failures are retried; permanent ones
// abort the request.
class BackendError : public std::runtime_error {
public:
    BackendError(std::string message, bool transient)
        : std::runtime_error(std::move(message)), transient_(transient) {}

    bool transient() const { return transient_; }

private:
    bool transient_;
};

}  // namespace screenkit

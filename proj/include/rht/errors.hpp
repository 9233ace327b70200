#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rht {

/// Operand sizes disagree (vector length vs matrix order, image orders, ...).
class DimensionError : public std::invalid_argument {
public:
    DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
        : std::invalid_argument(what + ": expected " + std::to_string(expected) + ", got " +
                                std::to_string(actual)),
          expected_(expected), actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

private:
    std::size_t expected_;
    std::size_t actual_;
};

/// Normalization tags of two operands do not fit together.
class NormalizationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The fast algorithm only handles power-of-two lengths.
class UnsupportedLength : public std::invalid_argument {
public:
    explicit UnsupportedLength(std::size_t n)
        : std::invalid_argument("unsupported length " + std::to_string(n) +
                                " (power of two required)"),
          n_(n) {}

    std::size_t length() const noexcept { return n_; }

private:
    std::size_t n_;
};

class InsufficientData : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed raster or CSV input. `field()` names the offending header field.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string field, const std::string& detail)
        : std::runtime_error(field + ": " + detail), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace rht

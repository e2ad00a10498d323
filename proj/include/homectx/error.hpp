#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace homectx {

// Syntax error in Turtle-subset data or in a query. Line and column are 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + what),
          line_(line),
          column_(column),
          detail_(what) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t line_;
    std::size_t column_;
    std::string detail_;
};

// Query uses a SPARQL construct outside the supported subset.
class UnsupportedFeature : public ParseError {
public:
    UnsupportedFeature(std::size_t line, std::size_t column, const std::string& feature)
        : ParseError(line, column, "unsupported feature " + feature), feature_(feature) {}

    const std::string& feature() const noexcept { return feature_; }

private:
    std::string feature_;
};

// Store contents violate the home model (missing property, dangling reference, ...).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Readings arrived with a timestamp earlier than the previous one on the same stream.
class OrderError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid dedup configuration or trace-generation parameters.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace homectx

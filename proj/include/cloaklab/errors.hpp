#pragma once

#include <stdexcept>
#include <string>

namespace cloaklab {

// Malformed input or a violated precondition (maps to CLI exit 3).
struct ValidationError : std::invalid_argument {
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Config file could not be parsed (maps to CLI exit 2).
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A numerical operation could not complete: near-singular system,
// eigensolver stagnation, resonant mode (maps to CLI exit 4).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace cloaklab

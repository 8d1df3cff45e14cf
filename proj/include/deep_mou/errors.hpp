#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace deepmou {

// Argument outside the mathematical domain of a function (non-positive
// concentration, non-finite input, ...).
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

// Shapes or lengths of two inputs disagree.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Malformed input file. `line()` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
  explicit ParseError(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what
                                : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace deepmou

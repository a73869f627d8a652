#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prism {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Geometry
struct SingularLattice : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct NotUnimodular : Error { using Error::Error; };

// Graphs and tensors
struct DimensionMismatch : Error { using Error::Error; };
struct KindMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct UnknownElement : Error { using Error::Error; };

// Training and metrics
struct LengthMismatch : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct LayerMismatch : Error { using Error::Error; };
struct DivergenceDetected : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

/// Ingest errors carry the 1-based line number of the offending record.
class LineError : public Error {
 public:
  LineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct ParseError : LineError { using LineError::LineError; };
struct InvalidLattice : LineError { using LineError::LineError; };
struct InvalidFraction : LineError { using LineError::LineError; };

}  // namespace prism

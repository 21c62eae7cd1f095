#pragma once

#include <stdexcept>
#include <string>

namespace doomsday {

/// Base class for every error the library raises. `kind()` is a stable
/// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

struct InvalidParameter : Error {
  explicit InvalidParameter(const std::string& m) : Error("InvalidParameter", m) {}
};

struct InfiniteMean : Error {
  explicit InfiniteMean(const std::string& m) : Error("InfiniteMean", m) {}
};

struct ImpossibleObservation : Error {
  explicit ImpossibleObservation(const std::string& m) : Error("ImpossibleObservation", m) {}
};

struct InsufficientSamples : Error {
  explicit InsufficientSamples(const std::string& m) : Error("InsufficientSamples", m) {}
};

struct PreconditionError : Error {
  explicit PreconditionError(const std::string& m) : Error("PreconditionError", m) {}
};

struct NoRoot : Error {
  explicit NoRoot(const std::string& m) : Error("NoRoot", m) {}
};

struct ParseError : Error {
  ParseError(const std::string& m, std::size_t line)
      : Error("ParseError", "line " + std::to_string(line) + ": " + m), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace doomsday

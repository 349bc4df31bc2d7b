#pragma once

#include <stdexcept>
#include <string>

namespace kolab {

enum class ErrorKind {
  InvalidLayout,
  Bounds,
  InvalidSchedule,
  TooLarge,
  Config,
  Shape,
  Usage,
  UndefinedRatio,
  Parse,
  Io,
  Task,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library. The kind decides how the CLI maps a
// failure onto an exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace kolab

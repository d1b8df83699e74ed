#pragma once

#include <stdexcept>
#include <string>

namespace spgs {

enum class ErrorKind {
  invalid_argument,
  degenerate_input,
  preconditioner_breakdown,
  step_stalled,
  unsupported_diagnostic,
  sweep_failed,
  io,
  checksum,
  version,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library error carrying a machine-checkable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace spgs

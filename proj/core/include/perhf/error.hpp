#pragma once

#include <stdexcept>
#include <string>

namespace perhf {

enum class ErrorKind {
  invalid_parameter,
  singular_argument,
  truncation_error,
  numerical_integration_failure,
  numerical_failure,
  capacity_error,
  probe_not_applicable,
  io_error,
};

const char *to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace perhf

#pragma once

#include <stdexcept>
#include <string>

namespace cdho {

enum class ErrorKind {
  IntegrationFailure,
  RootNotBracketed,
  IllConditioned,
  NoAdmissibleR,
  QuadratureFailure,
  DomainEscape,
  SingularTime,
  MassEscape,
  BlowupDetected,
  SpectralTail,
  NonMonotoneTime,
  LadderTooShort,
  Precondition,
  Config,
  Io
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace cdho

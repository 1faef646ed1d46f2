#include "cdho/error.hpp"

namespace cdho {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::IntegrationFailure: return "IntegrationFailure";
    case ErrorKind::RootNotBracketed: return "RootNotBracketed";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::NoAdmissibleR: return "NoAdmissibleR";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::SingularTime: return "SingularTime";
    case ErrorKind::MassEscape: return "MassEscape";
    case ErrorKind::BlowupDetected: return "BlowupDetected";
    case ErrorKind::SpectralTail: return "SpectralTail";
    case ErrorKind::NonMonotoneTime: return "NonMonotoneTime";
    case ErrorKind::LadderTooShort: return "LadderTooShort";
    case ErrorKind::Precondition: return "Precondition";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace cdho

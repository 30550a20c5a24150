#include "wvabench/errors.hpp"

namespace wvabench {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::DegenerateOverlap: return "DegenerateOverlap";
        case ErrorKind::ComplexWeakValue: return "ComplexWeakValue";
        case ErrorKind::NotPSD: return "NotPSD";
        case ErrorKind::BadParams: return "BadParams";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::ZeroInformation: return "ZeroInformation";
        case ErrorKind::NoPostselectedEvents: return "NoPostselectedEvents";
        case ErrorKind::BadVariance: return "BadVariance";
        case ErrorKind::BadBins: return "BadBins";
        case ErrorKind::BadAlpha: return "BadAlpha";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::NegligibleProbability: return "NegligibleProbability";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

ModelError::ModelError(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), detail_(message) {}

void raise(ErrorKind kind, const std::string &message) { throw ModelError(kind, message); }

}  // namespace wvabench

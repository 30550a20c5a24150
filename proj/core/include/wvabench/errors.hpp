#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wvabench {

enum class ErrorKind {
    InvalidArgument,
    DegenerateOverlap,
    ComplexWeakValue,
    NotPSD,
    BadParams,
    TooFewSamples,
    ZeroInformation,
    NoPostselectedEvents,
    BadVariance,
    BadBins,
    BadAlpha,
    NotNormalized,
    NegligibleProbability,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so
/// callers (and tests) can branch on it without parsing messages.
class ModelError : public std::runtime_error {
  public:
    ModelError(ErrorKind kind, const std::string &message);

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string &detail() const noexcept { return detail_; }

  private:
    ErrorKind kind_;
    std::string detail_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string &message);

}  // namespace wvabench

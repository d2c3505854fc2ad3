#pragma once

#include <stdexcept>
#include <string>

namespace tfridge {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction / validation
struct InvalidParameter : Error { using Error::Error; };
struct NonPositiveStep : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };
struct NonUniformGrid : Error { using Error::Error; };
struct InvariantViolation : Error { using Error::Error; };

// Wavelet engine
struct ScaleTooSmall : Error { using Error::Error; };
struct AtomExceedsGrid : Error { using Error::Error; };
struct BandOutOfRange : Error { using Error::Error; };
struct TooFewVoices : Error { using Error::Error; };

// Ridge extraction / fitting
struct BadThreshold : Error { using Error::Error; };
struct FrequencyOutOfBand : Error { using Error::Error; };
struct FitDiverged : Error { using Error::Error; };
struct WindowTooShort : Error { using Error::Error; };

// Dimer simulation
struct TruncationNotConverged : Error { using Error::Error; };
struct StepUnstable : Error { using Error::Error; };

// Front-end plumbing
struct ConfigError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace tfridge

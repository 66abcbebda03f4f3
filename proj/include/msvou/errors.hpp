#pragma once

#include <stdexcept>
#include <string>

namespace msvou {

// Base class for every error raised by the library. Callers that do not care
// about the concrete failure mode can catch this one type.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// matrix_core
struct ShapeError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct SingularOperatorError : Error { using Error::Error; };
struct NotPSDError : Error { using Error::Error; };

// levy_drivers / model
struct OutOfStripError : Error { using Error::Error; };
struct BranchError : Error { using Error::Error; };
struct UnsupportedSamplingError : Error { using Error::Error; };
struct MartingaleInfeasibleError : Error { using Error::Error; };
struct QuadratureError : Error { using Error::Error; };

// ou_wishart
struct WrongBranchError : Error { using Error::Error; };
struct DegenerateCoefficientError : Error { using Error::Error; };

// fourier_pricing
struct DomainError : Error { using Error::Error; };
struct DampingError : Error { using Error::Error; };

// calibration / io
struct ArbitrageError : Error { using Error::Error; };
struct CalibrationFailure : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace msvou

#pragma once

#include <stdexcept>

namespace mdi {

// Base type for everything this library throws. The CLI maps subtypes onto
// exit codes: config/parse problems -> 2, data problems -> 3.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct InvalidParameter : Error { using Error::Error; };
struct DegenerateScenario : Error { using Error::Error; };
struct MissingRng : Error { using Error::Error; };
struct InvalidMethod : Error { using Error::Error; };
struct InsufficientImputations : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct InvalidConfig : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace mdi

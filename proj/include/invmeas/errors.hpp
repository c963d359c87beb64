#pragma once

#include <stdexcept>

namespace invmeas {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear algebra / transforms
struct SingularMatrix final : Error { using Error::Error; };
struct BothBlocksSingular final : Error { using Error::Error; };
struct NotInvariant final : Error { using Error::Error; };
struct SizeMismatch final : Error { using Error::Error; };

// Group sampling
struct DegeneratePair final : Error { using Error::Error; };
struct BranchViolation final : Error { using Error::Error; };

// Spectra
struct DomainError final : Error { using Error::Error; };
struct DegeneratePoints final : Error { using Error::Error; };

// Finite groups
struct InvalidTable final : Error { using Error::Error; };
struct NumericalDegeneracy final : Error { using Error::Error; };
struct SplitFailure final : Error { using Error::Error; };

// Monte Carlo
struct VarianceExplosion final : Error { using Error::Error; };
struct TooFewSamples final : Error { using Error::Error; };

// Gaussian / polymorphisms
struct NotContraction final : Error { using Error::Error; };
struct MarginalViolation final : Error { using Error::Error; };
struct SpaceMismatch final : Error { using Error::Error; };
struct NotRational final : Error { using Error::Error; };

}  // namespace invmeas

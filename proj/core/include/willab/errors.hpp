#pragma once

#include <stdexcept>
#include <string>

namespace willab {

// Every failure the library can diagnose gets its own type so callers (and
// the CLI exit-code mapping) can tell validation failures from numerical
// non-convergence.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// -- rational arithmetic --------------------------------------------------
struct PoleEvaluation : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };

// -- null-curve validation ------------------------------------------------
struct ValidationFailure : Error { using Error::Error; };
struct NullIdentityViolation : ValidationFailure { using ValidationFailure::ValidationFailure; };
struct LogEndDetected : ValidationFailure { using ValidationFailure::ValidationFailure; };
struct BranchPointDetected : ValidationFailure { using ValidationFailure::ValidationFailure; };
struct WrongPoleOrder : ValidationFailure { using ValidationFailure::ValidationFailure; };
struct DegenerateEnd : ValidationFailure { using ValidationFailure::ValidationFailure; };
struct NotComplexOrthogonal : ValidationFailure { using ValidationFailure::ValidationFailure; };
struct SolveFailure : Error { using Error::Error; };

// -- geometry -------------------------------------------------------------
struct OriginOnSurface : Error { using Error::Error; };
struct PathThroughPole : Error { using Error::Error; };
struct QuadratureNonconvergence : Error { using Error::Error; };
struct ExtrapolationDivergence : Error { using Error::Error; };
struct NotSpiny : Error { using Error::Error; };

// -- spectral -------------------------------------------------------------
struct OverlappingEndDisks : Error { using Error::Error; };
struct NonconvergentEntry : Error { using Error::Error; };
struct EigenFailure : Error { using Error::Error; };
struct SymmetryMismatch : Error { using Error::Error; };
struct UnequalEndValues : Error { using Error::Error; };
struct EndValueDegenerate : Error { using Error::Error; };

} // namespace willab

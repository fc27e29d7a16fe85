#pragma once
#include <stdexcept>
#include <string>

namespace eigencurve {

// Shared error taxonomy. Every failure mode raised by the library derives
// from EigencurveError so callers can distinguish numerical-validation
// failures from plain programming errors.
struct EigencurveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// numerics
struct NonConvergence : EigencurveError { using EigencurveError::EigencurveError; };
struct SingularMatrix : EigencurveError { using EigencurveError::EigencurveError; };
struct DimensionMismatch : EigencurveError { using EigencurveError::EigencurveError; };
struct SelfAdjointnessDefect : EigencurveError { using EigencurveError::EigencurveError; };

// symplectic
struct NotSelfAdjointCondition : EigencurveError { using EigencurveError::EigencurveError; };
struct DegenerateCondition : EigencurveError { using EigencurveError::EigencurveError; };

// discretization
struct BadPotential : EigencurveError { using EigencurveError::EigencurveError; };
struct BadGrid : EigencurveError { using EigencurveError::EigencurveError; };
struct BoundaryResonance : EigencurveError { using EigencurveError::EigencurveError; };

// spectral
struct SpectralPointHit : EigencurveError { using EigencurveError::EigencurveError; };
struct NotIsolated : EigencurveError { using EigencurveError::EigencurveError; };

// perturbation
struct UnitaryBreakdown : EigencurveError { using EigencurveError::EigencurveError; };
struct FormulaMismatch : EigencurveError { using EigencurveError::EigencurveError; };
struct NotRobin : EigencurveError { using EigencurveError::EigencurveError; };

// oracle
struct TrackingAmbiguity : EigencurveError { using EigencurveError::EigencurveError; };
struct LadderInconsistent : EigencurveError { using EigencurveError::EigencurveError; };

// cli / config
struct UnknownGallery : EigencurveError { using EigencurveError::EigencurveError; };
struct ConfigError : EigencurveError { using EigencurveError::EigencurveError; };

}  // namespace eigencurve

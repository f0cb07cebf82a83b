#pragma once

#include <stdexcept>
#include <string>

namespace solwave {

// Error taxonomy. Each class maps onto one CLI exit code:
//   ConfigError -> 2, SeedDivergenceError -> 3, ContinuationError -> 4,
//   IoError -> 5. Everything else is a programming/contract error.
struct SolwaveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid user input: bad config keys/values, inadmissible background current,
// out-of-range parameters.
struct ConfigError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// Background current has a non-positive sample (horizontal stagnation at
// infinity) and admits no laminar profile.
struct StagnantBackgroundError : ConfigError {
    using ConfigError::ConfigError;
};

// Requested s-resolution cannot place every shear kink on a cell face.
struct ResolutionError : ConfigError {
    using ConfigError::ConfigError;
};

// kappa outside (-2*Gamma_min, inf) or a surface height outside the range of
// the laminar family.
struct OutOfFamilyError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// An iterate (or input field) violates the no-stagnation floor phi_s+H_s > 0.
struct StagnationError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// Newton failed to reach tolerance.
struct ConvergenceError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// Newton from the small-amplitude seed failed (CLI exit 3).
struct SeedDivergenceError : ConvergenceError {
    using ConvergenceError::ConvergenceError;
};

// Predictor/corrector failure below the minimum arclength step (CLI exit 4).
struct ContinuationError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// Dirichlet-pole scan could not bracket the requested eigenvalues.
struct SpectralScanError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// Grid too short for the requested decay length, or an extension failed.
struct DomainError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// Non-monotone psi column during Eulerian inversion.
struct InversionError : SolwaveError {
    using SolwaveError::SolwaveError;
};

// Filesystem failures (CLI exit 5).
struct IoError : SolwaveError {
    using SolwaveError::SolwaveError;
};

}  // namespace solwave

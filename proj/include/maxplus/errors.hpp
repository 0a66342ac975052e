#pragma once

#include <stdexcept>
#include <string>

namespace maxplus {

enum class errc {
  dimension_mismatch,
  not_superharmonic,
  not_full_support,
  divergent_star,
  numerical_divergence,
  not_harmonic,
  no_minimal_space,
  not_normalized,
  unbounded_density,
  not_a_path,
  not_metric,
  not_converged,
  truncation_artifact,
  inconsistent_probes,
  eigen_check_failed,
  ball_too_large,
  margin_too_small,
  empty_support,
  degenerate_dual,
  confirmation_failed,
  parse_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::dimension_mismatch: return "DimensionMismatch";
    case errc::not_superharmonic: return "NotSuperharmonic";
    case errc::not_full_support: return "NotFullSupport";
    case errc::divergent_star: return "DivergentStar";
    case errc::numerical_divergence: return "NumericalDivergence";
    case errc::not_harmonic: return "NotHarmonic";
    case errc::no_minimal_space: return "NoMinimalSpace";
    case errc::not_normalized: return "NotNormalized";
    case errc::unbounded_density: return "UnboundedDensity";
    case errc::not_a_path: return "NotAPath";
    case errc::not_metric: return "NotMetric";
    case errc::not_converged: return "NotConverged";
    case errc::truncation_artifact: return "TruncationArtifact";
    case errc::inconsistent_probes: return "InconsistentProbes";
    case errc::eigen_check_failed: return "EigenCheckFailed";
    case errc::ball_too_large: return "BallTooLarge";
    case errc::margin_too_small: return "MarginTooSmall";
    case errc::empty_support: return "EmptySupport";
    case errc::degenerate_dual: return "DegenerateDual";
    case errc::confirmation_failed: return "ConfirmationFailed";
    case errc::parse_error: return "ParseError";
  }
  return "Unknown";
}

/// Library error carrying a machine-readable code plus a human witness string.
class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what, std::string witness = {})
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code),
        witness_(std::move(witness)) {}

  errc code() const { return code_; }
  const std::string& witness() const { return witness_; }

 private:
  errc code_;
  std::string witness_;
};

[[noreturn]] inline void raise(errc code, const std::string& what,
                               std::string witness = {}) {
  throw Error(code, what, std::move(witness));
}

}  // namespace maxplus

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qsteer::cli {

struct CheckResult {
  std::string check_id;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

// Runs every invariant suite (closed-form reductions, oracle agreement,
// hidden-state soundness, determinism) with all randomness derived from
// `seed`. With audit_momentum_scaled_xx the covariance pipeline is fed the
// deliberately wrong position-coupling variant, which must surface as a
// failure of the closed-form agreement check.
std::vector<CheckResult> run_verification_checks(std::uint64_t seed,
                                                 bool audit_momentum_scaled_xx);

}  // namespace qsteer::cli

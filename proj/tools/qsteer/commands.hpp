#pragma once

#include "sweep_config.hpp"

namespace qsteer::cli {

// Each command returns the process exit code: 0 success, 1 verification
// failure, 2 usage or config errors (thrown as exceptions and mapped by
// the caller).
int cmd_free_particle(const SweepConfig& cfg);
int cmd_ghz(const SweepConfig& cfg, bool closed_form_only);
int cmd_verify(const SweepConfig& cfg, bool audit_momentum_scaled_xx);

}  // namespace qsteer::cli

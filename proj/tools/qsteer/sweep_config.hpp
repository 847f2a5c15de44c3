#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qsteer::cli {

struct Range {
  double min = 0.0;
  double max = 0.0;
  int steps = 1;
};

struct Units {
  double hbar = 1.0;
  double mass = 1.0;
  double mu = 1.0;
};

// One record drives every subcommand; irrelevant ranges are ignored by the
// command that runs. The JSON config file mirrors these field names.
struct SweepConfig {
  std::string scenario;  // free-particle | displacement | ghz; empty = infer
  Range z{1.0, 1.0, 1};
  Range r{1.0, 1.0, 1};
  Range theta{0.0, 0.0, 1};
  Range k{0.0, 0.0, 1};
  Range n{1.0, 1.0, 1};
  Range p{1.0, 1.0, 1};
  Range dt{0.01, 0.01, 1};
  std::string out;  // empty = per-command default file name
  std::uint64_t seed = 0;
  Units units;
};

SweepConfig load_config(const std::string& path);

// steps >= 1, min <= max, every parameter inside its domain; throws
// std::invalid_argument naming the offender.
void validate_ranges(const SweepConfig& cfg);

// min for steps == 1, otherwise steps equally spaced points over [min, max].
std::vector<double> grid(const Range& r);

// Locale-free fixed 12-decimal rendering; infinities as "inf"/"-inf",
// NaN as "nan".
std::string fmt12(double v);

// Locale-free scientific rendering for report text.
std::string fmt_sci(double v);

}  // namespace qsteer::cli

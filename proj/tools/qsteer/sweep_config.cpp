#include "sweep_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace qsteer::cli {

namespace {

using nlohmann::json;

Range parse_range(const json& j, const Range& fallback, const std::string& name) {
  if (j.is_number()) {
    const double v = j.get<double>();
    return {v, v, 1};
  }
  if (!j.is_object())
    throw std::invalid_argument("config field '" + name +
                                "' must be a number or a {min, max, steps} object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "min" && key != "max" && key != "steps")
      throw std::invalid_argument("unknown key '" + key + "' in config field '" + name + "'");
  }
  Range r = fallback;
  if (j.contains("min")) r.min = j.at("min").get<double>();
  if (j.contains("max")) r.max = j.at("max").get<double>();
  if (j.contains("steps")) {
    if (!j.at("steps").is_number_integer())
      throw std::invalid_argument("config field '" + name + ".steps' must be an integer");
    r.steps = j.at("steps").get<int>();
  }
  if (j.contains("min") && !j.contains("max")) r.max = r.min;
  return r;
}

Units parse_units(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config field 'units' must be an object");
  Units u;
  for (const auto& [key, value] : j.items()) {
    if (key == "hbar")
      u.hbar = value.get<double>();
    else if (key == "mass")
      u.mass = value.get<double>();
    else if (key == "mu")
      u.mu = value.get<double>();
    else
      throw std::invalid_argument("unknown key '" + key + "' in config field 'units'");
  }
  return u;
}

void check_range(const Range& r, const std::string& name, double lo, double hi,
                 bool lo_open = false) {
  if (r.steps < 1)
    throw std::invalid_argument("range '" + name + "' is empty (steps must be >= 1)");
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || r.min > r.max)
    throw std::invalid_argument("range '" + name + "' has min > max or non-finite bounds");
  if (r.min < lo || r.max > hi || (lo_open && r.min <= lo))
    throw std::invalid_argument("range '" + name + "' leaves the parameter domain");
}

}  // namespace

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file '" + path + "'");
  const json j = json::parse(in);
  if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");

  SweepConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenario")
      cfg.scenario = value.get<std::string>();
    else if (key == "z")
      cfg.z = parse_range(value, cfg.z, key);
    else if (key == "r")
      cfg.r = parse_range(value, cfg.r, key);
    else if (key == "theta")
      cfg.theta = parse_range(value, cfg.theta, key);
    else if (key == "k")
      cfg.k = parse_range(value, cfg.k, key);
    else if (key == "n")
      cfg.n = parse_range(value, cfg.n, key);
    else if (key == "p")
      cfg.p = parse_range(value, cfg.p, key);
    else if (key == "dt")
      cfg.dt = parse_range(value, cfg.dt, key);
    else if (key == "out")
      cfg.out = value.get<std::string>();
    else if (key == "seed")
      cfg.seed = value.get<std::uint64_t>();
    else if (key == "units")
      cfg.units = parse_units(value);
    else
      throw std::invalid_argument("unknown config key '" + key + "'");
  }
  return cfg;
}

void validate_ranges(const SweepConfig& cfg) {
  check_range(cfg.z, "z", 0.0, 1.0, /*lo_open=*/true);
  check_range(cfg.r, "r", 0.0, 1e12);
  check_range(cfg.theta, "theta", 0.0, M_PI / 2.0);
  check_range(cfg.k, "k", 0.0, 1e12);
  check_range(cfg.n, "n", 1.0, 64.0);
  check_range(cfg.p, "p", 0.0, 1.0);
  check_range(cfg.dt, "dt", 0.0, 1e12, /*lo_open=*/true);
  for (const double v : grid(cfg.n))
    if (std::abs(v - std::round(v)) > 1e-9)
      throw std::invalid_argument("range 'n' must produce integer qubit counts");
  if (!(cfg.units.hbar > 0.0) || !(cfg.units.mass > 0.0) || !(cfg.units.mu > 0.0))
    throw std::invalid_argument("units must be positive");
}

std::vector<double> grid(const Range& r) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(r.steps));
  if (r.steps == 1) {
    out.push_back(r.min);
    return out;
  }
  for (int i = 0; i < r.steps; ++i)
    out.push_back(r.min + (r.max - r.min) * double(i) / double(r.steps - 1));
  return out;
}

std::string fmt12(double v) {
  if (v == 0.0) v = 0.0;  // fold negative zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 12);
  return std::string(buf, res.ptr);
}

std::string fmt_sci(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 6);
  return std::string(buf, res.ptr);
}

}  // namespace qsteer::cli

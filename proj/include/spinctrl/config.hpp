// JSON run-configuration loading with field-path diagnostics.
//
// Unit convention in config files: frequencies are plain Hz (omega / 2pi),
// times are seconds, and every numeric field name carries its unit suffix
// (larmor_hz, tau_s, ...).  Conversion to the library's angular units
// happens here and nowhere deeper.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinctrl/core.hpp"
#include "spinctrl/dd.hpp"
#include "spinctrl/ddrf.hpp"
#include "spinctrl/errors.hpp"

namespace spinctrl {

/// A JSON object plus the dotted path that leads to it; all accessors throw
/// ConfigError naming the full field path on missing keys or wrong types.
class Config {
 public:
  Config() : j_(nlohmann::json::object()) {}

  /// Throws ConfigError when the file is unreadable or not valid JSON.
  static Config load_file(const std::string& file);
  static Config from_json(nlohmann::json j, std::string label = "config");

  bool has(const std::string& key) const;

  /// Required sub-object.
  Config child(const std::string& key) const;
  std::optional<Config> child_opt(const std::string& key) const;
  /// Required array of objects.
  std::vector<Config> children(const std::string& key) const;

  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  /// number() with a > 0 check.
  double positive(const std::string& key) const;
  double positive_or(const std::string& key, double fallback) const;
  int integer(const std::string& key) const;
  int integer_or(const std::string& key, int fallback) const;
  std::uint64_t uint64_or(const std::string& key, std::uint64_t fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;
  std::string string_value(const std::string& key) const;
  std::string string_or(const std::string& key,
                        const std::string& fallback) const;
  /// Required array of numbers.
  std::vector<double> numbers(const std::string& key) const;

  const nlohmann::json& raw() const { return j_; }
  const std::string& where() const { return path_; }

  [[noreturn]] void fail(const std::string& key, const std::string& why) const;

 private:
  const nlohmann::json& require(const std::string& key) const;

  nlohmann::json j_;
  std::string path_ = "config";
};

// ---------------------------------------------------------------------------
// domain blocks
// ---------------------------------------------------------------------------

/// {"larmor_hz": >0, "a_par_hz": signed, "a_perp_hz": >= 0}
NuclearSpinConfig parse_spin(const Config& block);

/// Top-level "spin" (single) or "spins" (array); exactly one must exist.
std::vector<NuclearSpinConfig> parse_spins(const Config& root);

/// Optional "electron" block {"s0","s1","t2_echo_s","chi","decay_exponent"};
/// defaults to the spin-1/2 spec.
ElectronSpec parse_electron(const Config& root);

/// Required "sequence" block {"tau_s", "n_pulses"}.
DDSequence parse_sequence(const Config& root);

/// Optional "propagation" block {"model": "rotating_wave"|"full_drive",
/// "tilt": "ignored"|"included", "steps_per_period"}.
PropagationConfig parse_propagation(const Config& root);

/// Grid block `key`: either {"values_<unit>": [...]} or
/// {"min_<unit>", "max_<unit>", "points", "spacing": "linear"|"log"}.
/// An empty unit drops the suffix.  Values are returned in interface units.
std::vector<double> parse_grid(const Config& root, const std::string& key,
                               const std::string& unit);

}  // namespace spinctrl

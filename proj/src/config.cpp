#include "spinctrl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spinctrl/units.hpp"

namespace spinctrl {

Config Config::load_file(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open '" + file + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return from_json(nlohmann::json::parse(buffer.str()));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config: '" + file + "' is not valid JSON: " + e.what());
  }
}

Config Config::from_json(nlohmann::json j, std::string label) {
  if (!j.is_object())
    throw ConfigError(label + ": expected a JSON object at the top level");
  Config c;
  c.j_ = std::move(j);
  c.path_ = std::move(label);
  return c;
}

bool Config::has(const std::string& key) const { return j_.contains(key); }

void Config::fail(const std::string& key, const std::string& why) const {
  throw ConfigError(path_ + "." + key + ": " + why);
}

const nlohmann::json& Config::require(const std::string& key) const {
  if (!j_.contains(key)) fail(key, "missing required field");
  return j_.at(key);
}

Config Config::child(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_object()) fail(key, "expected an object");
  Config c;
  c.j_ = v;
  c.path_ = path_ + "." + key;
  return c;
}

std::optional<Config> Config::child_opt(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return child(key);
}

std::vector<Config> Config::children(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_array()) fail(key, "expected an array of objects");
  std::vector<Config> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_object())
      fail(key + "[" + std::to_string(i) + "]", "expected an object");
    Config c;
    c.j_ = v[i];
    c.path_ = path_ + "." + key + "[" + std::to_string(i) + "]";
    out.push_back(std::move(c));
  }
  return out;
}

double Config::number(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_number()) fail(key, "expected a number");
  return v.get<double>();
}

double Config::number_or(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

double Config::positive(const std::string& key) const {
  const double v = number(key);
  if (!(v > 0.0)) fail(key, "must be > 0");
  return v;
}

double Config::positive_or(const std::string& key, double fallback) const {
  return has(key) ? positive(key) : fallback;
}

int Config::integer(const std::string& key) const {
  const double v = number(key);
  if (v != std::floor(v) || std::abs(v) > 2147483647.0)
    fail(key, "expected an integer");
  return static_cast<int>(v);
}

int Config::integer_or(const std::string& key, int fallback) const {
  return has(key) ? integer(key) : fallback;
}

std::uint64_t Config::uint64_or(const std::string& key,
                                std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const auto& v = j_.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(v.get<std::int64_t>());
  fail(key, "expected a non-negative integer");
}

bool Config::boolean_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto& v = j_.at(key);
  if (!v.is_boolean()) fail(key, "expected true or false");
  return v.get<bool>();
}

std::string Config::string_value(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_string()) fail(key, "expected a string");
  return v.get<std::string>();
}

std::string Config::string_or(const std::string& key,
                              const std::string& fallback) const {
  return has(key) ? string_value(key) : fallback;
}

std::vector<double> Config::numbers(const std::string& key) const {
  const auto& v = require(key);
  if (!v.is_array()) fail(key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number())
      fail(key + "[" + std::to_string(i) + "]", "expected a number");
    out.push_back(v[i].get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// domain blocks
// ---------------------------------------------------------------------------

NuclearSpinConfig parse_spin(const Config& block) {
  NuclearSpinConfig spin;
  spin.larmor = hz_to_angular(block.number("larmor_hz"));
  spin.hyperfine.a_par = hz_to_angular(block.number_or("a_par_hz", 0.0));
  spin.hyperfine.a_perp = hz_to_angular(block.number_or("a_perp_hz", 0.0));
  if (!(spin.larmor > 0.0))
    block.fail("larmor_hz",
               "nuclear spin config requires a positive Larmor frequency");
  if (spin.hyperfine.a_perp < 0.0)
    block.fail("a_perp_hz", "nuclear spin config requires a_perp >= 0");
  return spin;
}

std::vector<NuclearSpinConfig> parse_spins(const Config& root) {
  if (root.has("spins")) {
    std::vector<NuclearSpinConfig> out;
    for (const Config& c : root.children("spins")) out.push_back(parse_spin(c));
    if (out.empty()) root.fail("spins", "must not be empty");
    return out;
  }
  return {parse_spin(root.child("spin"))};
}

ElectronSpec parse_electron(const Config& root) {
  ElectronSpec e;
  if (const auto block = root.child_opt("electron")) {
    e.s0 = block->number_or("s0", e.s0);
    e.s1 = block->number_or("s1", e.s1);
    e.t2_echo = block->number_or("t2_echo_s", e.t2_echo);
    e.chi = block->number_or("chi", e.chi);
    e.decay_exponent = block->number_or("decay_exponent", e.decay_exponent);
    try {
      e.validate();
    } catch (const std::invalid_argument& err) {
      throw ConfigError(block->where() + ": " + err.what());
    }
  }
  return e;
}

DDSequence parse_sequence(const Config& root) {
  const Config block = root.child("sequence");
  DDSequence seq;
  seq.tau = block.number("tau_s");
  seq.n_pulses = block.integer("n_pulses");
  try {
    seq.validate();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(block.where() + ": " + err.what());
  }
  return seq;
}

PropagationConfig parse_propagation(const Config& root) {
  PropagationConfig config;
  if (const auto block = root.child_opt("propagation")) {
    const std::string model = block->string_or("model", "rotating_wave");
    if (model == "rotating_wave")
      config.model = DriveModel::rotating_wave;
    else if (model == "full_drive")
      config.model = DriveModel::full_drive;
    else
      block->fail("model", "must be \"rotating_wave\" or \"full_drive\"");
    const std::string tilt = block->string_or("tilt", "ignored");
    if (tilt == "ignored")
      config.tilt = BranchTilt::ignored;
    else if (tilt == "included")
      config.tilt = BranchTilt::included;
    else
      block->fail("tilt", "must be \"ignored\" or \"included\"");
    config.steps_per_period =
        block->positive_or("steps_per_period", config.steps_per_period);
  }
  return config;
}

std::vector<double> parse_grid(const Config& root, const std::string& key,
                               const std::string& unit) {
  const Config block = root.child(key);
  const std::string suffix = unit.empty() ? "" : "_" + unit;
  if (block.has("values" + suffix)) {
    const std::vector<double> values = block.numbers("values" + suffix);
    if (values.empty()) block.fail("values" + suffix, "must not be empty");
    return values;
  }
  const double lo = block.number("min" + suffix);
  const double hi = block.number("max" + suffix);
  const int points = block.integer("points");
  const std::string spacing = block.string_or("spacing", "linear");
  if (points < 1) block.fail("points", "must be >= 1");
  if (!(hi >= lo)) block.fail("max" + suffix, "must be >= min" + suffix);
  if (points == 1) return {lo};
  std::vector<double> out(points);
  if (spacing == "linear") {
    for (int i = 0; i < points; ++i)
      out[i] = lo + (hi - lo) * i / (points - 1.0);
  } else if (spacing == "log") {
    if (!(lo > 0.0)) block.fail("min" + suffix, "log spacing requires > 0");
    const double ratio = std::log(hi / lo);
    for (int i = 0; i < points; ++i)
      out[i] = lo * std::exp(ratio * i / (points - 1.0));
  } else {
    block.fail("spacing", "must be \"linear\" or \"log\"");
  }
  return out;
}

}  // namespace spinctrl

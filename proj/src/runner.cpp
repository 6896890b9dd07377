#include "spinctrl/runner.hpp"

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "spinctrl/analysis.hpp"
#include "spinctrl/bath.hpp"
#include "spinctrl/config.hpp"
#include "spinctrl/csv.hpp"
#include "spinctrl/dd.hpp"
#include "spinctrl/ddrf.hpp"
#include "spinctrl/errors.hpp"
#include "spinctrl/optimizer.hpp"
#include "spinctrl/units.hpp"

namespace spinctrl {

namespace {

// ---------------------------------------------------------------------------
// plumbing
// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

std::string iso8601_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Deterministic work distribution: results must be stored by index inside
/// `fn`; the first exception is rethrown on the calling thread.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct RunContext {
  Config cfg;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int threads = 1;
  bool validate_only = false;
  std::vector<std::string> outputs;

  std::string out_path(const std::string& name) const {
    return out_dir + "/" + name;
  }
  void emit_map(const CoherenceMap& map, const std::string& name) {
    write_coherence_map_csv(map, out_path(name));
    outputs.push_back(name);
  }
  void emit_table(const std::vector<std::string>& header,
                  const std::vector<std::vector<double>>& rows,
                  const std::string& name) {
    write_csv(out_path(name), header, rows);
    outputs.push_back(name);
  }
};

int parse_branch(const Config& cfg) {
  const int branch = cfg.integer_or("branch", 0);
  if (branch != 0 && branch != 1) cfg.fail("branch", "must be 0 or 1");
  return branch;
}

std::vector<int> parse_pulse_list(const Config& cfg, const std::string& key) {
  std::vector<int> out;
  for (double v : cfg.numbers(key)) {
    if (v != std::floor(v) || v < 2.0 || std::fmod(v, 2.0) != 0.0)
      cfg.fail(key, "entries must be even integers >= 2");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

GateConstraints parse_constraints(const Config& root, const ElectronSpec& e) {
  GateConstraints gc;
  gc.electron = e;
  if (const auto block = root.child_opt("constraints")) {
    gc.max_total_time =
        block->positive_or("max_total_time_s", gc.max_total_time);
    gc.min_electron_coherence = block->number_or("min_electron_coherence",
                                                 gc.min_electron_coherence);
    if (gc.min_electron_coherence < 0.0 || gc.min_electron_coherence > 1.0)
      block->fail("min_electron_coherence", "must lie in [0, 1]");
    gc.max_rabi =
        hz_to_angular(block->positive_or("max_rabi_hz",
                                         angular_to_hz(gc.max_rabi)));
  }
  return gc;
}

BathOptions parse_bath_options(const Config& block) {
  BathOptions opts;
  opts.radius = block.positive_or("radius_m", opts.radius);
  opts.abundance = block.number_or("abundance", opts.abundance);
  if (!(opts.abundance > 0.0 && opts.abundance <= 1.0))
    block.fail("abundance", "must lie in (0, 1]");
  return opts;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

void run_dd_spectrum(RunContext& ctx) {
  const auto spins = parse_spins(ctx.cfg);
  const ElectronSpec e = parse_electron(ctx.cfg);
  const int n_pulses = ctx.cfg.integer("n_pulses");
  if (n_pulses < 2 || n_pulses % 2 != 0)
    ctx.cfg.fail("n_pulses", "must be an even integer >= 2");
  const auto tau_grid = parse_grid(ctx.cfg, "tau_grid", "s");
  for (double tau : tau_grid)
    if (!(tau > 0.0)) ctx.cfg.fail("tau_grid", "delays must be > 0");
  SpectrumOptions opts;
  opts.include_envelope = ctx.cfg.boolean_or("include_envelope", false);
  if (ctx.validate_only) return;
  ctx.emit_map(dd_spectrum(spins, e, tau_grid, n_pulses, opts),
               "dd_spectrum.csv");
}

void run_dd_calibrate(RunContext& ctx) {
  const NuclearSpinConfig spin = parse_spin(ctx.cfg.child("spin"));
  const ElectronSpec e = parse_electron(ctx.cfg);
  const double tau = ctx.cfg.positive("tau_s");
  const int n_max = ctx.cfg.integer_or("n_max", 2048);
  if (n_max < 2) ctx.cfg.fail("n_max", "must be >= 2");
  const auto larmor_fit = ctx.cfg.child_opt("fit_larmor");
  double w0 = 0.0, w1 = 0.0;
  if (larmor_fit) {
    w0 = hz_to_angular(larmor_fit->positive("w0_hz"));
    w1 = hz_to_angular(larmor_fit->positive("w1_hz"));
  }
  if (ctx.validate_only) return;
  const CalibrationResult cal = dd_gate_calibration(spin, e, tau, n_max);
  ctx.emit_map(cal.curve, "dd_calibration.csv");
  std::vector<std::string> header{"tau_s", "n_below", "n_above", "n_star"};
  std::vector<double> row{tau, double(cal.n_below), double(cal.n_above),
                          cal.n_star};
  if (larmor_fit) {
    const LarmorFit fit = fit_larmor_from_calibration(cal.curve, w0, w1, e);
    header.insert(header.end(), {"larmor_fit_hz", "larmor_residual_rms"});
    row.insert(row.end(), {angular_to_hz(fit.larmor), fit.residual_rms});
  }
  ctx.emit_table(header, {row}, "dd_calibration_summary.csv");
}

void run_ddrf_spectrum(RunContext& ctx) {
  const auto spins = parse_spins(ctx.cfg);
  const ElectronSpec e = parse_electron(ctx.cfg);
  const DDSequence seq = parse_sequence(ctx.cfg);
  const double rabi = hz_to_angular(ctx.cfg.positive("rabi_hz"));
  const auto rf_hz = parse_grid(ctx.cfg, "rf_grid", "hz");
  std::vector<double> bar_hz;
  if (ctx.cfg.has("omega_bar_grid"))
    bar_hz = parse_grid(ctx.cfg, "omega_bar_grid", "hz");
  else
    bar_hz = {angular_to_hz(average_frequency(spins.front(), e))};
  const PropagationConfig config = parse_propagation(ctx.cfg);
  if (ctx.validate_only) return;

  std::vector<double> rf_grid, bar_grid;
  for (double f : rf_hz) rf_grid.push_back(hz_to_angular(f));
  for (double f : bar_hz) bar_grid.push_back(hz_to_angular(f));

  // Row-parallel evaluation; rows are stitched in omega_bar order, so the
  // output is independent of the thread count.
  CoherenceMap map;
  map.axes = {{"omega_bar", "Hz", bar_hz}, {"omega_rf", "Hz", rf_hz}};
  map.values.assign(bar_hz.size() * rf_hz.size(), 0.0);
  parallel_for(static_cast<int>(bar_grid.size()), ctx.threads, [&](int row) {
    const CoherenceMap one = ddrf_spectrum(spins, e, seq, rabi, rf_grid,
                                           {bar_grid[row]}, config);
    std::copy(one.values.begin(), one.values.end(),
              map.values.begin() + row * rf_hz.size());
  });
  ctx.emit_map(map, "ddrf_spectrum.csv");
}

void run_ddrf_calibrate(RunContext& ctx) {
  const auto spins = parse_spins(ctx.cfg);
  const ElectronSpec e = parse_electron(ctx.cfg);
  const DDSequence seq = parse_sequence(ctx.cfg);
  const auto rabi_hz = parse_grid(ctx.cfg, "rabi_grid", "hz");
  const double omega_bar =
      hz_to_angular(ctx.cfg.positive_or(
          "omega_bar_hz", angular_to_hz(average_frequency(spins.front(), e))));
  const double omega_rf = hz_to_angular(ctx.cfg.positive_or(
      "omega_rf_hz",
      angular_to_hz(precession_vector(spins.front(), e.s1).magnitude())));
  const PropagationConfig config = parse_propagation(ctx.cfg);
  if (ctx.validate_only) return;
  std::vector<double> rabi_grid;
  for (double f : rabi_hz) rabi_grid.push_back(hz_to_angular(f));
  const AmplitudeCalibration cal = calibrate_ddrf_amplitude(
      spins, e, seq, omega_bar, omega_rf, rabi_grid, config);
  ctx.emit_map(cal.curve, "ddrf_calibration.csv");
  ctx.emit_table({"omega_bar_hz", "omega_rf_hz", "rabi_star_hz"},
                 {{angular_to_hz(omega_bar), angular_to_hz(omega_rf),
                   angular_to_hz(cal.rabi_star)}},
                 "ddrf_calibration_summary.csv");
}

void run_nmr(RunContext& ctx) {
  const NuclearSpinConfig spin = parse_spin(ctx.cfg.child("spin"));
  const ElectronSpec e = parse_electron(ctx.cfg);
  const int branch = parse_branch(ctx.cfg);
  const auto freq_hz = parse_grid(ctx.cfg, "freq_grid", "hz");
  const double rabi = hz_to_angular(ctx.cfg.positive("rabi_hz"));
  const double duration = ctx.cfg.positive("duration_s");
  const PropagationConfig config = parse_propagation(ctx.cfg);
  if (ctx.validate_only) return;
  std::vector<double> freq_grid;
  for (double f : freq_hz) freq_grid.push_back(hz_to_angular(f));
  ctx.emit_map(direct_rf_nmr(spin, e, branch, freq_grid, rabi, duration,
                             config),
               "nmr.csv");
}

void run_rabi(RunContext& ctx) {
  const double rabi = hz_to_angular(ctx.cfg.positive("rabi_hz"));
  const auto durations = parse_grid(ctx.cfg, "duration_grid", "s");
  if (ctx.validate_only) return;
  ctx.emit_map(rf_rabi(rabi, durations), "rabi.csv");
}

void run_ramsey(RunContext& ctx) {
  const NuclearSpinConfig spin = parse_spin(ctx.cfg.child("spin"));
  const ElectronSpec e = parse_electron(ctx.cfg);
  const int branch = parse_branch(ctx.cfg);
  const auto times = parse_grid(ctx.cfg, "time_grid", "s");
  std::vector<double> couplings;
  if (ctx.cfg.has("couplings_hz")) couplings = ctx.cfg.numbers("couplings_hz");
  const double contrast = ctx.cfg.number_or("contrast", 1.0);
  if (ctx.validate_only) return;
  ctx.emit_map(nuclear_ramsey(spin, e, branch, times, couplings, contrast),
               "ramsey.csv");
}

void run_bath_gen(RunContext& ctx) {
  const double larmor = hz_to_angular(ctx.cfg.positive("larmor_hz"));
  BathOptions opts;
  if (const auto block = ctx.cfg.child_opt("bath"))
    opts = parse_bath_options(*block);
  const std::uint64_t stream = ctx.cfg.uint64_or("stream", 0);
  const auto statistical = ctx.cfg.child_opt("statistical");
  int n_realizations = 0;
  double bin_width = hz_to_angular(2e3), cutoff = hz_to_angular(20e3);
  if (statistical) {
    n_realizations = statistical->integer_or("n_realizations", 100);
    if (n_realizations < 1)
      statistical->fail("n_realizations", "must be >= 1");
    bin_width = hz_to_angular(
        statistical->positive_or("bin_width_hz", angular_to_hz(bin_width)));
    cutoff = hz_to_angular(
        statistical->positive_or("cutoff_hz", angular_to_hz(cutoff)));
  }
  const auto annuli = ctx.cfg.child_opt("annuli");
  int annuli_realizations = 0, n_annuli = 0;
  if (annuli) {
    annuli_realizations = annuli->integer_or("n_realizations", 20);
    n_annuli = annuli->integer("count");
    if (annuli_realizations < 1 || n_annuli < 1)
      annuli->fail("count", "realizations and count must be >= 1");
  }
  if (ctx.validate_only) return;

  const BathRealization bath = sample_bath(ctx.seed, stream, larmor, opts);
  export_bath_csv(bath, ctx.out_path("bath.csv"));
  ctx.outputs.push_back("bath.csv");
  if (statistical) {
    const StatisticalBath stat =
        statistical_bath(ctx.seed, n_realizations, larmor, bin_width, cutoff,
                         opts);
    std::vector<std::vector<double>> rows;
    for (const auto& bin : stat.bins)
      rows.push_back({angular_to_hz(bin.a_par), bin.weight});
    ctx.emit_table({"a_par_hz", "weight"}, rows, "bath_bins.csv");
  }
  if (annuli) {
    const std::vector<double> radii = bystander_density_annuli(
        ctx.seed, annuli_realizations, n_annuli, larmor, opts);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < radii.size(); ++i)
      rows.push_back({double(i), angular_to_hz(radii[i])});
    ctx.emit_table({"annulus", "coupling_hz"}, rows, "bath_annuli.csv");
  }
}

void run_optimize_gate(RunContext& ctx) {
  const NuclearSpinConfig target = parse_spin(ctx.cfg.child("target"));
  const ElectronSpec e = parse_electron(ctx.cfg);
  const GateConstraints constraints = parse_constraints(ctx.cfg, e);
  const Config bath_block = ctx.cfg.child("bath");
  const BathOptions bath_opts = parse_bath_options(bath_block);
  const int n_realizations = bath_block.integer_or("n_realizations", 100);
  if (n_realizations < 1) bath_block.fail("n_realizations", "must be >= 1");
  const double bin_width =
      hz_to_angular(bath_block.positive_or("bin_width_hz", 2e3));
  const double cutoff =
      hz_to_angular(bath_block.positive_or("cutoff_hz", 20e3));
  OptimizeGateOptions opts;
  if (ctx.cfg.has("tau_grid")) {
    opts.tau_grid = parse_grid(ctx.cfg, "tau_grid", "s");
    for (double tau : opts.tau_grid)
      if (!(tau > 0.0)) ctx.cfg.fail("tau_grid", "delays must be > 0");
  }
  if (ctx.cfg.has("n_pulse_grid"))
    opts.n_pulse_grid = parse_pulse_list(ctx.cfg, "n_pulse_grid");
  opts.config = parse_propagation(ctx.cfg);
  if (ctx.validate_only) return;

  const StatisticalBath bath = statistical_bath(
      ctx.seed, n_realizations, target.larmor, bin_width, cutoff, bath_opts);
  const GateBudget gate = optimize_gate(target, bath, constraints, opts);
  ctx.emit_table(
      {"method", "tau_s", "n_pulses", "rabi_hz", "electron_coherence",
       "bath_survival", "fidelity_estimate", "total_time_s"},
      {{gate.method == GateMethod::ddrf ? 1.0 : 0.0, gate.tau,
        double(gate.n_pulses), angular_to_hz(gate.rabi),
        gate.electron_coherence, gate.bath_survival, gate.fidelity_estimate,
        gate.total_time()}},
      "gate.csv");
}

void run_compare_selectivity(RunContext& ctx) {
  const NuclearSpinConfig target = parse_spin(ctx.cfg.child("target"));
  const ElectronSpec e = parse_electron(ctx.cfg);
  const GateConstraints constraints = parse_constraints(ctx.cfg, e);
  SelectivityOptions opts;
  if (const auto block = ctx.cfg.child_opt("selectivity")) {
    opts.n_max = block->integer_or("n_max", opts.n_max);
    if (opts.n_max < 2) block->fail("n_max", "must be >= 2");
    opts.dd_gate_tolerance =
        block->positive_or("dd_gate_tolerance", opts.dd_gate_tolerance);
    opts.crosstalk_threshold =
        block->positive_or("crosstalk_threshold", opts.crosstalk_threshold);
    opts.grid_points = block->integer_or("grid_points", opts.grid_points);
    if (opts.grid_points < 2) block->fail("grid_points", "must be >= 2");
    opts.grid_min_hz = block->positive_or("grid_min_hz", opts.grid_min_hz);
    opts.grid_max_hz = block->positive_or("grid_max_hz", opts.grid_max_hz);
    if (!(opts.grid_max_hz > opts.grid_min_hz))
      block->fail("grid_max_hz", "must exceed grid_min_hz");
  }
  if (ctx.cfg.has("tau_grid")) {
    opts.tau_grid = parse_grid(ctx.cfg, "tau_grid", "s");
    for (double tau : opts.tau_grid)
      if (!(tau > 0.0)) ctx.cfg.fail("tau_grid", "delays must be > 0");
  }
  if (ctx.cfg.has("n_pulse_grid"))
    opts.n_pulse_grid = parse_pulse_list(ctx.cfg, "n_pulse_grid");
  opts.config = parse_propagation(ctx.cfg);
  if (ctx.validate_only) return;

  const std::vector<ScenarioResult> scenarios =
      compare_selectivity(target, constraints, opts);
  std::vector<std::vector<double>> rows;
  for (const ScenarioResult& sc : scenarios) {
    const GateBudget& g = sc.selectivity.gate;
    rows.push_back({sc.method == GateMethod::ddrf ? 1.0 : 0.0,
                    sc.electron.s0, sc.electron.s1, g.tau, double(g.n_pulses),
                    angular_to_hz(g.rabi), g.fidelity_estimate,
                    double(sc.selectivity.crosstalk_cells), g.total_time()});
    ctx.emit_map(sc.selectivity.crosstalk, "crosstalk_" + sc.label + ".csv");
  }
  ctx.emit_table({"method", "s0", "s1", "tau_s", "n_pulses", "rabi_hz",
                  "fidelity_estimate", "crosstalk_cells", "total_time_s"},
                 rows, "selectivity_summary.csv");
}

void run_fit(RunContext& ctx) {
  const std::string model = ctx.cfg.string_value("model");
  if (model != "stretched_exponential" && model != "dd_scaling" &&
      model != "ramsey")
    ctx.cfg.fail("model",
                 "must be \"stretched_exponential\", \"dd_scaling\", or "
                 "\"ramsey\"");
  RamseyFitOptions ramsey_opts;
  if (const auto block = ctx.cfg.child_opt("ramsey")) {
    ramsey_opts.n_tones = block->integer_or("n_tones", 1);
    if (ramsey_opts.n_tones < 1 || ramsey_opts.n_tones > 2)
      block->fail("n_tones", "must be 1 or 2");
    ramsey_opts.frequency_bracket_lo_hz =
        block->number_or("bracket_lo_hz", 0.0);
    ramsey_opts.frequency_bracket_hi_hz =
        block->number_or("bracket_hi_hz", 0.0);
  }
  std::vector<double> x, y;
  if (ctx.cfg.has("x") || ctx.cfg.has("y")) {
    x = ctx.cfg.numbers("x");
    y = ctx.cfg.numbers("y");
  } else {
    const std::string data_path = ctx.cfg.string_value("data_csv");
    if (ctx.validate_only) return;
    const CsvTable table = read_csv(data_path);
    if (table.header.size() < 2)
      throw ConfigError("config.data_csv: '" + data_path +
                        "' needs at least two columns");
    std::size_t xi = 0, yi = 1;
    const std::string xcol = ctx.cfg.string_or("x_column", table.header[0]);
    const std::string ycol = ctx.cfg.string_or("y_column", table.header[1]);
    bool found_x = false, found_y = false;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
      if (table.header[i] == xcol) {
        xi = i;
        found_x = true;
      }
      if (table.header[i] == ycol) {
        yi = i;
        found_y = true;
      }
    }
    if (!found_x)
      throw ConfigError("config.x_column: '" + xcol + "' not in " + data_path);
    if (!found_y)
      throw ConfigError("config.y_column: '" + ycol + "' not in " + data_path);
    for (const auto& row : table.rows) {
      x.push_back(row[xi]);
      y.push_back(row[yi]);
    }
  }
  if (ctx.validate_only) return;

  FitResult fit;
  if (model == "stretched_exponential")
    fit = fit_stretched_exponential(x, y);
  else if (model == "dd_scaling")
    fit = fit_dd_scaling(x, y);
  else
    fit = ramsey_model_fit(x, y, ramsey_opts);
  std::vector<std::string> header = fit.names;
  header.push_back("residual");
  std::vector<double> values = fit.params;
  values.push_back(fit.residual);
  std::vector<double> uncertainties = fit.uncertainties;
  uncertainties.push_back(0.0);
  ctx.emit_table(header, {values, uncertainties}, "fit.csv");
}

void run_analyze_bell(RunContext& ctx) {
  const Config block = ctx.cfg.child("correlators");
  auto read_pair = [&](const std::string& key) {
    const Config c = block.child(key);
    Measurement m;
    m.value = c.number("value");
    m.error = c.number_or("error", 0.0);
    if (m.error < 0.0) c.fail("error", "must be >= 0");
    return m;
  };
  Correlators corr{read_pair("xx"), read_pair("yy"), read_pair("zz")};
  const auto readout = ctx.cfg.child_opt("readout");
  double f0 = 0.0, f1 = 0.0, fn = 0.0;
  if (readout) {
    f0 = readout->number("f0");
    f1 = readout->number("f1");
    fn = readout->number("nuclear_gate_fidelity");
  }
  const bool with_budget = ctx.cfg.has("gate_contrast");
  const double contrast = ctx.cfg.number_or("gate_contrast", 0.0);
  if (ctx.validate_only) return;

  if (readout) corr = readout_correct(corr, f0, f1, fn);
  const Measurement fid = bell_fidelity(corr);
  std::vector<std::string> header{"xx",       "xx_error", "yy",
                                  "yy_error", "zz",       "zz_error",
                                  "fidelity", "fidelity_error"};
  std::vector<double> row{corr.xx.value, corr.xx.error, corr.yy.value,
                          corr.yy.error, corr.zz.value, corr.zz.error,
                          fid.value,     fid.error};
  if (with_budget) {
    const double f_gate = gate_fidelity_from_contrast(contrast);
    header.insert(header.end(), {"gate_fidelity", "budget_fidelity"});
    row.insert(row.end(), {f_gate, error_budget_bell(f_gate)});
  }
  ctx.emit_table(header, {row}, "bell.csv");
}

void run_excited_state(RunContext& ctx) {
  const auto saturations = parse_grid(ctx.cfg, "saturation_grid", "");
  for (double s : saturations)
    if (s < 0.0) ctx.cfg.fail("saturation_grid", "values must be >= 0");
  const double t_readout = ctx.cfg.number_or("t_readout_s", 0.0);
  if (t_readout < 0.0) ctx.cfg.fail("t_readout_s", "must be >= 0");
  const double delta_a = hz_to_angular(ctx.cfg.number_or("delta_a_hz", 0.0));
  const std::string transition_name =
      ctx.cfg.string_or("transition", "up");
  if (transition_name != "up" && transition_name != "down")
    ctx.cfg.fail("transition", "must be \"up\" or \"down\"");
  const ReadoutTransition transition = transition_name == "up"
                                           ? ReadoutTransition::up
                                           : ReadoutTransition::down;
  if (ctx.validate_only) return;

  std::vector<std::vector<double>> rows;
  for (double s : saturations)
    rows.push_back({s, excited_state_fraction(s),
                    binned_ramsey_phase(t_readout, s, delta_a, transition)});
  ctx.emit_table({"saturation", "excited_fraction", "phase_rad"}, rows,
                 "excited_state.csv");
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

using Handler = void (*)(RunContext&);

struct CommandEntry {
  CommandInfo info;
  Handler handler;
};

const std::vector<CommandEntry>& command_table() {
  static const std::vector<CommandEntry> table = {
      {{"dd-spectrum",
        "Electron coherence vs interpulse delay at fixed pulse number"},
       run_dd_spectrum},
      {{"dd-calibrate",
        "Coherence vs pulse number at fixed delay, with the gate crossing"},
       run_dd_calibrate},
      {{"ddrf-spectrum",
        "RF-driven coherence over (phase-rule frequency, tone frequency)"},
       run_ddrf_spectrum},
      {{"ddrf-calibrate", "RF amplitude sweep at a fixed schedule shape"},
       run_ddrf_calibrate},
      {{"nmr", "Single-pulse nuclear resonance sweep at a pinned electron"},
       run_nmr},
      {{"rabi", "Resonant nuclear Rabi oscillation vs pulse duration"},
       run_rabi},
      {{"ramsey", "Conditional free-precession fringe with optional beats"},
       run_ramsey},
      {{"bath-gen",
        "Sample a nuclear spin bath; optional histogram and annuli"},
       run_bath_gen},
      {{"optimize-gate",
        "Search (tau, N, rabi) for the best-fidelity nuclear gate"},
       run_optimize_gate},
      {{"compare-selectivity",
        "Crosstalk comparison of DD vs RF-driven gates, both electron kinds"},
       run_compare_selectivity},
      {{"fit", "Least-squares model fits of CSV or inline data"}, run_fit},
      {{"analyze-bell",
        "Bell fidelity from correlators with readout correction and budget"},
       run_analyze_bell},
      {{"excited-state",
        "Saturation sweep of excited-state fraction and readout phase"},
       run_excited_state},
  };
  return table;
}

}  // namespace

const std::vector<CommandInfo>& command_list() {
  static const std::vector<CommandInfo> list = [] {
    std::vector<CommandInfo> out;
    for (const auto& entry : command_table()) out.push_back(entry.info);
    return out;
  }();
  return list;
}

int run_command(const RunOptions& opts) {
  try {
    const CommandEntry* entry = nullptr;
    for (const auto& candidate : command_table())
      if (candidate.info.name == opts.command) entry = &candidate;
    if (!entry)
      throw ConfigError("unknown command '" + opts.command + "'");

    RunContext ctx;
    ctx.cfg = Config::load_file(opts.config_path);
    ctx.seed = opts.seed ? *opts.seed : ctx.cfg.uint64_or("seed", 0);
    ctx.out_dir =
        opts.out_dir ? *opts.out_dir : ctx.cfg.string_or("output_dir", ".");
    ctx.threads = std::max(1, opts.threads);
    ctx.validate_only = opts.validate_only;

    const std::time_t start = std::time(nullptr);
    if (!ctx.validate_only && ctx.out_dir != ".") {
      std::error_code ec;
      std::filesystem::create_directories(ctx.out_dir, ec);
      if (ec)
        throw ConfigError("cannot create output directory '" + ctx.out_dir +
                          "': " + ec.message());
    }
    entry->handler(ctx);
    if (!ctx.validate_only) {
      nlohmann::json manifest;
      manifest["version"] = version;
      manifest["command"] = opts.command;
      manifest["config_hash"] = fnv1a_hex(ctx.cfg.raw().dump());
      manifest["seed"] = ctx.seed;
      manifest["start_time"] = iso8601_utc(start);
      manifest["end_time"] = iso8601_utc(std::time(nullptr));
      manifest["outputs"] = ctx.outputs;
      write_text_atomic(ctx.out_path("manifest.json"), manifest.dump(2) + "\n");
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ComputationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace spinctrl

#include "tli/commands.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "tli/errors.hpp"
#include "tli/field_sensing.hpp"
#include "tli/interferometer.hpp"
#include "tli/kinematics.hpp"

namespace tli {

namespace {

constexpr std::array<std::pair<Command, std::string_view>, 8> kCommands{{
    {Command::kinematics, "kinematics"},
    {Command::sweep_energy, "sweep-energy"},
    {Command::sweep_field, "sweep-field"},
    {Command::fringe, "fringe"},
    {Command::step, "step"},
    {Command::sensitivity, "sensitivity"},
    {Command::scale, "scale"},
    {Command::validate, "validate"},
}};

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

BeamlineConfig beamline_for(const RunConfig &cfg) {
  BeamlineConfig b = cfg.beamline;
  b.phase_model.rng_seed = cfg.seed;
  return b;
}

CradleSpec cradle_at(const RunConfig &cfg, double current) {
  CradleSpec c = cfg.cradle;
  c.current = current;
  return c;
}

StepProtocol step_protocol(const RunConfig &cfg, std::uint64_t seed) {
  StepProtocol p;
  p.field_step = cradle_field(cradle_at(cfg, cfg.step.current));
  p.field_length = cfg.field_length;
  p.seconds = cfg.step.seconds;
  p.half_period = cfg.step.half_period;
  p.seed = seed;
  return p;
}

// Fringe curve, half-fringe bias and count-rate scale shared by step and sensitivity.
struct OperatingPoint {
  FringeCurve curve;
  double bias;
  double rate_scale;
};

OperatingPoint operating_point(const RunConfig &cfg) {
  OperatingPoint op;
  op.curve = scan_fringe(beamline_for(cfg), cfg.sweep.n_offsets);
  op.bias = half_fringe_offset(op.curve);
  op.rate_scale = cfg.step.rate_scale > 0.0
                      ? cfg.step.rate_scale
                      : rate_for_snr(op.curve, op.bias, cfg.beamline.energy,
                                     step_protocol(cfg, cfg.seed), cfg.step.target_snr,
                                     cfg.beamline.particle);
  return op;
}

void quantity(CsvTable &t, const std::string &name, double value, const std::string &unit) {
  t.add_row({name, csv_number(value), unit});
}

CsvTable kinematics_table(const RunConfig &cfg) {
  const auto &b = cfg.beamline;
  const double period = b.gratings[0].period;
  const double lambda = de_broglie_wavelength(b.energy, b.particle);
  const double lt = talbot_length(period, lambda);
  const double per_amp = cradle_field(cradle_at(cfg, 1.0));
  const double b_period = fringe_period_field(period, cfg.field_length, b.energy, b.particle);
  const double b_ab = 2.0 * std::numbers::pi /
                      ab_phase(1.0, cfg.field_length, lambda, period, b.particle);
  const double m = misalignment_factor(cfg.alignment.beam_height, cfg.alignment.misalignment,
                                       period, cfg.alignment.c_geom);

  CsvTable t{{"quantity", "value", "unit"}, {}};
  quantity(t, "energy", b.energy.electron_volts(), "eV");
  quantity(t, "wavelength", lambda, "m");
  quantity(t, "wavelength_nonrelativistic", nonrelativistic_wavelength(b.energy, b.particle), "m");
  quantity(t, "talbot_length", lt, "m");
  quantity(t, "gap_over_half_talbot", b.grating_gap / (0.5 * lt), "1");
  for (const auto &r : resonant_energies(b.grating_gap, period, cfg.max_order, b.particle)) {
    const std::string n = std::to_string(r.order);
    quantity(t, "resonance_" + n + "_energy", r.energy.electron_volts(), "eV");
    quantity(t, "resonance_" + n + "_wavelength", r.wavelength, "m");
  }
  quantity(t, "cradle_field_per_ampere", per_amp, "T/A");
  quantity(t, "fringe_period_field", b_period, "T");
  quantity(t, "fringe_period_current", b_period / per_amp, "A");
  quantity(t, "ab_phase_period_field", b_ab, "T");
  quantity(t, "misalignment_factor", m, "1");
  quantity(t, "misalignment_reduction", m > 0.0 ? 1.0 / m : INFINITY, "1");
  return t;
}

CsvTable sweep_energy_table(const RunConfig &cfg) {
  const auto energies =
      linspace(cfg.sweep.energy_min, cfg.sweep.energy_max, cfg.sweep.energy_points);
  SweepOptions opts;
  opts.n_offsets = cfg.sweep.n_offsets;
  opts.allow_out_of_range = cfg.sweep.allow_out_of_range;
  CsvTable t{{"energy_eV", "contrast"}, {}};
  for (const auto &p : sweep_energy(beamline_for(cfg), energies, opts))
    t.add_row({csv_number(p.energy_ev), csv_number(p.contrast)});
  return t;
}

CsvTable sweep_field_table(const RunConfig &cfg) {
  const FringeCurve curve = scan_fringe(beamline_for(cfg), cfg.sweep.n_offsets);
  CsvTable t{{"current_A", "B_T", "throughput"}, {}};
  for (double current :
       linspace(cfg.sweep.current_min, cfg.sweep.current_max, cfg.sweep.current_points)) {
    const double field = cradle_field(cradle_at(cfg, current));
    const double s = predict_throughput(curve, FieldRegion{field, cfg.field_length},
                                        cfg.beamline.energy, cfg.beamline.particle);
    t.add_row({csv_number(current), csv_number(field), csv_number(s)});
  }
  return t;
}

CsvTable fringe_table(const RunConfig &cfg) {
  const FringeCurve curve = scan_fringe(beamline_for(cfg), cfg.sweep.n_offsets);
  CsvTable t{{"offset_m", "throughput"}, {}};
  for (std::size_t i = 0; i < curve.offsets.size(); ++i)
    t.add_row({csv_number(curve.offsets[i]), csv_number(curve.throughput[i])});
  return t;
}

CsvTable step_table(const RunConfig &cfg) {
  const OperatingPoint op = operating_point(cfg);
  CsvTable t{{"t_s", "counts"}, {}};
  for (const auto &s : simulate_step_response(op.curve, op.bias, op.rate_scale,
                                              cfg.beamline.energy, step_protocol(cfg, cfg.seed),
                                              cfg.beamline.particle))
    t.add_row({csv_number(s.t), csv_number(s.counts)});
  return t;
}

CsvTable sensitivity_table(const RunConfig &cfg) {
  const OperatingPoint op = operating_point(cfg);
  const auto &b = cfg.beamline;
  const SensorReport report = analyze_operating_point(op.curve, op.bias, op.rate_scale,
                                                      cfg.field_length, b.energy, b.particle);
  const StepProtocol base = step_protocol(cfg, cfg.seed);
  double snr_sum = 0.0;
  for (int r = 0; r < cfg.step.repetitions; ++r) {
    const auto series = simulate_step_response(op.curve, op.bias, op.rate_scale, b.energy,
                                               step_protocol(cfg, cfg.seed + r), b.particle);
    snr_sum += step_snr(series);
  }
  const double mean_snr = snr_sum / cfg.step.repetitions;

  CsvTable t{{"quantity", "value", "unit"}, {}};
  quantity(t, "fringe_contrast", contrast(op.curve), "1");
  quantity(t, "bias_offset", op.bias, "m");
  quantity(t, "rate_scale", op.rate_scale, "counts/s");
  quantity(t, "count_rate", report.count_rate, "counts/s");
  quantity(t, "slope", report.slope, "counts/s/T");
  quantity(t, "shot_noise_sensitivity", report.sensitivity, "T/Hz^0.5");
  quantity(t, "step_field", base.field_step, "T");
  quantity(t, "mean_step_snr", mean_snr, "1");
  quantity(t, "step_sensitivity", std::abs(base.field_step) / mean_snr, "T/Hz^0.5");
  return t;
}

CsvTable scale_table(const RunConfig &cfg) {
  const auto &s = cfg.scale;
  CsvTable t{{"parameter", "value"}, {}};
  t.add_row({"base_sensitivity", csv_number(s.base_sensitivity)});
  t.add_row({"length_ratio", csv_number(s.length_ratio)});
  t.add_row({"concentrator_gain", csv_number(s.concentrator_gain)});
  t.add_row({"area_ratio", csv_number(s.area_ratio)});
  t.add_row({"scaled_sensitivity",
             csv_number(scaled_sensitivity(s.base_sensitivity, s.length_ratio,
                                           s.concentrator_gain, s.area_ratio))});
  return t;
}

CommandResult validate_result(const RunConfig &cfg) {
  const BeamlineLayout layout = plan_beamline(beamline_for(cfg));
  CommandResult result;
  result.table = CsvTable{
      {"leg", "delta_z_m", "dx_m", "required_dx_m", "max_separation_m", "passed"}, {}};
  for (const auto &leg : layout.legs)
    result.table.add_row({leg.name, csv_number(leg.delta_z), csv_number(leg.sampling.dx),
                          csv_number(leg.sampling.required_dx),
                          csv_number(leg.sampling.max_separation),
                          leg.sampling.passed ? "true" : "false"});
  if (!layout.sampling_ok()) {
    result.exit_code = 3;
    result.diagnostic = "sampling check failed on at least one propagation leg";
  }
  return result;
}

} // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto &[cmd, n] : kCommands)
    if (n == name)
      return cmd;
  return std::nullopt;
}

std::string_view command_name(Command cmd) {
  for (const auto &[c, n] : kCommands)
    if (c == cmd)
      return n;
  return "?";
}

std::vector<std::string> command_names() {
  std::vector<std::string> out;
  for (const auto &[c, n] : kCommands)
    out.emplace_back(n);
  return out;
}

std::string csv_number(double value) {
  if (!std::isfinite(value))
    throw DomainError("refusing to write a non-finite CSV value");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.8e", value);
  return buf;
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header.size())
    throw ContractError("CSV row length does not match header");
  rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream &out) const {
  const auto line = [&](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto &r : rows)
    line(r);
}

CommandResult run_command(Command cmd, const RunConfig &cfg) {
  validate_config(cfg);
  switch (cmd) {
  case Command::kinematics:
    return CommandResult{kinematics_table(cfg), 0, {}};
  case Command::sweep_energy:
    return CommandResult{sweep_energy_table(cfg), 0, {}};
  case Command::sweep_field:
    return CommandResult{sweep_field_table(cfg), 0, {}};
  case Command::fringe:
    return CommandResult{fringe_table(cfg), 0, {}};
  case Command::step:
    return CommandResult{step_table(cfg), 0, {}};
  case Command::sensitivity:
    return CommandResult{sensitivity_table(cfg), 0, {}};
  case Command::scale:
    return CommandResult{scale_table(cfg), 0, {}};
  case Command::validate:
    return validate_result(cfg);
  }
  throw ContractError("unknown command");
}

} // namespace tli

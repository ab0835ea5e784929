#ifndef TLI_CONFIG_HPP
#define TLI_CONFIG_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tli/field_sensing.hpp"
#include "tli/interferometer.hpp"

namespace tli {

struct SweepSettings {
  double energy_min = 4.5e3; // eV
  double energy_max = 10e3;  // eV
  int energy_points = 23;
  int n_offsets = 16;
  double current_min = -0.15; // A
  double current_max = 0.15;  // A
  int current_points = 121;
  bool allow_out_of_range = false;

  friend bool operator==(const SweepSettings &, const SweepSettings &) = default;
};

struct StepSettings {
  double current = 2.5e-3; // A
  int seconds = 20;
  int half_period = 10;
  double target_snr = 4.5;
  double rate_scale = 0.0; // counts/s at unit throughput; 0 tunes to target_snr
  int repetitions = 20;

  friend bool operator==(const StepSettings &, const StepSettings &) = default;
};

struct ScaleSettings {
  double base_sensitivity = 9.5e-9; // T Hz^-1/2
  double length_ratio = 10.0 / 3.0;
  double concentrator_gain = 20.0;
  double area_ratio = (3e-3 / 10e-6) * (1e-3 / 30e-6);

  friend bool operator==(const ScaleSettings &, const ScaleSettings &) = default;
};

struct AlignmentSettings {
  double beam_height = 33e-6;
  double misalignment = 1e-3;
  double c_geom = 2.0;

  friend bool operator==(const AlignmentSettings &, const AlignmentSettings &) = default;
};

/// Everything a CLI command needs. Energies are in eV; everything else SI.
struct RunConfig {
  BeamlineConfig beamline;
  CradleSpec cradle;
  double field_length = 6.12e-3;
  SweepSettings sweep;
  StepSettings step;
  ScaleSettings scale;
  AlignmentSettings alignment;
  int max_order = 8;
  std::uint64_t seed = 1;
  std::string output;

  friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

/// Parses `[section]` headers and `key = value` lines; `#` and `;` start
/// comments. Omitted keys keep their defaults. Unknown sections or keys,
/// malformed values and violated invariants throw ConfigError naming the key
/// and line.
RunConfig parse_config(std::string_view text);

/// Every key, grouped by section, in a form parse_config reads back exactly.
std::string serialize_config(const RunConfig &cfg);

/// Cross-field checks (also run by parse_config).
void validate_config(const RunConfig &cfg);

/// Applies a single `section.key` assignment, as from a command-line override.
void set_config_value(RunConfig &cfg, std::string_view dotted_key, std::string_view value);

/// All recognised `section.key` names.
std::vector<std::string> config_keys();

} // namespace tli

#endif // TLI_CONFIG_HPP

#include "tli/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "tli/errors.hpp"

namespace tli {

namespace {

// Thrown by value parsers and setters; rewrapped with key and line.
struct BadValue {
  std::string message;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out))
    throw BadValue{"malformed number '" + std::string(v) + "'"};
  return out;
}

long long to_integer(std::string_view v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size())
    throw BadValue{"malformed integer '" + std::string(v) + "'"};
  return out;
}

bool to_bool(std::string_view v) {
  if (v == "true" || v == "1")
    return true;
  if (v == "false" || v == "0")
    return false;
  throw BadValue{"expected true or false, got '" + std::string(v) + "'"};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double positive(double v) {
  if (!(v > 0.0))
    throw BadValue{"must be positive"};
  return v;
}
double non_negative(double v) {
  if (!(v >= 0.0))
    throw BadValue{"must be non-negative"};
  return v;
}
double unit_open(double v) {
  if (!(v > 0.0 && v < 1.0))
    throw BadValue{"must lie strictly between 0 and 1"};
  return v;
}
int int_at_least(long long v, long long lo) {
  if (v < lo || v > 1'000'000'000)
    throw BadValue{"must be an integer >= " + std::to_string(lo)};
  return static_cast<int>(v);
}

struct KeySpec {
  std::string section;
  std::string name;
  std::function<void(RunConfig &, std::string_view)> set;
  std::function<std::string(const RunConfig &)> get;
};

#define TLI_REAL(sec, key, field, check)                                                        \
  KeySpec {                                                                                      \
    sec, key, [](RunConfig &c, std::string_view v) { c.field = check(to_double(v)); },           \
        [](const RunConfig &c) { return format_double(c.field); }                               \
  }
#define TLI_INT(sec, key, field, lo)                                                            \
  KeySpec {                                                                                      \
    sec, key, [](RunConfig &c, std::string_view v) { c.field = int_at_least(to_integer(v), lo); }, \
        [](const RunConfig &c) { return std::to_string(c.field); }                               \
  }
#define TLI_BOOL(sec, key, field)                                                               \
  KeySpec {                                                                                      \
    sec, key, [](RunConfig &c, std::string_view v) { c.field = to_bool(v); },                     \
        [](const RunConfig &c) { return std::string(c.field ? "true" : "false"); }               \
  }

double any(double v) { return v; }

void set_energy(RunConfig &c, std::string_view v) {
  c.beamline.energy = BeamEnergy(positive(to_double(v)));
}

void set_all_gratings(RunConfig &c, double GratingSpec::*field, double value) {
  for (auto &g : c.beamline.gratings)
    g.*field = value;
}

const std::vector<KeySpec> &key_table() {
  static const std::vector<KeySpec> table = {
      TLI_REAL("beamline", "source_slit_width", beamline.source_slit.width, positive),
      TLI_REAL("beamline", "source_slit_center", beamline.source_slit.center, any),
      TLI_REAL("beamline", "second_slit_width", beamline.second_slit.width, positive),
      TLI_REAL("beamline", "second_slit_center", beamline.second_slit.center, any),
      TLI_REAL("beamline", "slit_separation", beamline.slit_separation, positive),
      TLI_REAL("beamline", "slit2_to_g1", beamline.slit2_to_g1, positive),
      TLI_REAL("beamline", "grating_gap", beamline.grating_gap, positive),
      KeySpec{"beamline", "grating_period",
              [](RunConfig &c, std::string_view v) {
                set_all_gratings(c, &GratingSpec::period, positive(to_double(v)));
              },
              [](const RunConfig &c) { return format_double(c.beamline.gratings[0].period); }},
      KeySpec{"beamline", "open_fraction",
              [](RunConfig &c, std::string_view v) {
                set_all_gratings(c, &GratingSpec::open_fraction, unit_open(to_double(v)));
              },
              [](const RunConfig &c) {
                return format_double(c.beamline.gratings[0].open_fraction);
              }},
      KeySpec{"beamline", "grating_extent",
              [](RunConfig &c, std::string_view v) {
                set_all_gratings(c, &GratingSpec::extent, positive(to_double(v)));
              },
              [](const RunConfig &c) { return format_double(c.beamline.gratings[0].extent); }},
      TLI_REAL("beamline", "g1_offset", beamline.gratings[0].offset, any),
      TLI_REAL("beamline", "g2_offset", beamline.gratings[1].offset, any),
      TLI_REAL("beamline", "g3_offset", beamline.gratings[2].offset, any),
      KeySpec{"beamline", "energy", set_energy,
              [](const RunConfig &c) { return format_double(c.beamline.energy.electron_volts()); }},
      TLI_INT("beamline", "n_sources", beamline.n_sources, 1),
      KeySpec{"beamline", "propagator",
              [](RunConfig &c, std::string_view v) {
                if (v == "direct")
                  c.beamline.propagator = Propagator::direct;
                else if (v == "paraxial")
                  c.beamline.propagator = Propagator::paraxial;
                else
                  throw BadValue{"expected direct or paraxial, got '" + std::string(v) + "'"};
              },
              [](const RunConfig &c) {
                return std::string(c.beamline.propagator == Propagator::direct ? "direct"
                                                                              : "paraxial");
              }},
      KeySpec{"beamline", "threads",
              [](RunConfig &c, std::string_view v) {
                c.beamline.threads = static_cast<unsigned>(int_at_least(to_integer(v), 0));
              },
              [](const RunConfig &c) { return std::to_string(c.beamline.threads); }},

      TLI_REAL("grid", "max_step", beamline.grid.max_step, positive),
      KeySpec{"grid", "count",
              [](RunConfig &c, std::string_view v) {
                const int n = int_at_least(to_integer(v), 0);
                if (n == 1)
                  throw BadValue{"must be 0 (auto) or at least 2"};
                c.beamline.grid.count = n;
              },
              [](const RunConfig &c) { return std::to_string(c.beamline.grid.count); }},
      TLI_REAL("grid", "window_factor", beamline.grid.window_factor,
               [](double v) {
                 if (!(v >= 1.0))
                   throw BadValue{"must be at least 1"};
                 return v;
               }),
      TLI_INT("grid", "diffraction_orders", beamline.grid.diffraction_orders, 0),
      TLI_REAL("grid", "pad_factor", beamline.grid.pad_factor,
               [](double v) {
                 if (!(v >= 2.0))
                   throw BadValue{"must be at least 2"};
                 return v;
               }),
      TLI_REAL("grid", "sampling_margin", beamline.grid.sampling_margin,
               [](double v) {
                 if (!(v > 0.0 && v <= 1.0))
                   throw BadValue{"must lie in (0, 1]"};
                 return v;
               }),
      TLI_BOOL("grid", "allow_undersampling", beamline.allow_undersampling),

      TLI_REAL("phase", "image_charge_strength", beamline.phase_model.image_charge_strength,
               non_negative),
      TLI_REAL("phase", "image_charge_range", beamline.phase_model.image_charge_range, positive),
      TLI_REAL("phase", "random_phase_max", beamline.phase_model.random_phase_max, non_negative),

      TLI_REAL("cradle", "edge_length", cradle.edge_length, positive),
      TLI_REAL("cradle", "efficiency", cradle.efficiency, positive),

      TLI_REAL("field_region", "length", field_length, positive),

      TLI_REAL("sweep", "energy_min", sweep.energy_min, positive),
      TLI_REAL("sweep", "energy_max", sweep.energy_max, positive),
      TLI_INT("sweep", "energy_points", sweep.energy_points, 1),
      TLI_INT("sweep", "n_offsets", sweep.n_offsets, 8),
      TLI_REAL("sweep", "current_min", sweep.current_min, any),
      TLI_REAL("sweep", "current_max", sweep.current_max, any),
      TLI_INT("sweep", "current_points", sweep.current_points, 1),
      TLI_BOOL("sweep", "allow_out_of_range", sweep.allow_out_of_range),

      TLI_REAL("step", "current", step.current, any),
      TLI_INT("step", "seconds", step.seconds, 2),
      TLI_INT("step", "half_period", step.half_period, 1),
      TLI_REAL("step", "target_snr", step.target_snr, positive),
      TLI_REAL("step", "rate_scale", step.rate_scale, non_negative),
      TLI_INT("step", "repetitions", step.repetitions, 1),

      TLI_REAL("scale", "base_sensitivity", scale.base_sensitivity, positive),
      TLI_REAL("scale", "length_ratio", scale.length_ratio, positive),
      TLI_REAL("scale", "concentrator_gain", scale.concentrator_gain, positive),
      TLI_REAL("scale", "area_ratio", scale.area_ratio, positive),

      TLI_REAL("alignment", "beam_height", alignment.beam_height, positive),
      TLI_REAL("alignment", "misalignment", alignment.misalignment, non_negative),
      TLI_REAL("alignment", "c_geom", alignment.c_geom, non_negative),

      TLI_INT("kinematics", "max_order", max_order, 1),

      KeySpec{"run", "seed",
              [](RunConfig &c, std::string_view v) {
                std::uint64_t out = 0;
                const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
                if (ec != std::errc{} || ptr != v.data() + v.size())
                  throw BadValue{"malformed unsigned integer '" + std::string(v) + "'"};
                c.seed = out;
              },
              [](const RunConfig &c) { return std::to_string(c.seed); }},
      KeySpec{"run", "output",
              [](RunConfig &c, std::string_view v) { c.output = std::string(v); },
              [](const RunConfig &c) { return c.output; }},
  };
  return table;
}

#undef TLI_REAL
#undef TLI_INT
#undef TLI_BOOL

const KeySpec *find_key(std::string_view section, std::string_view name) {
  for (const auto &k : key_table())
    if (k.section == section && k.name == name)
      return &k;
  return nullptr;
}

bool known_section(std::string_view section) {
  for (const auto &k : key_table())
    if (k.section == section)
      return true;
  return false;
}

void apply(RunConfig &cfg, const KeySpec &spec, std::string_view value, int line) {
  try {
    spec.set(cfg, value);
  } catch (const BadValue &bad) {
    throw ConfigError(spec.name, line, bad.message);
  } catch (const DomainError &e) {
    throw ConfigError(spec.name, line, e.what());
  }
}

// Cross-field checks; `lines` maps a key name to the line that set it.
void validate_with_lines(const RunConfig &cfg, const std::map<std::string, int> &lines) {
  const auto fail = [&](const std::string &key, const std::string &message) {
    const auto it = lines.find(key);
    throw ConfigError(key, it == lines.end() ? 0 : it->second, message);
  };
  if (cfg.sweep.energy_max < cfg.sweep.energy_min)
    fail("energy_max", "must not be below energy_min");
  if (cfg.sweep.current_max < cfg.sweep.current_min)
    fail("current_max", "must not be below current_min");
  if (cfg.step.seconds < 2 * cfg.step.half_period)
    fail("seconds", "must cover at least one on/off cycle (2 * half_period)");
  try {
    cfg.beamline.validate();
  } catch (const DomainError &e) {
    fail("", e.what());
  }
}

} // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  std::map<std::string, int> lines;
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos)
      line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size())
        break;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("", line_no, "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section))
        throw ConfigError(section, line_no, "unknown section");
    } else {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ConfigError(std::string(line), line_no, "expected key = value");
      const std::string key(trim(line.substr(0, eq)));
      const std::string_view value = trim(line.substr(eq + 1));
      if (section.empty())
        throw ConfigError(key, line_no, "key outside of a [section]");
      const KeySpec *spec = find_key(section, key);
      if (!spec)
        throw ConfigError(key, line_no, "unknown key in [" + section + "]");
      if (value.empty() && key != "output")
        throw ConfigError(key, line_no, "missing value");
      apply(cfg, *spec, value, line_no);
      lines[key] = line_no;
    }
    if (end == text.size())
      break;
  }
  validate_with_lines(cfg, lines);
  return cfg;
}

void validate_config(const RunConfig &cfg) { validate_with_lines(cfg, {}); }

std::string serialize_config(const RunConfig &cfg) {
  std::ostringstream out;
  std::string section;
  for (const auto &k : key_table()) {
    if (k.section != section) {
      if (!section.empty())
        out << '\n';
      section = k.section;
      out << '[' << section << "]\n";
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
  return out.str();
}

void set_config_value(RunConfig &cfg, std::string_view dotted_key, std::string_view value) {
  const auto dot = dotted_key.find('.');
  if (dot == std::string_view::npos)
    throw ConfigError(std::string(dotted_key), 0, "expected section.key");
  const KeySpec *spec = find_key(dotted_key.substr(0, dot), dotted_key.substr(dot + 1));
  if (!spec)
    throw ConfigError(std::string(dotted_key), 0, "unknown key");
  apply(cfg, *spec, trim(value), 0);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const auto &k : key_table())
    out.push_back(k.section + "." + k.name);
  return out;
}

} // namespace tli

#include "tli/interferometer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "tli/parallel.hpp"

namespace tli {

namespace {

constexpr double kGunMinEv = 4.5e3;
constexpr double kGunMaxEv = 10e3;

struct Extent {
  double lo, hi;
};

// Geometric shadow of the second slit, lit from anywhere on the source slit,
// at distance z from the source plane (z >= slit separation).
Extent geometric_extent(const BeamlineConfig &cfg, double z) {
  const double z1 = cfg.slit_separation;
  const double m2 = z / z1;
  const double ms = (z - z1) / z1;
  const auto &s = cfg.source_slit;
  const auto &a = cfg.second_slit;
  return {(a.center - 0.5 * a.width) * m2 - (s.center + 0.5 * s.width) * ms,
          (a.center + 0.5 * a.width) * m2 - (s.center - 0.5 * s.width) * ms};
}

std::vector<double> source_positions(const ApertureSpec &slit, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    xs[static_cast<std::size_t>(i)] =
        slit.center - 0.5 * slit.width + (i + 0.5) * slit.width / n;
  return xs;
}

double z_g1(const BeamlineConfig &cfg) { return cfg.slit_separation + cfg.slit2_to_g1; }

void require(bool ok, const char *what) {
  if (!ok)
    throw DomainError(what);
}

// Propagation between planes on the shared grid, paraxial kernels cached.
class Legs {
public:
  Legs(const BeamlineConfig &cfg, const BeamlineLayout &layout)
      : cfg_(cfg), layout_(layout) {
    if (cfg.propagator == Propagator::paraxial) {
      to_g1_.emplace(layout.grid, layout.wavelength, cfg.slit2_to_g1, cfg.grid.pad_factor);
      gap_.emplace(layout.grid, layout.wavelength, cfg.grating_gap, cfg.grid.pad_factor);
    }
  }

  WaveFieldd to_g1(const WaveFieldd &psi, unsigned threads) const {
    return step(psi, cfg_.slit2_to_g1, to_g1_, threads);
  }
  WaveFieldd across_gap(const WaveFieldd &psi, unsigned threads) const {
    return step(psi, cfg_.grating_gap, gap_, threads);
  }

private:
  WaveFieldd step(const WaveFieldd &psi, double dz,
                  const std::optional<ParaxialPropagator<double>> &kernel,
                  unsigned threads) const {
    if (kernel)
      return (*kernel)(psi);
    PropagationOptions opts;
    opts.allow_undersampling = true; // checked once in plan_beamline
    opts.threads = threads;
    return propagate_direct(psi, PropagationPlan{dz, layout_.grid, Propagator::direct}, opts);
  }

  const BeamlineConfig &cfg_;
  const BeamlineLayout &layout_;
  std::optional<ParaxialPropagator<double>> to_g1_;
  std::optional<ParaxialPropagator<double>> gap_;
};

// Plane transmissions on the shared grid; identical for every source.
struct Planes {
  Eigen::ArrayXcd second_slit;
  Eigen::ArrayXcd g1;
  Eigen::ArrayXcd g2;
};

Planes sample_planes(const BeamlineConfig &cfg, const Grid &grid) {
  return {plane_transmission(grid, cfg.second_slit),
          plane_transmission(grid, cfg.gratings[0], cfg.phase_model, PlaneContext{0, true}),
          plane_transmission(grid, cfg.gratings[1], cfg.phase_model, PlaneContext{1, true})};
}

// Intensity just before G3 and the flux that entered G1, for one point source.
struct SourceResult {
  Eigen::ArrayXd intensity;
  double flux_at_g1;
};

SourceResult propagate_source(const BeamlineConfig &cfg, const BeamlineLayout &layout,
                              const Planes &planes, const Legs &legs, double x_source,
                              unsigned inner_threads) {
  const Grid &grid = layout.grid;
  WaveFieldd point(Grid{x_source, grid.dx, 2}, 0.0, layout.wavelength);
  point.amplitudes[0] = 1.0;

  PropagationOptions opts;
  opts.allow_undersampling = true;
  opts.threads = inner_threads;
  WaveFieldd psi = propagate_direct(
      point, PropagationPlan{cfg.slit_separation, grid, Propagator::direct}, opts);
  psi.amplitudes *= planes.second_slit;
  psi = legs.to_g1(psi, inner_threads);

  const double flux_at_g1 = psi.probability();
  if (!(flux_at_g1 > 0.0))
    throw MisconfigurationError("no flux reaches the first grating");

  psi.amplitudes *= planes.g1;
  psi = legs.across_gap(psi, inner_threads);
  psi.amplitudes *= planes.g2;
  psi = legs.across_gap(psi, inner_threads);
  return {psi.intensity(), flux_at_g1};
}

} // namespace

void BeamlineConfig::validate() const {
  particle.validate();
  require(source_slit.width > 0.0, "source slit width must be positive");
  require(second_slit.width > 0.0, "second slit width must be positive");
  require(slit_separation > 0.0, "slit separation must be positive");
  require(slit2_to_g1 > 0.0, "second slit to G1 distance must be positive");
  require(grating_gap > 0.0, "grating gap must be positive");
  for (const auto &g : gratings)
    g.validate();
  phase_model.validate();
  require(n_sources >= 1, "at least one source is required");
  require(grid.max_step > 0.0, "grid step must be positive");
  require(grid.count == 0 || grid.count >= 2, "grid count must be 0 (auto) or at least 2");
  require(grid.window_factor >= 1.0, "window factor must be at least 1");
  require(grid.diffraction_orders >= 0, "diffraction orders must be non-negative");
  require(grid.pad_factor >= 2.0, "pad factor must be at least 2");
  require(grid.sampling_margin > 0.0 && grid.sampling_margin <= 1.0,
          "sampling margin must lie in (0, 1]");
}

bool BeamlineLayout::sampling_ok() const {
  return std::all_of(legs.begin(), legs.end(),
                     [](const LegReport &l) { return l.sampling.passed; });
}

BeamlineLayout plan_beamline(const BeamlineConfig &cfg) {
  cfg.validate();
  BeamlineLayout layout;
  layout.wavelength = de_broglie_wavelength(cfg.energy, cfg.particle);
  layout.source_positions = source_positions(cfg.source_slit, cfg.n_sources);

  const double lambda = layout.wavelength;
  const Extent at_slit = geometric_extent(cfg, cfg.slit_separation);
  const Extent at_g3 = geometric_extent(cfg, z_g1(cfg) + 2.0 * cfg.grating_gap);
  const double lo = std::min(at_slit.lo, at_g3.lo);
  const double hi = std::max(at_slit.hi, at_g3.hi);
  const double diffraction =
      cfg.grid.diffraction_orders * (lambda / cfg.gratings[0].period) * 2.0 * cfg.grating_gap;
  const double window = cfg.grid.window_factor * (hi - lo) + 2.0 * diffraction;
  const double center = 0.5 * (lo + hi);

  double max_source_sep = 0.0;
  for (double xs : layout.source_positions)
    max_source_sep = std::max({max_source_sep, std::abs(center + 0.5 * window - xs),
                               std::abs(xs - (center - 0.5 * window))});
  const double need_source = lambda * cfg.slit_separation / (2.0 * max_source_sep);
  const double need_g1 = lambda * cfg.slit2_to_g1 / (2.0 * window);
  const double need_gap = lambda * cfg.grating_gap / (2.0 * window);

  Index count;
  double dx;
  if (cfg.grid.count > 0) {
    count = cfg.grid.count;
    dx = window / static_cast<double>(count - 1);
  } else {
    const double period = cfg.gratings[0].period;
    const double raw = std::min(cfg.grid.max_step,
                                cfg.grid.sampling_margin * std::min({need_source, need_g1, need_gap}));
    // A whole number of samples per grating period and an odd count: every G1
    // window then holds the same number of open samples.
    dx = period / std::ceil(period / raw);
    count = static_cast<Index>(std::ceil(window / dx)) + 1;
    count += 1 - count % 2;
  }
  // Lattice phase: samples on G1's window centers or halfway between, whichever
  // puts the sampled window width closer to f d.
  const GratingSpec &g1 = cfg.gratings[0];
  const double cells = g1.open_fraction * g1.period / dx;
  const double on_center = 2.0 * std::floor(0.5 * cells + 1e-9) + 1.0;
  const double between = 2.0 * std::floor(0.5 * cells + 0.5 + 1e-9);
  const double anchor =
      g1.offset + (std::abs(between - cells) < std::abs(on_center - cells) ? 0.5 * dx : 0.0);
  layout.grid = Grid::centered(anchor + std::round((center - anchor) / dx) * dx, dx, count);

  const Grid &g = layout.grid;
  double worst_source = 0.0;
  SamplingReport source_report;
  for (double xs : layout.source_positions) {
    const SamplingReport r =
        sampling_check(Grid{xs, g.dx, 2}, g, lambda, cfg.slit_separation);
    if (r.max_separation >= worst_source) {
      worst_source = r.max_separation;
      source_report = r;
    }
  }
  layout.legs = {
      {"source->slit2", cfg.slit_separation, source_report},
      {"slit2->G1", cfg.slit2_to_g1, sampling_check(g, g, lambda, cfg.slit2_to_g1)},
      {"G1->G2", cfg.grating_gap, sampling_check(g, g, lambda, cfg.grating_gap)},
      {"G2->G3", cfg.grating_gap, sampling_check(g, g, lambda, cfg.grating_gap)},
  };
  return layout;
}

void FringeCurve::validate() const {
  if (offsets.empty() || offsets.size() != throughput.size())
    throw ContractError("fringe curve needs equal, non-empty offset and throughput arrays");
  if (!(period > 0.0))
    throw ContractError("fringe curve period must be positive");
  for (std::size_t i = 0; i < throughput.size(); ++i) {
    if (!(throughput[i] >= 0.0) || !std::isfinite(throughput[i]))
      throw ContractError("fringe throughput must be finite and non-negative");
    if (i > 0 && !(offsets[i] > offsets[i - 1]))
      throw ContractError("fringe offsets must increase monotonically");
  }
}

std::vector<double> simulate_throughput(const BeamlineConfig &cfg,
                                        std::span<const double> g3_offsets) {
  const BeamlineLayout layout = plan_beamline(cfg);
  if (!cfg.allow_undersampling) {
    for (const auto &leg : layout.legs)
      if (!leg.sampling.passed)
        detail::enforce_sampling(leg.sampling, PropagationOptions{}, leg.name.c_str());
  }

  std::vector<Eigen::ArrayXd> masks;
  masks.reserve(g3_offsets.size());
  for (double offset : g3_offsets)
    masks.push_back(open_coverage(layout.grid, translate_grating(cfg.gratings[2], offset)));

  const Legs legs(cfg, layout);
  const Planes planes = sample_planes(cfg, layout.grid);
  const std::size_t n_src = layout.source_positions.size();
  const unsigned threads = cfg.threads ? cfg.threads : default_thread_count();
  const unsigned outer = std::min<unsigned>(threads, static_cast<unsigned>(n_src));
  const unsigned inner = std::max(1u, threads / std::max(1u, outer));

  std::vector<std::vector<double>> per_source(n_src);
  parallel_for(n_src, outer, [&](std::size_t s) {
    const SourceResult r =
        propagate_source(cfg, layout, planes, legs, layout.source_positions[s], inner);
    std::vector<double> t(masks.size());
    for (std::size_t k = 0; k < masks.size(); ++k)
      t[k] = (masks[k] * r.intensity).sum() * layout.grid.dx / r.flux_at_g1;
    per_source[s] = std::move(t);
  });

  // fixed-order reduction
  std::vector<double> total(g3_offsets.size(), 0.0);
  for (const auto &t : per_source)
    for (std::size_t k = 0; k < t.size(); ++k)
      total[k] += t[k];
  for (double &v : total)
    v /= static_cast<double>(n_src);
  return total;
}

double simulate_throughput(const BeamlineConfig &cfg, double g3_offset) {
  const double offsets[] = {g3_offset};
  return simulate_throughput(cfg, offsets).front();
}

FringeCurve scan_fringe(const BeamlineConfig &cfg, int n_offsets) {
  if (n_offsets < 8)
    throw DomainError("a fringe scan needs at least 8 offsets");
  FringeCurve curve;
  curve.period = cfg.gratings[2].period;
  curve.offsets.resize(static_cast<std::size_t>(n_offsets));
  for (int k = 0; k < n_offsets; ++k)
    curve.offsets[static_cast<std::size_t>(k)] = curve.period * k / n_offsets;
  curve.throughput = simulate_throughput(cfg, curve.offsets);
  return curve;
}

double contrast(std::span<const double> throughput) {
  if (throughput.empty())
    throw DomainError("contrast of an empty curve is undefined");
  const auto [mn, mx] = std::minmax_element(throughput.begin(), throughput.end());
  if (*mn < 0.0)
    throw DomainError("throughput must be non-negative");
  if (!(*mx > 0.0))
    throw DomainError("contrast of an all-zero curve is undefined");
  return (*mx - *mn) / (*mx + *mn);
}

double contrast(const FringeCurve &curve) { return contrast(curve.throughput); }

std::vector<ContrastPoint> sweep_energy(const BeamlineConfig &cfg,
                                        std::span<const double> energies_ev,
                                        const SweepOptions &options) {
  std::vector<ContrastPoint> out;
  out.reserve(energies_ev.size());
  for (double e : energies_ev) {
    if (!options.allow_out_of_range && (e < kGunMinEv || e > kGunMaxEv))
      throw DomainError("sweep energy outside the 4.5-10 keV gun range");
    BeamlineConfig at = cfg;
    at.energy = BeamEnergy(e);
    out.push_back({e, contrast(scan_fringe(at, options.n_offsets))});
  }
  return out;
}

std::vector<double> contrast_peaks(std::span<const ContrastPoint> sweep, double level) {
  if (sweep.empty())
    return {};
  if (!(level > 0.0 && level < 1.0))
    throw DomainError("lobe level must lie in (0, 1)");
  double top = 0.0;
  for (const auto &p : sweep)
    top = std::max(top, p.contrast);
  const double threshold = level * top;

  std::vector<double> peaks;
  double weight = 0.0, moment = 0.0;
  auto close_lobe = [&] {
    if (weight > 0.0)
      peaks.push_back(moment / weight);
    weight = moment = 0.0;
  };
  for (const auto &p : sweep) {
    if (p.contrast >= threshold) {
      const double w = p.contrast - threshold;
      weight += w;
      moment += w * p.energy_ev;
    } else {
      close_lobe();
    }
  }
  close_lobe();
  return peaks;
}

double misalignment_factor(double beam_height, double misalignment, double period,
                           double c_geom) {
  require(beam_height > 0.0, "beam height must be positive");
  require(period > 0.0, "grating period must be positive");
  require(misalignment >= 0.0, "misalignment must be non-negative");
  require(c_geom >= 0.0, "geometric constant must be non-negative");
  const double u = std::numbers::pi * c_geom * misalignment * beam_height / period;
  if (u == 0.0)
    return 1.0;
  return std::abs(std::sin(u) / u);
}

} // namespace tli

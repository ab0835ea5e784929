#include "tli/optics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tli/errors.hpp"

namespace tli {

namespace {

// Edge tolerance in units of the period, so boundary samples resolve to open
// regardless of rounding in (x - offset) / d.
constexpr double kEdgeTolerance = 1e-9;

struct SlitPosition {
  std::int64_t index;
  double distance_from_center; // |x - center_n| in meters
};

SlitPosition locate(double x, const GratingSpec &g) {
  const double u = (x - g.offset) / g.period;
  const double n = std::round(u);
  return {static_cast<std::int64_t>(n), std::abs(u - n) * g.period};
}

bool on_membrane(double x, const GratingSpec &g) {
  return std::abs(x - g.offset) <= 0.5 * g.extent * (1.0 + kEdgeTolerance);
}

std::pair<double, double> support(const PlaneElement &element) {
  if (const auto *a = std::get_if<ApertureSpec>(&element))
    return {a->center - 0.5 * a->width, a->center + 0.5 * a->width};
  const auto &g = std::get<GratingSpec>(element);
  return {g.offset - 0.5 * g.extent, g.offset + 0.5 * g.extent};
}

void check_overlap(const Grid &grid, const PlaneElement &element) {
  const auto [lo, hi] = support(element);
  if (hi < grid.x_start || lo > grid.x_end())
    throw ContractError("optical element does not overlap the sampling grid");
}

} // namespace

void GratingSpec::validate() const {
  if (!(period > 0.0) || !std::isfinite(period))
    throw DomainError("grating period must be positive");
  if (!(open_fraction > 0.0 && open_fraction < 1.0))
    throw DomainError("grating open fraction must lie in (0, 1)");
  if (!(extent > 0.0))
    throw DomainError("grating extent must be positive");
  if (!std::isfinite(offset))
    throw DomainError("grating offset must be finite");
}

void PhaseModel::validate() const {
  if (!(image_charge_strength >= 0.0) || !(random_phase_max >= 0.0))
    throw DomainError("phase model strengths must be non-negative");
  if (!(image_charge_range > 0.0))
    throw DomainError("image charge range must be positive");
}

double grating_amplitude(double x, const GratingSpec &g) {
  if (!on_membrane(x, g))
    return 0.0;
  const SlitPosition s = locate(x, g);
  return s.distance_from_center <= (0.5 * g.open_fraction + kEdgeTolerance) * g.period ? 1.0
                                                                                      : 0.0;
}

double aperture_amplitude(double x, const ApertureSpec &a) {
  return std::abs(x - a.center) <= 0.5 * a.width * (1.0 + kEdgeTolerance) ? 1.0 : 0.0;
}

std::int64_t slit_index(double x, const GratingSpec &g) { return locate(x, g).index; }

double random_slit_phase(const PhaseModel &model, int plane_index, std::int64_t slit) {
  if (model.random_phase_max == 0.0)
    return 0.0;
  const auto s = static_cast<std::uint64_t>(slit);
  std::seed_seq seq{static_cast<std::uint32_t>(model.rng_seed),
                    static_cast<std::uint32_t>(model.rng_seed >> 32),
                    static_cast<std::uint32_t>(plane_index), static_cast<std::uint32_t>(s),
                    static_cast<std::uint32_t>(s >> 32)};
  std::mt19937_64 engine(seq);
  return model.random_phase_max * std::generate_canonical<double, 53>(engine);
}

double grating_phase(double x, const GratingSpec &g, const PhaseModel &model, PlaneContext plane) {
  const SlitPosition s = locate(x, g);
  double phase = 0.0;
  if (model.image_charge_strength > 0.0) {
    const double to_wall = std::max(0.0, 0.5 * g.open_fraction * g.period - s.distance_from_center);
    phase += model.image_charge_strength / model.image_charge_range *
             std::exp(-to_wall / model.image_charge_range);
  }
  if (plane.random_phase)
    phase += random_slit_phase(model, plane.plane_index, s.index);
  return phase;
}

GratingSpec translate_grating(GratingSpec g, double delta) {
  g.offset += delta;
  return g;
}

Eigen::ArrayXd amplitude_mask(const Grid &grid, const PlaneElement &element) {
  grid.validate();
  check_overlap(grid, element);
  Eigen::ArrayXd mask(grid.count);
  if (const auto *a = std::get_if<ApertureSpec>(&element)) {
    if (!(a->width > 0.0))
      throw DomainError("aperture width must be positive");
    for (Index i = 0; i < grid.count; ++i)
      mask[i] = aperture_amplitude(grid.x(i), *a);
  } else {
    const auto &g = std::get<GratingSpec>(element);
    g.validate();
    for (Index i = 0; i < grid.count; ++i)
      mask[i] = grating_amplitude(grid.x(i), g);
  }
  return mask;
}

Eigen::ArrayXd open_coverage(const Grid &grid, const PlaneElement &element) {
  grid.validate();
  check_overlap(grid, element);
  const auto overlap = [](double a, double b, double lo, double hi) {
    return std::max(0.0, std::min(b, hi) - std::max(a, lo));
  };
  Eigen::ArrayXd cover(grid.count);
  const double h = 0.5 * grid.dx;
  if (const auto *a = std::get_if<ApertureSpec>(&element)) {
    if (!(a->width > 0.0))
      throw DomainError("aperture width must be positive");
    for (Index i = 0; i < grid.count; ++i)
      cover[i] = overlap(grid.x(i) - h, grid.x(i) + h, a->center - 0.5 * a->width,
                         a->center + 0.5 * a->width) / grid.dx;
    return cover;
  }
  const auto &g = std::get<GratingSpec>(element);
  g.validate();
  const double half_open = 0.5 * g.open_fraction * g.period;
  const double mem_lo = g.offset - 0.5 * g.extent, mem_hi = g.offset + 0.5 * g.extent;
  for (Index i = 0; i < grid.count; ++i) {
    const double lo = std::max(grid.x(i) - h, mem_lo);
    const double hi = std::min(grid.x(i) + h, mem_hi);
    double open = 0.0;
    if (hi > lo) {
      const auto first = static_cast<std::int64_t>(std::floor((lo - g.offset - half_open) / g.period));
      const auto last = static_cast<std::int64_t>(std::ceil((hi - g.offset + half_open) / g.period));
      for (std::int64_t n = first; n <= last; ++n) {
        const double c = g.offset + static_cast<double>(n) * g.period;
        open += overlap(lo, hi, c - half_open, c + half_open);
      }
    }
    cover[i] = open / grid.dx;
  }
  return cover;
}

Eigen::ArrayXcd plane_transmission(const Grid &grid, const PlaneElement &element,
                                   const PhaseModel &model, PlaneContext plane) {
  const Eigen::ArrayXd mask = amplitude_mask(grid, element);
  Eigen::ArrayXcd t = mask.cast<std::complex<double>>();
  const auto *g = std::get_if<GratingSpec>(&element);
  if (!g)
    return t;
  model.validate();
  const bool with_random = plane.random_phase && model.random_phase_max > 0.0;
  if (model.image_charge_strength == 0.0 && !with_random)
    return t;

  // One draw per slit; slits are contiguous along the grid.
  std::int64_t cached_slit = 0;
  double cached_random = 0.0;
  bool have_cache = false;
  PhaseModel image_only = model;
  image_only.random_phase_max = 0.0;
  for (Index i = 0; i < grid.count; ++i) {
    if (mask[i] == 0.0)
      continue;
    const double x = grid.x(i);
    double phase = grating_phase(x, *g, image_only, PlaneContext{plane.plane_index, false});
    if (with_random) {
      const std::int64_t n = slit_index(x, *g);
      if (!have_cache || n != cached_slit) {
        cached_slit = n;
        cached_random = random_slit_phase(model, plane.plane_index, n);
        have_cache = true;
      }
      phase += cached_random;
    }
    t[i] = std::polar(1.0, phase);
  }
  return t;
}

} // namespace tli

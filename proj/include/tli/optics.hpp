#ifndef TLI_OPTICS_HPP
#define TLI_OPTICS_HPP

#include <cstdint>
#include <variant>

#include <Eigen/Dense>

#include "tli/wave_field.hpp"

namespace tli {

/// Single slit of full width `width` centered at `center`.
struct ApertureSpec {
  double width = 5e-6;
  double center = 0.0;

  friend bool operator==(const ApertureSpec &, const ApertureSpec &) = default;
};

/// Binary transmission grating. Slit n is open on
/// [n d + offset - f d / 2, n d + offset + f d / 2]; outside the membrane
/// (|x - offset| > extent / 2) nothing is transmitted.
struct GratingSpec {
  double period = 100e-9;
  double open_fraction = 0.35;
  double offset = 0.0;
  double extent = 1e-3;

  void validate() const;
  friend bool operator==(const GratingSpec &, const GratingSpec &) = default;
};

/// Phenomenological phase at grating planes. Both terms default to off.
struct PhaseModel {
  double image_charge_strength = 0.0; // rad m; phase at the bar wall is strength / range
  double image_charge_range = 20e-9;  // m
  double random_phase_max = 0.0;      // rad; per-slit uniform draw in [0, max]
  std::uint64_t rng_seed = 0;

  void validate() const;
  friend bool operator==(const PhaseModel &, const PhaseModel &) = default;
};

/// Where a plane sits in the beamline. Random phases are drawn per
/// (seed, plane_index, slit index) and only when `random_phase` is set.
struct PlaneContext {
  int plane_index = 0;
  bool random_phase = false;
};

using PlaneElement = std::variant<ApertureSpec, GratingSpec>;

/// 1 inside an open window (edges count as open), 0 on a bar.
double grating_amplitude(double x, const GratingSpec &g);
double aperture_amplitude(double x, const ApertureSpec &a);

/// Index n of the slit whose center n d + offset is nearest to x.
std::int64_t slit_index(double x, const GratingSpec &g);

/// Phase added inside open windows: image-charge term plus the slit's random draw.
double grating_phase(double x, const GratingSpec &g, const PhaseModel &model, PlaneContext plane);

double random_slit_phase(const PhaseModel &model, int plane_index, std::int64_t slit);

GratingSpec translate_grating(GratingSpec g, double delta);

/// A(x) sampled on the grid. Throws ContractError if the element and grid do not overlap.
Eigen::ArrayXd amplitude_mask(const Grid &grid, const PlaneElement &element);

/// Open fraction of each cell [x_i - dx/2, x_i + dx/2]; for integrating an
/// intensity behind the element rather than modulating an amplitude.
Eigen::ArrayXd open_coverage(const Grid &grid, const PlaneElement &element);

/// A(x) exp(i phi(x)) sampled on the grid.
Eigen::ArrayXcd plane_transmission(const Grid &grid, const PlaneElement &element,
                                   const PhaseModel &model = {}, PlaneContext plane = {});

/// psi_out(x) = A(x) exp(i phi(x)) psi_in(x).
template <typename Scalar>
WaveField<Scalar> apply_plane(const WaveField<Scalar> &in, const PlaneElement &element,
                              const PhaseModel &model = {}, PlaneContext plane = {}) {
  in.validate();
  WaveField<Scalar> out = in;
  out.amplitudes *= plane_transmission(in.grid, element, model, plane)
                        .template cast<typename WaveField<Scalar>::Complex>();
  return out;
}

} // namespace tli

#endif // TLI_OPTICS_HPP

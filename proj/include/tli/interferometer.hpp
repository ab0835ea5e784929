#ifndef TLI_INTERFEROMETER_HPP
#define TLI_INTERFEROMETER_HPP

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tli/kinematics.hpp"
#include "tli/optics.hpp"
#include "tli/propagation.hpp"

namespace tli {

/// Transverse sampling of the beamline. One grid is shared by the second slit
/// and the three grating planes.
struct GridSettings {
  double max_step = 1e-9;       // m; upper bound on dx
  Index count = 0;              // 0: choose dx automatically from the sampling criterion
  double window_factor = 1.5;   // times the geometrically illuminated span
  int diffraction_orders = 3;   // extra margin for this many grating orders over G1->G3
  double pad_factor = 2.0;      // paraxial zero-padding
  double sampling_margin = 0.9; // auto dx = margin * tightest required dx

  friend bool operator==(const GridSettings &, const GridSettings &) = default;
};

/// Source slit -> second slit -> G1 -> G2 -> G3, with incoherent point
/// sources spread uniformly across the source slit.
struct BeamlineConfig {
  ParticleSpec particle = ParticleSpec::electron();
  ApertureSpec source_slit{5e-6, 0.0};
  ApertureSpec second_slit{2e-6, 0.0};
  double slit_separation = 0.24;
  double slit2_to_g1 = 0.05;
  double grating_gap = 3.06e-3;
  std::array<GratingSpec, 3> gratings{};
  PhaseModel phase_model{};
  BeamEnergy energy{10e3};
  int n_sources = 32;
  Propagator propagator = Propagator::paraxial;
  GridSettings grid{};
  bool allow_undersampling = false;
  unsigned threads = 0; // 0: hardware concurrency

  void validate() const;
  friend bool operator==(const BeamlineConfig &, const BeamlineConfig &) = default;
};

struct LegReport {
  std::string name;
  double delta_z;
  SamplingReport sampling;
};

struct BeamlineLayout {
  Grid grid;
  double wavelength = 0.0;
  std::vector<double> source_positions;
  std::vector<LegReport> legs;

  bool sampling_ok() const;
};

/// Chooses the shared grid and evaluates the sampling criterion on every leg.
BeamlineLayout plan_beamline(const BeamlineConfig &cfg);

/// Throughput against lateral G3 offset over one grating period.
struct FringeCurve {
  std::vector<double> offsets;
  std::vector<double> throughput;
  double period = 0.0;

  void validate() const;
};

/// Mean over point sources of (flux after the G3 mask) / (flux reaching G1).
/// `g3_offset` is added to gratings[2].offset. The flux behind G3 weights each
/// cell by its open fraction, so the scan has no sub-sample aliasing.
/// Throws SamplingError when a leg is undersampled (unless allowed) and
/// MisconfigurationError when no flux reaches G1.
double simulate_throughput(const BeamlineConfig &cfg, double g3_offset);

/// Same, for many G3 offsets sharing one propagation per source.
std::vector<double> simulate_throughput(const BeamlineConfig &cfg,
                                        std::span<const double> g3_offsets);

/// n_offsets (>= 8) uniform G3 offsets over [0, d).
FringeCurve scan_fringe(const BeamlineConfig &cfg, int n_offsets = 16);

/// (max - min) / (max + min). Throws DomainError for empty, negative or all-zero input.
double contrast(std::span<const double> throughput);
double contrast(const FringeCurve &curve);

struct ContrastPoint {
  double energy_ev;
  double contrast;
};

struct SweepOptions {
  int n_offsets = 16;
  bool allow_out_of_range = false; // energies outside the 4.5-10 keV gun range
};

std::vector<ContrastPoint> sweep_energy(const BeamlineConfig &cfg,
                                        std::span<const double> energies_ev,
                                        const SweepOptions &options = {});

/// Centers of the contrast lobes of a sweep. A lobe is a maximal run of
/// consecutive points at or above `level` times the sweep's maximum; its
/// center is the mean energy weighted by contrast above that threshold.
std::vector<double> contrast_peaks(std::span<const ContrastPoint> sweep, double level = 0.5);

/// Contrast multiplier for gratings rotated by `misalignment` relative to each
/// other over a beam of height `beam_height`: |sinc(pi c_geom alpha h / d)|.
double misalignment_factor(double beam_height, double misalignment, double period,
                           double c_geom = 2.0);

} // namespace tli

#endif // TLI_INTERFEROMETER_HPP

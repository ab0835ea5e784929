#ifndef TLI_FIELD_SENSING_HPP
#define TLI_FIELD_SENSING_HPP

#include <cstdint>
#include <vector>

#include "tli/interferometer.hpp"
#include "tli/kinematics.hpp"

namespace tli {

/// Wire run along the edges of a cube of edge length w. `efficiency` scales
/// the center field for an off-center or non-cubic cradle (1 = ideal). It is
/// only required to be positive: the measured 71 mA period needs about 1.48.
struct CradleSpec {
  double edge_length = 54e-3;
  double current = 0.0;
  double efficiency = 1.0;

  friend bool operator==(const CradleSpec &, const CradleSpec &) = default;
};

/// Uniform field B over a length L of the beam path. The default length is
/// the G1->G3 distance.
struct FieldRegion {
  double field = 0.0;
  double length = 6.12e-3;
};

struct SensorReport {
  double slope;       // counts s^-1 T^-1
  double count_rate;  // counts s^-1
  double sensitivity; // T Hz^-1/2
};

/// B = efficiency * (4 / sqrt 3) * mu0 I / (pi w).
double cradle_field(const CradleSpec &cradle);

/// Impulse-approximation deflection s = q B L^2 / (2 sqrt(2 m E)),
/// nonrelativistic. Signed with q B.
double classical_deflection(const FieldRegion &region, BeamEnergy energy,
                            const ParticleSpec &particle = ParticleSpec::electron());

/// Field that deflects the beam by `deflection` over `length` (inverse of the above, |q|).
double field_for_deflection(double deflection, double length, BeamEnergy energy,
                            const ParticleSpec &particle = ParticleSpec::electron());

/// Field for one fringe period of classical deflection: B_d = 2 d sqrt(2 m E) / (|q| L^2).
double fringe_period_field(double period, double length, BeamEnergy energy,
                           const ParticleSpec &particle = ParticleSpec::electron());

/// Enclosed-flux phase (|q| / hbar) B L^2 sin(theta), sin(theta) = lambda / d.
/// About half the field of the classical estimate gives a full 2 pi, the two
/// approximations are not reconciled here.
double ab_phase(double field, double length, double wavelength, double period,
                const ParticleSpec &particle = ParticleSpec::electron());

/// Fringe curve sampled at (classical deflection + bias) modulo d, linear
/// interpolation with periodic wrap.
double predict_throughput(const FringeCurve &curve, const FieldRegion &region, BeamEnergy energy,
                          const ParticleSpec &particle = ParticleSpec::electron(),
                          double bias_offset = 0.0);

/// Interpolated throughput at an arbitrary offset (periodic in curve.period).
/// Samples spread uniformly over one period get the trigonometric interpolant,
/// so the slope is smooth at the operating point; other layouts fall back to
/// linear interpolation.
double interpolate_fringe(const FringeCurve &curve, double offset);

/// Offset on a rising edge where the interpolated curve crosses (max + min) / 2.
double half_fringe_offset(const FringeCurve &curve);

/// Poisson-limited field resolution in one second: sqrt(R) / |dS/dB|.
double shot_noise_sensitivity(double count_rate, double slope);

/// Count rate and slope at the operating point, for counts = rate_scale * throughput.
SensorReport analyze_operating_point(const FringeCurve &curve, double bias_offset,
                                     double rate_scale, double field_length, BeamEnergy energy,
                                     const ParticleSpec &particle = ParticleSpec::electron());

struct StepSample {
  int t;         // s
  bool field_on;
  double counts; // counts in this second
};

struct StepProtocol {
  double field_step = 43e-9; // T
  double field_length = 6.12e-3;
  int seconds = 20;
  int half_period = 10;      // seconds on, then seconds off
  std::uint64_t seed = 1;
};

/// Per-second Poisson counts around rate_scale * predicted throughput,
/// with the field on for the first half_period seconds of each cycle.
std::vector<StepSample> simulate_step_response(const FringeCurve &curve, double bias_offset,
                                               double rate_scale, BeamEnergy energy,
                                               const StepProtocol &protocol,
                                               const ParticleSpec &particle = ParticleSpec::electron());

/// |mean_on - mean_off| / pooled per-second standard deviation.
double step_snr(const std::vector<StepSample> &series);

/// rate_scale giving expected single-second SNR `target_snr` for the step:
/// (target * sqrt(T_off) / |T_on - T_off|)^2.
double rate_for_snr(const FringeCurve &curve, double bias_offset, BeamEnergy energy,
                    const StepProtocol &protocol, double target_snr,
                    const ParticleSpec &particle = ParticleSpec::electron());

/// base / (length_ratio^2 * concentrator_gain * sqrt(area_ratio)).
double scaled_sensitivity(double base, double length_ratio, double concentrator_gain,
                          double area_ratio);

} // namespace tli

#endif // TLI_FIELD_SENSING_HPP

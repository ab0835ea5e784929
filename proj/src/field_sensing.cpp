#include "tli/field_sensing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tli/constants.hpp"
#include "tli/errors.hpp"

namespace tli {

namespace {

void require(bool ok, const char *what) {
  if (!ok)
    throw DomainError(what);
}

double momentum_nonrelativistic(BeamEnergy energy, const ParticleSpec &particle) {
  return std::sqrt(2.0 * particle.mass * energy.joules());
}

double wrap(double offset, double period) {
  double r = std::fmod(offset, period);
  if (r < 0.0)
    r += period;
  return r;
}

} // namespace

double cradle_field(const CradleSpec &cradle) {
  require(cradle.edge_length > 0.0, "cradle edge length must be positive");
  require(cradle.efficiency > 0.0, "cradle efficiency must be positive");
  return cradle.efficiency * (4.0 / std::sqrt(3.0)) * constants::vacuum_permeability *
         cradle.current / (std::numbers::pi * cradle.edge_length);
}

double classical_deflection(const FieldRegion &region, BeamEnergy energy,
                            const ParticleSpec &particle) {
  require(region.length > 0.0, "field region length must be positive");
  return particle.charge * region.field * region.length * region.length /
         (2.0 * momentum_nonrelativistic(energy, particle));
}

double field_for_deflection(double deflection, double length, BeamEnergy energy,
                            const ParticleSpec &particle) {
  require(length > 0.0, "field region length must be positive");
  require(particle.charge != 0.0, "deflection needs a charged particle");
  return 2.0 * deflection * momentum_nonrelativistic(energy, particle) /
         (std::abs(particle.charge) * length * length);
}

double fringe_period_field(double period, double length, BeamEnergy energy,
                           const ParticleSpec &particle) {
  require(period > 0.0, "grating period must be positive");
  return field_for_deflection(period, length, energy, particle);
}

double ab_phase(double field, double length, double wavelength, double period,
                const ParticleSpec &particle) {
  require(length > 0.0 && wavelength > 0.0 && period > 0.0,
          "length, wavelength and period must be positive");
  return std::abs(particle.charge) / constants::hbar * field * length * length *
         (wavelength / period);
}

namespace {

// True when offsets are o0 + k d / n, k = 0..n-1: one period sampled uniformly.
bool uniform_over_period(const FringeCurve &curve) {
  const std::size_t n = curve.offsets.size();
  const double step = curve.period / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k)
    if (std::abs(curve.offsets[k] - curve.offsets[0] - k * step) > 1e-9 * curve.period)
      return false;
  return true;
}

// Band-limited periodic interpolant through n uniform samples. An even n
// splits the Nyquist term into a cosine so the result stays real.
double trigonometric(const FringeCurve &curve, double x) {
  const std::size_t n = curve.offsets.size();
  const double u = 2.0 * std::numbers::pi * (x - curve.offsets[0]) / curve.period;
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double a = step * static_cast<double>(k * j % n);
      re += curve.throughput[j] * std::cos(a);
      im -= curve.throughput[j] * std::sin(a);
    }
    const double weight = k == 0 || 2 * k == n ? 1.0 : 2.0;
    sum += weight * (re * std::cos(k * u) - im * std::sin(k * u));
  }
  return std::max(0.0, sum / static_cast<double>(n));
}

double linear(const FringeCurve &curve, double x) {
  const double d = curve.period;
  const auto &o = curve.offsets;
  const auto &t = curve.throughput;
  const std::size_t n = o.size();
  // Bracket x between consecutive samples, wrapping last -> first + d.
  const auto it = std::upper_bound(o.begin(), o.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - o.begin());
  double x0, x1, y0, y1;
  if (hi == 0) {
    x0 = o[n - 1] - d, y0 = t[n - 1];
    x1 = o[0], y1 = t[0];
  } else if (hi == n) {
    x0 = o[n - 1], y0 = t[n - 1];
    x1 = o[0] + d, y1 = t[0];
  } else {
    x0 = o[hi - 1], y0 = t[hi - 1];
    x1 = o[hi], y1 = t[hi];
  }
  const double w = (x - x0) / (x1 - x0);
  return y0 + w * (y1 - y0);
}

} // namespace

double interpolate_fringe(const FringeCurve &curve, double offset) {
  curve.validate();
  if (curve.offsets.size() == 1)
    return curve.throughput[0];
  const double x = wrap(offset, curve.period);
  return uniform_over_period(curve) ? trigonometric(curve, x) : linear(curve, x);
}

double predict_throughput(const FringeCurve &curve, const FieldRegion &region, BeamEnergy energy,
                          const ParticleSpec &particle, double bias_offset) {
  return interpolate_fringe(curve,
                            classical_deflection(region, energy, particle) + bias_offset);
}

double half_fringe_offset(const FringeCurve &curve) {
  curve.validate();
  const auto [mn, mx] = std::minmax_element(curve.throughput.begin(), curve.throughput.end());
  const double mid = 0.5 * (*mn + *mx);
  const std::size_t n = curve.offsets.size();
  double best = curve.offsets[0];
  double best_slope = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double x0 = curve.offsets[i];
    const double x1 = j == 0 ? curve.offsets[0] + curve.period : curve.offsets[j];
    const double y0 = curve.throughput[i];
    const double y1 = curve.throughput[j];
    if (y0 <= mid && y1 > mid) {
      const double slope = (y1 - y0) / (x1 - x0);
      if (slope > best_slope) {
        best_slope = slope;
        // the interpolant need not be linear between samples
        double lo = x0, hi = x1;
        for (int it = 0; it < 60; ++it) {
          const double m = 0.5 * (lo + hi);
          (interpolate_fringe(curve, m) <= mid ? lo : hi) = m;
        }
        best = wrap(0.5 * (lo + hi), curve.period);
      }
    }
  }
  if (best_slope < 0.0)
    throw DomainError("fringe curve has no rising mid-level crossing");
  return best;
}

double shot_noise_sensitivity(double count_rate, double slope) {
  require(count_rate > 0.0, "count rate must be positive");
  require(slope != 0.0, "sensitivity is undefined for zero slope");
  return std::sqrt(count_rate) / std::abs(slope);
}

SensorReport analyze_operating_point(const FringeCurve &curve, double bias_offset,
                                     double rate_scale, double field_length, BeamEnergy energy,
                                     const ParticleSpec &particle) {
  require(rate_scale > 0.0, "rate scale must be positive");
  // Central difference over a small fraction of one fringe period in B.
  const double period_field = fringe_period_field(curve.period, field_length, energy, particle);
  const double h = 1e-4 * period_field;
  const auto at = [&](double b) {
    return rate_scale * predict_throughput(curve, FieldRegion{b, field_length}, energy, particle,
                                           bias_offset);
  };
  SensorReport r;
  r.count_rate = at(0.0);
  r.slope = (at(h) - at(-h)) / (2.0 * h);
  r.sensitivity = shot_noise_sensitivity(r.count_rate, r.slope);
  return r;
}

std::vector<StepSample> simulate_step_response(const FringeCurve &curve, double bias_offset,
                                               double rate_scale, BeamEnergy energy,
                                               const StepProtocol &protocol,
                                               const ParticleSpec &particle) {
  require(rate_scale > 0.0, "rate scale must be positive");
  require(protocol.seconds >= 1 && protocol.half_period >= 1,
          "step protocol needs positive durations");
  const double on = rate_scale * predict_throughput(
                                     curve, FieldRegion{protocol.field_step, protocol.field_length},
                                     energy, particle, bias_offset);
  const double off = rate_scale * predict_throughput(curve, FieldRegion{0.0, protocol.field_length},
                                                     energy, particle, bias_offset);
  std::mt19937_64 engine(protocol.seed);
  std::vector<StepSample> series;
  series.reserve(static_cast<std::size_t>(protocol.seconds));
  for (int t = 0; t < protocol.seconds; ++t) {
    const bool field_on = (t / protocol.half_period) % 2 == 0;
    std::poisson_distribution<long long> counts(field_on ? on : off);
    series.push_back({t, field_on, static_cast<double>(counts(engine))});
  }
  return series;
}

double step_snr(const std::vector<StepSample> &series) {
  double sum_on = 0, sum_off = 0;
  int n_on = 0, n_off = 0;
  for (const auto &s : series) {
    (s.field_on ? sum_on : sum_off) += s.counts;
    ++(s.field_on ? n_on : n_off);
  }
  require(n_on >= 2 && n_off >= 2, "SNR needs at least two seconds on and off");
  const double mean_on = sum_on / n_on;
  const double mean_off = sum_off / n_off;
  double ss = 0.0;
  for (const auto &s : series) {
    const double r = s.counts - (s.field_on ? mean_on : mean_off);
    ss += r * r;
  }
  const double sd = std::sqrt(ss / (n_on + n_off - 2));
  require(sd > 0.0, "SNR is undefined for noiseless counts");
  return std::abs(mean_on - mean_off) / sd;
}

double rate_for_snr(const FringeCurve &curve, double bias_offset, BeamEnergy energy,
                    const StepProtocol &protocol, double target_snr,
                    const ParticleSpec &particle) {
  require(target_snr > 0.0, "target SNR must be positive");
  const double on = predict_throughput(
      curve, FieldRegion{protocol.field_step, protocol.field_length}, energy, particle, bias_offset);
  const double off = predict_throughput(curve, FieldRegion{0.0, protocol.field_length}, energy,
                                        particle, bias_offset);
  require(on != off, "field step does not change the throughput");
  require(off > 0.0, "operating point has zero throughput");
  const double root = target_snr * std::sqrt(off) / std::abs(on - off);
  return root * root;
}

double scaled_sensitivity(double base, double length_ratio, double concentrator_gain,
                          double area_ratio) {
  require(base > 0.0, "base sensitivity must be positive");
  require(length_ratio > 0.0 && concentrator_gain > 0.0 && area_ratio > 0.0,
          "scaling ratios must be positive");
  return base / (length_ratio * length_ratio * concentrator_gain * std::sqrt(area_ratio));
}

} // namespace tli

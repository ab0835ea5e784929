#include "tli/kinematics.hpp"

#include <cmath>
#include <string>

#include "tli/constants.hpp"
#include "tli/errors.hpp"

namespace tli {

namespace {

constexpr double kMinEnergyEv = 1.0;
constexpr double kMaxEnergyEv = 1.0e6;
constexpr double kBisectionRelTol = 1e-10;

void require_positive(double value, const char *name) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw DomainError(std::string(name) + " must be positive and finite");
}

} // namespace

ParticleSpec ParticleSpec::electron() {
  return from_mass(-constants::elementary_charge, constants::electron_mass);
}

ParticleSpec ParticleSpec::from_mass(double charge, double mass) {
  const double c = constants::speed_of_light;
  ParticleSpec p{charge, mass, mass * c * c};
  p.validate();
  return p;
}

void ParticleSpec::validate() const {
  require_positive(mass, "particle mass");
  const double c = constants::speed_of_light;
  const double expected = mass * c * c;
  if (std::abs(rest_energy - expected) > 1e-12 * expected)
    throw DomainError("particle rest energy must equal m c^2");
}

BeamEnergy::BeamEnergy(double electron_volts) : ev_(electron_volts) {
  require_positive(electron_volts, "beam energy");
}

double BeamEnergy::joules() const noexcept { return ev_ * constants::electron_volt; }

double de_broglie_wavelength(BeamEnergy energy, const ParticleSpec &particle) {
  particle.validate();
  const double e = energy.joules();
  const double p = std::sqrt(2.0 * particle.mass * e * (1.0 + e / (2.0 * particle.rest_energy)));
  return constants::planck / p;
}

double nonrelativistic_wavelength(BeamEnergy energy, const ParticleSpec &particle) {
  particle.validate();
  return constants::planck / std::sqrt(2.0 * particle.mass * energy.joules());
}

double talbot_length(double period, double wavelength) {
  require_positive(period, "grating period");
  require_positive(wavelength, "wavelength");
  return 2.0 * period * period / wavelength;
}

BeamEnergy energy_for_wavelength(double wavelength, const ParticleSpec &particle) {
  require_positive(wavelength, "wavelength");
  double lo = kMinEnergyEv;
  double hi = kMaxEnergyEv;
  if (wavelength > de_broglie_wavelength(BeamEnergy(lo), particle) ||
      wavelength < de_broglie_wavelength(BeamEnergy(hi), particle))
    throw DomainError("wavelength outside the invertible range [1 eV, 1 MeV]");

  // wavelength decreases with energy
  while ((hi - lo) > kBisectionRelTol * 0.5 * (hi + lo)) {
    const double mid = 0.5 * (lo + hi);
    if (de_broglie_wavelength(BeamEnergy(mid), particle) > wavelength)
      lo = mid;
    else
      hi = mid;
  }
  return BeamEnergy(0.5 * (lo + hi));
}

std::vector<Resonance> resonant_energies(double separation, double period, int n_max,
                                         const ParticleSpec &particle,
                                         double max_wavelength) {
  require_positive(separation, "grating separation");
  require_positive(period, "grating period");
  if (n_max < 1)
    throw DomainError("n_max must be at least 1");

  const double longest = de_broglie_wavelength(BeamEnergy(kMinEnergyEv), particle);
  const double shortest = de_broglie_wavelength(BeamEnergy(kMaxEnergyEv), particle);
  const double limit = max_wavelength > 0.0 ? std::min(max_wavelength, longest) : longest;

  std::vector<Resonance> out;
  for (int n = 1; n <= n_max; ++n) {
    const double lambda = n * period * period / separation;
    if (lambda > limit || lambda < shortest)
      continue;
    out.push_back({n, lambda, energy_for_wavelength(lambda, particle)});
  }
  return out;
}

} // namespace tli

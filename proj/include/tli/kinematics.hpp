#ifndef TLI_KINEMATICS_HPP
#define TLI_KINEMATICS_HPP

#include <vector>

namespace tli {

/// Beam particle. Charge is signed (electron: -e).
struct ParticleSpec {
  double charge;      // C
  double mass;        // kg
  double rest_energy; // J, mass * c^2

  static ParticleSpec electron();
  static ParticleSpec from_mass(double charge, double mass);

  /// Throws DomainError when mass <= 0 or rest_energy != m c^2.
  void validate() const;

  friend bool operator==(const ParticleSpec &, const ParticleSpec &) = default;
};

/// Kinetic energy in electron-volts; strictly positive by construction.
/// The gun used in the experiment covers 4.5-10 keV, but the kinematics
/// functions are valid over the whole bisection range [1 eV, 1 MeV].
class BeamEnergy {
public:
  explicit BeamEnergy(double electron_volts);

  double electron_volts() const noexcept { return ev_; }
  double joules() const noexcept;

  friend bool operator==(const BeamEnergy &, const BeamEnergy &) = default;

private:
  double ev_;
};

/// Relativistic de Broglie wavelength h / p in meters.
double de_broglie_wavelength(BeamEnergy energy,
                             const ParticleSpec &particle = ParticleSpec::electron());

/// h / sqrt(2 m E), for comparison only.
double nonrelativistic_wavelength(BeamEnergy energy,
                                  const ParticleSpec &particle = ParticleSpec::electron());

/// L_T = 2 d^2 / lambda.
double talbot_length(double period, double wavelength);

/// Inverts de_broglie_wavelength by bisection on [1 eV, 1 MeV].
/// Throws DomainError when the wavelength is outside that range.
BeamEnergy energy_for_wavelength(double wavelength,
                                 const ParticleSpec &particle = ParticleSpec::electron());

struct Resonance {
  int order;
  double wavelength;
  BeamEnergy energy;
};

/// Energies at which the grating separation equals order * L_T / 2, i.e.
/// lambda_n = n d^2 / L, for n = 1..n_max. Orders whose wavelength exceeds
/// max_wavelength (default: the wavelength at 1 eV) or falls below the 1 MeV
/// wavelength are skipped.
std::vector<Resonance> resonant_energies(double separation, double period, int n_max,
                                         const ParticleSpec &particle = ParticleSpec::electron(),
                                         double max_wavelength = 0.0);

} // namespace tli

#endif // TLI_KINEMATICS_HPP

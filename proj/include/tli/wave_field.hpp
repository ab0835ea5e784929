#ifndef TLI_WAVE_FIELD_HPP
#define TLI_WAVE_FIELD_HPP

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "tli/errors.hpp"

namespace tli {

using Eigen::Index;

/// Uniform transverse sampling x_i = x_start + i * dx, i in [0, count).
struct Grid {
  double x_start = 0.0;
  double dx = 1e-9;
  Index count = 2;

  double x(Index i) const { return x_start + static_cast<double>(i) * dx; }
  double x_end() const { return x(count - 1); }
  double span() const { return static_cast<double>(count - 1) * dx; }
  double half_span() const { return 0.5 * span(); }
  double center() const { return x_start + half_span(); }

  /// Grid symmetric about `center`: x_i = center + (i - (count-1)/2) dx.
  static Grid centered(double center, double dx, Index count) {
    return Grid{center - 0.5 * static_cast<double>(count - 1) * dx, dx, count};
  }

  bool same_as(const Grid &other, double rel_tol = 1e-12) const {
    const double scale = std::abs(dx);
    return count == other.count && std::abs(dx - other.dx) <= rel_tol * scale &&
           std::abs(x_start - other.x_start) <= rel_tol * scale * static_cast<double>(count);
  }

  void validate() const {
    if (!(dx > 0.0) || !std::isfinite(dx))
      throw ContractError("grid step must be positive");
    if (count < 2)
      throw ContractError("grid needs at least two samples");
    if (!std::isfinite(x_start))
      throw ContractError("grid start must be finite");
  }
};

/// Complex scalar amplitude sampled on a Grid at plane z.
template <typename Scalar = double>
struct WaveField {
  using Complex = std::complex<Scalar>;
  using Samples = Eigen::Array<Complex, Eigen::Dynamic, 1>;

  Samples amplitudes;
  Grid grid;
  double z = 0.0;
  double wavelength = 0.0;

  WaveField() = default;
  WaveField(Grid g, double z_plane, double lambda)
      : amplitudes(Samples::Zero(g.count)), grid(g), z(z_plane), wavelength(lambda) {
    validate();
  }
  WaveField(Samples a, Grid g, double z_plane, double lambda)
      : amplitudes(std::move(a)), grid(g), z(z_plane), wavelength(lambda) {
    validate();
  }

  Index size() const { return amplitudes.size(); }

  /// Sum |psi|^2 dx.
  double probability() const {
    return static_cast<double>(amplitudes.abs2().sum()) * grid.dx;
  }

  Eigen::Array<Scalar, Eigen::Dynamic, 1> intensity() const { return amplitudes.abs2(); }

  void validate() const {
    grid.validate();
    if (amplitudes.size() != grid.count)
      throw ContractError("amplitude count does not match grid");
    if (!(wavelength > 0.0) || !std::isfinite(wavelength))
      throw ContractError("wavelength must be positive");
    if (!amplitudes.allFinite())
      throw ContractError("wave field contains non-finite amplitudes");
  }
};

using WaveFieldd = WaveField<double>;
using WaveFieldf = WaveField<float>;

} // namespace tli

#endif // TLI_WAVE_FIELD_HPP

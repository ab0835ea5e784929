#ifndef TLI_PROPAGATION_HPP
#define TLI_PROPAGATION_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "tli/errors.hpp"
#include "tli/parallel.hpp"
#include "tli/wave_field.hpp"

namespace tli {

enum class Propagator { direct, paraxial };

/// Free-space step to a target grid `delta_z` further down the beam axis.
struct PropagationPlan {
  double delta_z = 0.0;
  Grid target;
  Propagator method = Propagator::paraxial;

  void validate() const {
    if (!(delta_z > 0.0) || !std::isfinite(delta_z))
      throw ContractError("propagation distance must be positive");
    target.validate();
  }
};

enum class FluxNormalization { preserve, none };

struct PropagationOptions {
  FluxNormalization normalization = FluxNormalization::preserve;
  bool allow_undersampling = false;
  unsigned threads = 0; // 0: hardware concurrency
  double pad_factor = 2.0;
};

struct SamplingReport {
  bool passed = false;
  double dx = 0.0;
  double required_dx = 0.0;
  double max_separation = 0.0;
};

/// Adjacent source samples must differ in path phase by less than pi for
/// every source/target pair: dx <= lambda dz / (2 max|x - x'|).
inline SamplingReport sampling_check(const Grid &source, const Grid &target,
                                     double wavelength, double delta_z) {
  const double sep = std::max(std::abs(target.x_end() - source.x_start),
                              std::abs(source.x_end() - target.x_start));
  SamplingReport r;
  r.dx = source.dx;
  r.max_separation = sep;
  r.required_dx = sep > 0.0 ? wavelength * delta_z / (2.0 * sep)
                            : std::numeric_limits<double>::infinity();
  r.passed = r.dx <= r.required_dx;
  return r;
}

/// Concentric windows: the target window has full width `target_span`, so the
/// largest separation is the sum of the two half-spans.
template <typename Scalar>
SamplingReport sampling_check(const WaveField<Scalar> &psi, double delta_z, double target_span) {
  if (!(delta_z > 0.0) || !(target_span >= 0.0))
    throw DomainError("sampling check needs positive distance and span");
  SamplingReport r;
  r.dx = psi.grid.dx;
  r.max_separation = psi.grid.half_span() + 0.5 * target_span;
  r.required_dx = psi.wavelength * delta_z / (2.0 * r.max_separation);
  r.passed = r.dx <= r.required_dx;
  return r;
}

namespace detail {

inline void enforce_sampling(const SamplingReport &r, const PropagationOptions &opts,
                             const char *leg) {
  if (r.passed || opts.allow_undersampling)
    return;
  std::ostringstream msg;
  msg.precision(4);
  msg << leg << " propagation undersampled: dx = " << r.dx << " m but the kernel requires dx <= "
      << r.required_dx << " m";
  throw SamplingError(msg.str(), r.required_dx);
}

// exp(i 2 pi frac(dz / lambda)) / sqrt(i lambda dz): the common factor of every
// path. Including the Fresnel amplitude keeps the unnormalized transform close
// to unitary; per-path amplitudes stay equal.
inline std::complex<double> global_factor(double wavelength, double delta_z) {
  const double cycles = delta_z / wavelength;
  const double frac = cycles - std::floor(cycles);
  const double phase = 2.0 * std::numbers::pi * frac - 0.25 * std::numbers::pi;
  return std::polar(1.0 / std::sqrt(wavelength * delta_z), phase);
}

template <typename Scalar>
void normalize_flux(WaveField<Scalar> &out, double target_probability) {
  const double p = out.probability();
  if (p > 0.0)
    out.amplitudes *= static_cast<Scalar>(std::sqrt(target_probability / p));
}

} // namespace detail

/// Path-sum propagation with the exact free-space phase 2 pi r / lambda,
/// r = sqrt((x - x')^2 + dz^2). O(N_src * N_tgt); zero source samples skipped.
template <typename Scalar>
WaveField<Scalar> propagate_direct(const WaveField<Scalar> &in, const PropagationPlan &plan,
                                   const PropagationOptions &opts = {}) {
  in.validate();
  plan.validate();
  if (plan.method != Propagator::direct)
    throw ContractError("propagate_direct requires a direct plan");
  detail::enforce_sampling(sampling_check(in.grid, plan.target, in.wavelength, plan.delta_z),
                           opts, "direct");

  std::vector<Index> sources;
  for (Index k = 0; k < in.size(); ++k)
    if (in.amplitudes[k] != typename WaveField<Scalar>::Complex(0))
      sources.push_back(k);

  const double lambda = in.wavelength;
  const double dz = plan.delta_z;
  const double two_pi = 2.0 * std::numbers::pi;
  const std::complex<double> prefactor = detail::global_factor(lambda, dz) * in.grid.dx;

  WaveField<Scalar> out(plan.target, in.z + dz, lambda);
  const unsigned threads = opts.threads ? opts.threads : default_thread_count();
  parallel_for(static_cast<std::size_t>(plan.target.count), threads, [&](std::size_t j) {
    const double x = plan.target.x(static_cast<Index>(j));
    std::complex<double> acc(0.0, 0.0);
    for (Index k : sources) {
      const double u = x - in.grid.x(k);
      // r - dz without cancellation
      const double excess = u * u / (std::sqrt(u * u + dz * dz) + dz);
      const double phase = two_pi * (excess / lambda);
      acc += std::polar(1.0, phase) * std::complex<double>(in.amplitudes[k]);
    }
    out.amplitudes[static_cast<Index>(j)] =
        static_cast<typename WaveField<Scalar>::Complex>(prefactor * acc);
  });

  if (opts.normalization == FluxNormalization::preserve)
    detail::normalize_flux(out, in.probability());
  return out;
}

/// Fresnel (paraxial) step on a fixed grid: convolution with the sampled
/// kernel exp(i pi u^2 / (lambda dz)) by zero-padded FFT. The kernel spectrum
/// is computed once and reused across fields.
template <typename Scalar = double>
class ParaxialPropagator {
public:
  using Complex = std::complex<Scalar>;
  using Spectrum = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

  ParaxialPropagator(const Grid &grid, double wavelength, double delta_z,
                     double pad_factor = 2.0)
      : grid_(grid), wavelength_(wavelength), delta_z_(delta_z) {
    grid_.validate();
    if (!(wavelength > 0.0) || !(delta_z > 0.0))
      throw ContractError("paraxial propagator needs positive wavelength and distance");
    if (!(pad_factor >= 2.0))
      throw ContractError("zero-padding factor must be at least 2");

    const Index n = grid_.count;
    const double wanted = pad_factor * static_cast<double>(n);
    size_ = 1;
    while (static_cast<double>(size_) < wanted)
      size_ *= 2;

    const double a = std::numbers::pi * grid_.dx * grid_.dx / (wavelength * delta_z);
    const std::complex<double> g = detail::global_factor(wavelength, delta_z) * grid_.dx;
    Spectrum kernel = Spectrum::Zero(size_);
    for (Index m = 0; m < n; ++m) {
      const double md = static_cast<double>(m);
      const Complex v = static_cast<Complex>(g * std::polar(1.0, a * md * md));
      kernel[m] = v;
      if (m > 0)
        kernel[size_ - m] = v;
    }
    Eigen::FFT<Scalar> fft;
    fft.fwd(spectrum_, kernel);
  }

  const Grid &grid() const noexcept { return grid_; }
  double wavelength() const noexcept { return wavelength_; }
  double delta_z() const noexcept { return delta_z_; }
  Index transform_size() const noexcept { return size_; }

  WaveField<Scalar> operator()(const WaveField<Scalar> &in,
                               FluxNormalization normalization = FluxNormalization::preserve) const {
    in.validate();
    if (!in.grid.same_as(grid_))
      throw ContractError("paraxial propagation requires the field on the propagator grid");
    if (std::abs(in.wavelength - wavelength_) > 1e-12 * wavelength_)
      throw ContractError("field wavelength differs from propagator wavelength");

    const Index n = grid_.count;
    Spectrum padded = Spectrum::Zero(size_);
    padded.head(n) = in.amplitudes.matrix();
    // Plans are cached per size inside Eigen::FFT but are not thread-safe.
    thread_local Eigen::FFT<Scalar> fft;
    Spectrum transformed;
    fft.fwd(transformed, padded);
    transformed.array() *= spectrum_.array();
    Spectrum result;
    fft.inv(result, transformed);

    WaveField<Scalar> out(result.head(n).array(), grid_, in.z + delta_z_, wavelength_);
    if (normalization == FluxNormalization::preserve)
      detail::normalize_flux(out, in.probability());
    return out;
  }

private:
  Grid grid_;
  double wavelength_;
  double delta_z_;
  Index size_ = 0;
  Spectrum spectrum_;
};

template <typename Scalar>
WaveField<Scalar> propagate_paraxial(const WaveField<Scalar> &in, const PropagationPlan &plan,
                                     const PropagationOptions &opts = {}) {
  in.validate();
  plan.validate();
  if (plan.method != Propagator::paraxial)
    throw ContractError("propagate_paraxial requires a paraxial plan");
  if (!in.grid.same_as(plan.target))
    throw ContractError("paraxial propagation requires identical input and target grids");
  detail::enforce_sampling(sampling_check(in.grid, plan.target, in.wavelength, plan.delta_z),
                           opts, "paraxial");
  const ParaxialPropagator<Scalar> step(in.grid, in.wavelength, plan.delta_z, opts.pad_factor);
  return step(in, opts.normalization);
}

template <typename Scalar>
WaveField<Scalar> propagate(const WaveField<Scalar> &in, const PropagationPlan &plan,
                            const PropagationOptions &opts = {}) {
  return plan.method == Propagator::direct ? propagate_direct(in, plan, opts)
                                           : propagate_paraxial(in, plan, opts);
}

} // namespace tli

#endif // TLI_PROPAGATION_HPP

#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "tli/errors.hpp"
#include "tli/propagation.hpp"

using namespace tli;
using doctest::Approx;

namespace {

constexpr double lambda = 13.1e-12;

// Two slits of width w, centers +-a/2, on a 2048-point 1 nm grid.
WaveFieldd double_slit(double a, double w) {
  const Grid g = Grid::centered(0.0, 1e-9, 2048);
  WaveFieldd psi(g, 0.0, lambda);
  for (Index i = 0; i < g.count; ++i) {
    const double x = g.x(i);
    if (std::abs(x - a / 2) <= w / 2 || std::abs(x + a / 2) <= w / 2)
      psi.amplitudes[i] = 1.0;
  }
  return psi;
}

WaveFieldd random_field(const Grid &g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  WaveFieldd psi(g, 0.0, lambda);
  for (Index i = 0; i < g.count; ++i)
    psi.amplitudes[i] = {n(rng), n(rng)};
  return psi;
}

PropagationOptions raw() {
  PropagationOptions o;
  o.normalization = FluxNormalization::none;
  return o;
}

// Peak positions of the intensity within |x| < half_window, parabola refined.
std::vector<double> peaks(const WaveFieldd &psi, double half_window) {
  const auto in = psi.intensity();
  std::vector<double> out;
  for (Index i = 1; i + 1 < psi.size(); ++i) {
    if (std::abs(psi.grid.x(i)) > half_window || !(in[i] > in[i - 1] && in[i] >= in[i + 1]))
      continue;
    const double den = in[i - 1] - 2 * in[i] + in[i + 1];
    const double shift = den != 0.0 ? 0.5 * (in[i - 1] - in[i + 1]) / den : 0.0;
    out.push_back(psi.grid.x(i) + shift * psi.grid.dx);
  }
  return out;
}

double slope(const std::vector<double> &y) {
  const double n = static_cast<double>(y.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double x = static_cast<double>(i);
    sx += x; sy += y[i]; sxx += x * x; sxy += x * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

TEST_CASE("sampling criterion") {
  const Grid src = Grid::centered(0.0, 1e-9, 20001);
  WaveFieldd psi(src, 0.0, lambda);
  const auto r = sampling_check(psi, 3.06e-3, 20e-6);
  CHECK(r.required_dx == Approx(1.00215e-9).epsilon(1e-5));
  CHECK(r.passed);
  const auto r2 = sampling_check(psi, 6.12e-3, 20e-6);
  CHECK(r2.required_dx == Approx(2.0 * r.required_dx).epsilon(1e-12));

  // grid-to-grid form: same worst-case separation
  const Grid tgt = Grid::centered(0.0, 1e-9, 20001);
  CHECK(sampling_check(src, tgt, lambda, 3.06e-3).required_dx == Approx(r.required_dx));

  const Grid coarse = Grid::centered(0.0, 2e-9, 10001);
  CHECK_FALSE(sampling_check(coarse, coarse, lambda, 3.06e-3).passed);
}

TEST_CASE("undersampled propagation is refused unless allowed") {
  const Grid g = Grid::centered(0.0, 2e-9, 10001);
  WaveFieldd psi(g, 0.0, lambda);
  psi.amplitudes[5000] = 1.0;
  const PropagationPlan plan{3.06e-3, g, Propagator::paraxial};
  try {
    (void)propagate(psi, plan);
    FAIL("expected SamplingError");
  } catch (const SamplingError &e) {
    CHECK(e.required_dx() == Approx(lambda * 3.06e-3 / (2 * 20e-6)).epsilon(1e-9));
  }
  PropagationOptions o;
  o.allow_undersampling = true;
  CHECK_NOTHROW((void)propagate(psi, plan, o));
}

TEST_CASE("contract violations") {
  const Grid g = Grid::centered(0.0, 1e-9, 256);
  WaveFieldd psi(g, 0.0, lambda);
  psi.amplitudes[128] = 1.0;
  CHECK_THROWS_AS((void)propagate_paraxial(psi, {1e-3, Grid::centered(1e-9, 1e-9, 256)}),
                  ContractError);
  CHECK_THROWS_AS((void)propagate_paraxial(psi, {1e-3, g, Propagator::direct}), ContractError);
  CHECK_THROWS_AS((void)propagate(psi, {0.0, g}), ContractError);
  CHECK_THROWS_AS(ParaxialPropagator<double>(g, lambda, 1e-3, 1.5), ContractError);
  CHECK_THROWS_AS(WaveFieldd(WaveFieldd::Samples::Zero(3), g, 0.0, lambda), ContractError);
}

TEST_CASE("point source gives uniform magnitude") {
  const Grid src = Grid::centered(0.0, 1e-9, 3);
  WaveFieldd psi(src, 0.0, lambda);
  psi.amplitudes[1] = 1.0;
  const Grid tgt = Grid::centered(0.0, 1e-9, 501);
  const auto out = propagate_direct(psi, {1e-3, tgt, Propagator::direct}, raw());
  const auto mag = out.amplitudes.abs();
  // |K| = dx / sqrt(lambda dz), independent of x.
  CHECK(mag.maxCoeff() == Approx(mag.minCoeff()).epsilon(1e-12));
  CHECK(mag[0] == Approx(1e-9 / std::sqrt(lambda * 1e-3)).epsilon(1e-12));
}

TEST_CASE("double slit: fringe period and paraxial against direct") {
  const double a = 400e-9, dz = 3e-3;
  const auto psi = double_slit(a, 10e-9);
  const auto direct = propagate(psi, {dz, psi.grid, Propagator::direct});
  const auto paraxial = propagate(psi, {dz, psi.grid, Propagator::paraxial});

  const auto p = peaks(direct, 600e-9);
  REQUIRE(p.size() >= 8);
  const double expected = oracle::two_slit_period(lambda, dz, a);
  CHECK(std::abs(slope(p) - expected) / expected < 0.02);

  const Eigen::ArrayXd id = direct.intensity(), ip = paraxial.intensity();
  CHECK(oracle::rel_l2(ip, id) < 1e-3);
}

TEST_CASE("wide uniform source is flat near the axis") {
  // edges sit ~340 Fresnel units sqrt(lambda dz / 2) away from the window
  const Grid src = Grid::centered(0.0, 0.15e-9, 266667);
  WaveFieldd psi(src, 0.0, lambda);
  psi.amplitudes.setConstant(1.0);
  const Grid tgt = Grid::centered(0.0, 5e-9, 201);
  const auto out = propagate_direct(psi, {0.5e-3, tgt, Propagator::direct}, raw());
  const auto in = out.intensity();
  CHECK((in.maxCoeff() - in.minCoeff()) / in.mean() < 0.01);
}

TEST_CASE("propagation is linear") {
  const Grid g = Grid::centered(0.0, 1e-9, 1024);
  const auto f = random_field(g, 1), h = random_field(g, 2);
  const std::complex<double> alpha(0.3, -1.7), beta(-2.1, 0.4);
  WaveFieldd mix = f;
  mix.amplitudes = alpha * f.amplitudes + beta * h.amplitudes;
  for (Propagator m : {Propagator::paraxial, Propagator::direct}) {
    const PropagationPlan plan{1e-3, g, m};
    const auto pf = propagate(f, plan, raw()), ph = propagate(h, plan, raw());
    const auto pm = propagate(mix, plan, raw());
    const Eigen::ArrayXcd expect = alpha * pf.amplitudes + beta * ph.amplitudes;
    CHECK(std::sqrt((pm.amplitudes - expect).abs2().sum() / expect.abs2().sum()) < 1e-12);
  }
}

TEST_CASE("paraxial step conserves flux of a contained beam") {
  const Grid g = Grid::centered(0.0, 1e-9, 4096);
  WaveFieldd psi(g, 0.0, lambda);
  for (Index i = 0; i < g.count; ++i) {
    const double x = g.x(i) / 150e-9;
    psi.amplitudes[i] = std::exp(-0.5 * x * x);
  }
  const auto out = propagate(psi, {3.06e-3, g}, raw());
  CHECK(std::abs(out.probability() - psi.probability()) / psi.probability() < 1e-6);

  const auto kept = propagate(random_field(g, 3), {3.06e-3, g});
  CHECK(kept.probability() == Approx(random_field(g, 3).probability()).epsilon(1e-12));
}

TEST_CASE("mirror symmetry") {
  const Grid g = Grid::centered(0.0, 1e-9, 1000);
  const auto f = random_field(g, 7);
  WaveFieldd mirrored = f;
  mirrored.amplitudes = f.amplitudes.reverse().eval();
  for (Propagator m : {Propagator::paraxial, Propagator::direct}) {
    const PropagationPlan plan{2e-3, g, m};
    const auto a = propagate(f, plan, raw());
    const auto b = propagate(mirrored, plan, raw());
    const Eigen::ArrayXcd ar = a.amplitudes.reverse();
    CHECK(std::sqrt((b.amplitudes - ar).abs2().sum() / ar.abs2().sum()) < 1e-10);
  }
}

TEST_CASE("kernel depends only on the step") {
  const Grid g = Grid::centered(0.0, 1e-9, 512);
  const ParaxialPropagator<double> step(g, lambda, 1e-3);
  CHECK(step.transform_size() == 1024);
  const auto f = random_field(g, 9);
  const auto once = step(f, FluxNormalization::none);
  const auto again = step(f, FluxNormalization::none);
  CHECK((once.amplitudes == again.amplitudes).all());
  CHECK(once.z == Approx(1e-3));
}

TEST_CASE("single precision agrees with double") {
  const Grid g = Grid::centered(0.0, 1e-9, 512);
  const auto f = random_field(g, 11);
  WaveFieldf ff(f.amplitudes.cast<std::complex<float>>(), g, 0.0, lambda);
  const auto d = propagate(f, {1e-3, g});
  const auto s = propagate(ff, {1e-3, g});
  const Eigen::ArrayXcd sd = s.amplitudes.cast<std::complex<double>>();
  CHECK(std::sqrt((sd - d.amplitudes).abs2().sum() / d.amplitudes.abs2().sum()) < 1e-4);
}

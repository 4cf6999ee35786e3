#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

#include "thermchan/channel.hpp"
#include "thermchan/errors.hpp"
#include "thermchan/evolve.hpp"

using namespace thermchan;
using namespace thermchan::channel;
using qop::CMatrix;
using qop::Complex;

namespace {

model::SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coupling(0.5, 5.0), detune(-8.0, 8.0), temp(0.0, 0.2);
  model::SystemParams p;
  p.eta = units::mhz(coupling(rng));
  p.Omega = units::mhz(coupling(rng));
  p.omega_q = units::ghz(5.45) + units::mhz(detune(rng));
  p.omega_r = units::ghz(5.45) + units::mhz(detune(rng));
  p.t_bath = temp(rng);
  p.fock_dim = 3;
  return p;
}

oracle::RateInputs inputs_of(const ChannelBasis& b, const model::SystemParams& p) {
  oracle::RateInputs in{};
  for (int k = 0; k < 3; ++k) {
    in.eps[k] = b.energy(k);
    in.del[k] = b.detuning(k);
  }
  in.eta = p.eta;
  in.Omega = p.Omega;
  in.kappa = p.gamma_r;
  in.t_bath = p.t_bath;
  in.hbar_kb = p.hbar_over_kb;
  return in;
}

CMatrix random_unit_block(std::mt19937_64& rng) {
  return oracle::random_density(3, rng);
}

}  // namespace

TEST_CASE("decoupled channel energies are the shifted bare levels") {
  model::SystemParams p;
  p.eta = 0.0;
  p.Omega = 0.0;
  const auto b = channel_states(p);
  CHECK(b.reference_shift == doctest::Approx(0.5 * p.delta_q()));
  // Ascending: delta_r (-5 MHz, |g,1>), delta_q (-2 MHz, |e,0>), 0 (|g,0>).
  CHECK(b.energies(0) == doctest::Approx(p.delta_r()));
  CHECK(b.energies(1) == doctest::Approx(p.delta_q()));
  CHECK(std::abs(b.energies(2)) < 1e-12);
  CHECK(std::norm(b.states(kG1, 0)) == doctest::Approx(1.0));
  CHECK(std::norm(b.states(kE0, 1)) == doctest::Approx(1.0));
  CHECK(std::norm(b.states(kG0, 2)) == doctest::Approx(1.0));
  // |e,0> has zero detuning and |g,0> zero energy: both floored and flagged.
  CHECK(b.near_singular);
  CHECK(std::abs(b.energy(2)) == doctest::Approx(kEpsFloor));
}

TEST_CASE("resonant undriven block splits as 0 and +-eta") {
  model::SystemParams p;
  p.omega_q = p.omega_r = p.omega_d;
  p.Omega = 0.0;
  const auto b = channel_states(p);
  CHECK(b.energies(0) == doctest::Approx(-p.eta));
  CHECK(std::abs(b.energies(1)) < 1e-12);
  CHECK(b.energies(2) == doctest::Approx(p.eta));
}

TEST_CASE("operating point gives three distinct unflagged channel states") {
  model::SystemParams p;
  const auto b = channel_states(p);
  CHECK_FALSE(b.near_singular);
  CHECK(b.energies(0) < b.energies(1));
  CHECK(b.energies(1) < b.energies(2));
  CHECK((b.states.adjoint() * b.states - CMatrix::Identity(3, 3)).norm() < 1e-10);
  for (int k = 0; k < 3; ++k) {
    const double raw = b.energies(k) - b.reference_shift;
    CHECK((b.h_trunc * b.states.col(k) - raw * b.states.col(k)).norm() < 1e-9);
    CHECK(b.detunings(k) == doctest::Approx(b.energies(k) - p.delta_q()));
    // Phase convention: first non-negligible component is real and positive.
    for (int i = 0; i < 3; ++i) {
      if (std::abs(b.states(i, k)) > 1e-12) {
        CHECK(b.states(i, k).real() > 0.0);
        CHECK(std::abs(b.states(i, k).imag()) < 1e-14);
        break;
      }
    }
  }
}

TEST_CASE("no coupling and no drive means no channel transitions") {
  model::SystemParams p;
  p.eta = 0.0;
  p.Omega = 0.0;
  const auto b = channel_states(p);
  const auto g = channel_rates(b, model::bath_from(p), p);
  CHECK(g.gamma.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero-temperature rates are one-sided") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_params(rng);
    p.t_bath = 0.0;
    const auto b = channel_states(p);
    const auto g = channel_rates(b, model::bath_from(p), p);
    for (int k = 0; k < 3; ++k) {
      CHECK(g.gamma(k, k) == 0.0);
      for (int n = 0; n < 3; ++n) {
        CHECK(g.gamma(k, n) >= 0.0);
        if (b.energy(k) <= b.energy(n)) CHECK(g.gamma(k, n) == 0.0);
      }
    }
  }
}

TEST_CASE("channel rates match an independent transcription") {
  model::SystemParams p;
  const auto b = channel_states(p);
  const auto g = channel_rates(b, model::bath_from(p), p);
  const auto want = oracle::rates_longhand(inputs_of(b, p));
  CHECK((g.gamma - want).cwiseAbs().maxCoeff() <= 1e-12 * want.cwiseAbs().maxCoeff());

  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = random_params(rng);
    const auto bq = channel_states(q);
    const auto gq = channel_rates(bq, model::bath_from(q), q);
    const auto wq = oracle::rates_longhand(inputs_of(bq, q));
    const double scale = std::max(wq.cwiseAbs().maxCoeff(), 1e-300);
    CHECK((gq.gamma - wq).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    CHECK(gq.gamma.minCoeff() >= 0.0);
  }
}

TEST_CASE("closed-form channel evolution without rates is free precession") {
  model::SystemParams p;
  const auto b = channel_states(p);
  ChannelRates none;
  std::mt19937_64 rng(4);
  const DensityMatrix rho0(random_unit_block(rng));
  const std::vector<double> t{0.0, 0.1, 0.5, 2.0};
  const auto ev = evolve_channel(b, none, rho0, t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto& r = ev.states[i].matrix();
    for (int j = 0; j < 3; ++j) {
      CHECK(std::abs(r(j, j) - rho0.matrix()(j, j)) < 1e-14);
      for (int k = 0; k < 3; ++k) {
        if (j == k) continue;
        const Complex want = rho0.matrix()(j, k) * std::polar(1.0, -(b.energies(j) - b.energies(k)) * t[i]);
        CHECK(std::abs(r(j, k) - want) < 1e-12);
      }
    }
  }
}

TEST_CASE("closed-form channel evolution matches direct integration of the channel master equation") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rate(0.0, 3.0), energy(-30.0, 30.0);
  std::vector<double> t;
  for (int i = 0; i <= 40; ++i) t.push_back(0.05 * i);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ChannelBasis b;
    for (int k = 0; k < 3; ++k) b.energies(k) = energy(rng);
    ChannelRates g;
    for (int k = 0; k < 3; ++k)
      for (int n = 0; n < 3; ++n) g.gamma(k, n) = k == n ? 0.0 : rate(rng);
    const DensityMatrix rho0(random_unit_block(rng));

    const auto closed = evolve_channel(b, g, rho0, t);
    const auto gen = channel_generator(b.energies, g);
    evolve::EvolveOptions o;
    o.tol = 1e-12;
    o.keep_states = true;
    o.observable = qop::identity(3);
    const auto rk = evolve::evolve_adaptive(gen.h, gen.collapses, rho0, t, o);
    for (std::size_t i = 0; i < t.size(); ++i) {
      worst = std::max(worst, (closed.states[i].matrix() - rk.states[i].matrix()).cwiseAbs().maxCoeff());
      double sum = 0.0;
      for (int k = 0; k < 3; ++k) sum += closed.states[i].matrix()(k, k).real();
      CHECK(std::abs(sum - 1.0) <= 1e-10);
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("rate-matrix null vector is the long-time limit") {
  model::SystemParams p;
  const auto b = channel_states(p);
  const auto g = channel_rates(b, model::bath_from(p), p);
  const auto ps = rate_steady_populations(g);
  CHECK(ps.sum() == doctest::Approx(1.0));
  CHECK(ps.minCoeff() >= 0.0);
  const std::vector<double> t{0.0, 200.0};
  const auto ev = evolve_channel(b, g, ground_state_in_channel_basis(b), t);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(ev.states[1].matrix()(k, k).real() - ps(k)) <= 1e-8);
  CHECK(ev.states[1].matrix().cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("steady-state formula limits") {
  model::SystemParams p;
  const auto b = channel_states(p);
  CHECK(steady_state_formula(b.energies, b.detunings, p.eta, 0.0) == 0.0);
  CHECK(steady_state_formula(b.energies, b.detunings, p.eta, 1e9) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("each formula term is the ground-configuration weight of its channel state") {
  // With energies measured from the bare |g,0> level, every term equals
  // |<g,0|mu_k>|^2, so the three-term average is exactly one third.
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(rng);
    const auto b = channel_states(p);
    if (b.near_singular) continue;
    for (int k = 0; k < 3; ++k) {
      const double e = b.energies(k), d = b.detunings(k);
      const double term = p.Omega * p.Omega / (p.Omega * p.Omega + e * e * (1.0 + p.eta * p.eta / (d * d)));
      CHECK(term == doctest::Approx(std::norm(b.states(kG0, k))).epsilon(1e-9));
    }
    CHECK(steady_state_channel(p).p_e == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  }
}

TEST_CASE("qubit population in the channel basis") {
  model::SystemParams p;
  p.eta = 0.0;
  p.Omega = 0.0;
  const auto b = channel_states(p);  // states are the bare levels
  // mu_1 is |e,0>.
  CMatrix r = CMatrix::Zero(3, 3);
  r(1, 1) = 1.0;
  CHECK(qubit_population_channel(DensityMatrix(r), b) == doctest::Approx(1.0));
  r.setZero();
  r(0, 0) = 1.0;
  CHECK(qubit_population_channel(DensityMatrix(r), b) == doctest::Approx(0.0));

  model::SystemParams q;
  const auto bq = channel_states(q);
  double want = 0.0;
  for (int k = 0; k < 3; ++k) want += std::norm(bq.states(kE0, k)) / 3.0;
  CHECK(qubit_population_channel(DensityMatrix::maximally_mixed(3), bq) == doctest::Approx(want));
  CHECK(want == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("ground configuration in the channel basis") {
  model::SystemParams p;
  const auto b = channel_states(p);
  const auto g0 = ground_state_in_channel_basis(b);
  CHECK(qubit_population_channel(g0, b) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(std::abs(g0.matrix().trace() - 1.0) < 1e-12);
}

TEST_CASE("weak coupling and drive at zero temperature reduce to free evolution") {
  model::SystemParams p;
  p.eta = 1e-9;
  p.Omega = 1e-9;
  p.t_bath = 0.0;
  const auto b = channel_states(p);
  const auto g = channel_rates(b, model::bath_from(p), p);
  CHECK(g.gamma.cwiseAbs().maxCoeff() < 1e-10);
}

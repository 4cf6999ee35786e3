#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "thermchan/density.hpp"
#include "thermchan/model.hpp"
#include "thermchan/qop.hpp"

namespace thermchan::channel {

// Truncated subspace ordering used for the channel states.
inline constexpr int kG0 = 0;  // |g,0>
inline constexpr int kE0 = 1;  // |e,0>
inline constexpr int kG1 = 2;  // |g,1>

// Magnitude below which an energy or detuning is treated as singular (rad/us).
inline constexpr double kEpsFloor = units::kTwoPi * 1e-3;

// The three channel states |mu_k>: eigenvectors of the rotating-frame
// Hamiltonian restricted to {|g,0>, |e,0>, |g,1>}. Energies are measured from
// the bare |g,0> diagonal element, so energies = eigenvalues + reference_shift.
struct ChannelBasis {
  Eigen::Vector3d energies;    // epsilon_k, ascending
  Eigen::Vector3d detunings;   // Delta_k = epsilon_k - delta_q
  qop::CMatrix states;         // 3x3, column k is |mu_k> in the (g0, e0, g1) basis
  qop::CMatrix h_trunc;        // truncated block before the shift
  double reference_shift = 0.0;
  bool near_singular = false;  // some |epsilon_k| or |Delta_k| fell below kEpsFloor

  // Floored copies used wherever Eq. 3 / Eq. 4 divide.
  double energy(int k) const;
  double detuning(int k) const;
};

// Gamma(k, n) is the rate of the k -> n channel transition; zero diagonal.
struct ChannelRates {
  Eigen::Matrix3d gamma = Eigen::Matrix3d::Zero();

  double outflow(int k) const;
  // Population generator: M(n, k) = Gamma(k, n), M(k, k) = -outflow(k).
  Eigen::Matrix3d transition_matrix() const;
};

ChannelBasis channel_states(const model::SystemParams& p);

ChannelRates channel_rates(const ChannelBasis& b, const model::BathSpectrum& s, const model::SystemParams& p);

struct ChannelEvolution {
  std::vector<DensityMatrix> states;  // 3x3, in the |mu_k> basis
  bool expm_fallback = false;         // transition matrix was defective
};

// Closed-form solution of the channel master equation.
ChannelEvolution evolve_channel(const ChannelBasis& b, const ChannelRates& g, const DensityMatrix& rho0,
                                std::span<const double> t_grid);

// H_S = diag(epsilon) and jumps |mu_n><mu_k| at Gamma(k, n), for direct integration.
struct ChannelGenerator {
  qop::Operator h;
  model::CollapseSet collapses;
};
ChannelGenerator channel_generator(const Eigen::Vector3d& energies, const ChannelRates& g);

// Steady-state inversion from the three-term closed formula.
double steady_state_formula(const Eigen::Vector3d& energies, const Eigen::Vector3d& detunings, double eta,
                            double Omega);

struct ChannelSteady {
  double p_e = 0.0;
  bool near_singular = false;
};
ChannelSteady steady_state_channel(const model::SystemParams& p);

// Null vector of the population generator (normalized), and its P_e.
Eigen::Vector3d rate_steady_populations(const ChannelRates& g);
double rate_steady_p_e(const ChannelBasis& b, const ChannelRates& g);

// P_e = Tr(rho P) with P = |e,0><e,0| written in the channel basis.
double qubit_population_channel(const DensityMatrix& rho, const ChannelBasis& b);

// |g,0><g,0| expressed in the channel basis.
DensityMatrix ground_state_in_channel_basis(const ChannelBasis& b);

}  // namespace thermchan::channel

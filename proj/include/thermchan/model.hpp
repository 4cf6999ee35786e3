#pragma once

#include <cstddef>
#include <vector>

#include "thermchan/qop.hpp"
#include "thermchan/units.hpp"

namespace thermchan::model {

// Physical parameters of the driven qubit-resonator-bath system.
// Frequencies in rad/us, times in us, temperature in K.
struct SystemParams {
  double omega_q = units::ghz(5.448);
  double omega_r = units::ghz(5.445);
  double omega_d = units::ghz(5.45);
  double eta = units::mhz(2.0);
  double Omega = units::mhz(2.0);
  double gamma_r = units::mhz(1.2);  // FWHM linewidth
  double t1 = 5.2;
  double t_bath = 0.020;
  std::size_t fock_dim = 15;

  // Switches that default to off.
  bool qubit_thermal = false;   // sigma_+ at n_q / T1
  double dephasing_rate = 0.0;  // pure dephasing gamma_phi (1/us)
  double hbar_over_kb = units::kHbarOverKb;

  double delta_q() const { return omega_q - omega_d; }
  double delta_r() const { return omega_r - omega_d; }
  qop::HilbertDims dims() const { return {2, fock_dim}; }

  // Throws DomainError naming the offending field.
  void validate() const;
};

struct BathSpectrum {
  double kappa;   // flat spectral coupling density (1/us)
  double t_bath;  // K
  double hbar_over_kb = units::kHbarOverKb;
};

BathSpectrum bath_from(const SystemParams& p);

struct Collapse {
  qop::Operator op;
  double rate;
};
using CollapseSet = std::vector<Collapse>;

// Lab frame, explicitly time dependent through the drive phase.
qop::Operator build_h_lab(const SystemParams& p, double t);

// Frame rotating at omega_d; time independent.
qop::Operator build_h_rotating(const SystemParams& p);

// Bare driven qubit in the drive frame: (delta_q/2) sigma_z + Omega (sigma_+ + sigma_-).
qop::Operator build_h_bare_qubit(const SystemParams& p);

// Bose-Einstein occupation; zero at t = 0. Throws DomainError for omega <= 0.
double bose_occupation(double omega, double t, double hbar_over_kb = units::kHbarOverKb);

// Below this |omega| the occupation is evaluated at the floor.
inline constexpr double kOmegaFloor = units::kTwoPi * 1e-4;

// Thermal (two-sided) and vacuum (one-sided) spontaneous transition rates.
double rate_thermal(const BathSpectrum& s, double omega);
double rate_vacuum(const BathSpectrum& s, double omega);

// Damped JC set: a, a^dagger on the resonator, sigma_- on the qubit, plus the optional switches.
CollapseSet collapse_set_full(const SystemParams& p);
CollapseSet collapse_set_bare_qubit(const SystemParams& p);

// |e><e| (x) I on the composite space.
qop::Operator excited_projector(const qop::HilbertDims& dims);

}  // namespace thermchan::model

#pragma once

// Independent re-derivations used to cross-check library code. Nothing here
// calls into the library's helpers: each formula is written out longhand.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

// Entry ((i*sb + k), (j*sb + l)) = a(i, j) * b(k, l), by explicit loops.
inline Eigen::MatrixXcd kron_brute(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const auto sa = a.rows(), sb = b.rows();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(sa * sb, sa * sb);
  for (Eigen::Index i = 0; i < sa; ++i)
    for (Eigen::Index j = 0; j < sa; ++j)
      for (Eigen::Index k = 0; k < sb; ++k)
        for (Eigen::Index l = 0; l < sb; ++l) out(i * sb + k, j * sb + l) = a(i, j) * b(k, l);
  return out;
}

// Straight-line transcription of the channel-rate formula: bath factor times
// the drive/coupling weight over the two dressing normalizations.
//   bath = gbar(e_n - e_k) + gbar(e_k - e_n) + g(e_k - e_n)
//   gbar(w) = kappa / (exp(hbar_kb |w| / T) - 1), g(w) = kappa for w > 0
struct RateInputs {
  double eps[3];
  double del[3];
  double eta;
  double Omega;
  double kappa;
  double t_bath;
  double hbar_kb;
};

inline double occupation_longhand(double w, double t, double hbar_kb) {
  if (t == 0.0) return 0.0;
  double aw = w < 0 ? -w : w;
  const double floor = 2.0 * 3.14159265358979323846 * 1e-4;
  if (aw < floor) aw = floor;
  return 1.0 / (std::exp(hbar_kb * aw / t) - 1.0);
}

inline Eigen::Matrix3d rates_longhand(const RateInputs& in) {
  Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
  for (int k = 0; k < 3; ++k) {
    for (int n = 0; n < 3; ++n) {
      if (k == n) continue;
      const double up = in.eps[n] - in.eps[k];
      const double down = in.eps[k] - in.eps[n];
      const double gbar_up = in.kappa * occupation_longhand(up, in.t_bath, in.hbar_kb);
      const double gbar_down = in.kappa * occupation_longhand(down, in.t_bath, in.hbar_kb);
      const double g_vac = down > 0 ? in.kappa : 0.0;
      const double amp = in.eta * (1.0 / in.del[k] + 1.0 / in.del[n]) + in.Omega * (1.0 / in.eps[k] + 1.0 / in.eps[n]);
      const double nk = 1.0 + in.eta * in.eta / (in.del[k] * in.del[k]) + in.Omega * in.Omega / (in.eps[k] * in.eps[k]);
      const double nn = 1.0 + in.eta * in.eta / (in.del[n] * in.del[n]) + in.Omega * in.Omega / (in.eps[n] * in.eps[n]);
      g(k, n) = (gbar_up + gbar_down + g_vac) * amp * amp / (nk * nn);
    }
  }
  return g;
}

inline Eigen::MatrixXcd random_density(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = {nd(rng), nd(rng)};
  Eigen::MatrixXcd rho = a * a.adjoint();
  return rho / rho.trace().real();
}

inline Eigen::MatrixXcd random_hermitian(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = {nd(rng), nd(rng)};
  return 0.5 * (a + a.adjoint());
}

}  // namespace oracle

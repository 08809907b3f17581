#pragma once

// Closed forms and brute-force reference values used by the test suite and by
// `adialab verify`. Nothing here calls into the library's Hamiltonian
// assembly, spectra or propagators.

#include <array>
#include <complex>
#include <functional>
#include <vector>

namespace adialab::oracle {

/// log(2 cosh(beta h)): per-site pressure of free spins in a field h sigma_z.
double free_spin_pressure(double h, double beta = 1.0);

/// Per-site log-partition function of the open Ising chain
/// J sum z_i z_{i+1} + h sum z_i on L sites, by 2x2 transfer matrices.
double ising_open_pressure(int L, double J, double h, double beta = 1.0);

/// log(2 cosh(beta J)): infinite-volume pressure of the zero-field Ising chain.
double ising_infinite_pressure(double J, double beta = 1.0);

/// Per-site log-partition function of the open XY chain J sum (XX + YY) via
/// Jordan-Wigner free fermions with modes 4J cos(pi k/(L+1)).
double xy_open_pressure(int L, double J, double beta = 1.0);
/// (1/pi) int_0^pi log(1 + e^{-4 beta J cos q}) dq.
double xy_infinite_pressure(double J, double beta = 1.0);

/// Classical energies of the open chain J sum z_i z_{i+1} + h sum z_i over all
/// 2^L configurations (spin-up = +1).
std::vector<double> ising_configuration_energies(int L, double J, double h);

/// S(nu_0 | nu_tau)/L for the commuting path (1 + tau)(J zz + h z) at inverse
/// temperature beta: the driven state stays nu_0 for every T.
double commuting_relative_entropy_per_site(int L, double J, double h, double tau, double beta = 1.0);

/// Ordered exponential of i dU/dt = H(t) U for 2x2 H(t) with entries given by
/// `h`, via classical RK4 on a fine uniform grid (reference for small tests).
using Mat2 = std::array<std::complex<double>, 4>;
Mat2 two_level_propagator(const std::function<Mat2(double)>& h, double t0, double t1, int steps);

}  // namespace adialab::oracle

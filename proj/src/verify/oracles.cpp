#include "adialab/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace adialab::oracle {

double free_spin_pressure(double h, double beta) { return std::log(2.0 * std::cosh(beta * h)); }

double ising_open_pressure(int L, double J, double h, double beta) {
  // Z = sum_s exp(-beta(J sum s_i s_{i+1} + h sum s_i)), rescaled each step.
  const double s[2] = {1.0, -1.0};
  double v[2] = {std::exp(-beta * h * s[0]), std::exp(-beta * h * s[1])};
  double log_scale = 0.0;
  for (int site = 1; site < L; ++site) {
    double w[2] = {0.0, 0.0};
    for (int b = 0; b < 2; ++b)
      for (int a = 0; a < 2; ++a) w[b] += v[a] * std::exp(-beta * (J * s[a] * s[b] + h * s[b]));
    const double m = std::max(w[0], w[1]);
    v[0] = w[0] / m;
    v[1] = w[1] / m;
    log_scale += std::log(m);
  }
  return (log_scale + std::log(v[0] + v[1])) / L;
}

double ising_infinite_pressure(double J, double beta) { return std::log(2.0 * std::cosh(beta * J)); }

double xy_open_pressure(int L, double J, double beta) {
  double log_z = 0.0;
  for (int k = 1; k <= L; ++k) {
    const double eps = 4.0 * J * std::cos(std::numbers::pi * k / (L + 1));
    log_z += std::log1p(std::exp(-beta * eps));
  }
  return log_z / L;
}

double xy_infinite_pressure(double J, double beta) {
  const auto f = [&](double q) { return std::log1p(std::exp(-4.0 * beta * J * std::cos(q))); };
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, std::numbers::pi, 15, 1e-14) /
         std::numbers::pi;
}

std::vector<double> ising_configuration_energies(int L, double J, double h) {
  std::vector<double> e(std::size_t{1} << L);
  for (std::size_t c = 0; c < e.size(); ++c) {
    double energy = 0.0;
    for (int i = 0; i < L; ++i) {
      const double zi = ((c >> (L - 1 - i)) & 1) ? -1.0 : 1.0;
      energy += h * zi;
      if (i + 1 < L) {
        const double zj = ((c >> (L - 2 - i)) & 1) ? -1.0 : 1.0;
        energy += J * zi * zj;
      }
    }
    e[c] = energy;
  }
  return e;
}

double commuting_relative_entropy_per_site(int L, double J, double h, double tau, double beta) {
  const auto e = ising_configuration_energies(L, J, h);
  const auto log_z = [&](double b) {
    const double lowest = *std::min_element(e.begin(), e.end());
    double z = 0.0;
    for (double x : e) z += std::exp(-b * (x - lowest));
    return -b * lowest + std::log(z);
  };
  const double lz0 = log_z(beta);
  const double lzt = log_z(beta * (1.0 + tau));
  // S(nu0|nu_tau) = sum p0 (log p0 - log p_tau) = beta tau <E>_0 + log Z_tau - log Z_0.
  double mean = 0.0;
  for (double x : e) mean += std::exp(-beta * x - lz0) * x;
  return (beta * tau * mean + lzt - lz0) / L;
}

namespace {

using C = std::complex<double>;

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

Mat2 axpy(const Mat2& y, double s, const Mat2& x) {
  return {y[0] + s * x[0], y[1] + s * x[1], y[2] + s * x[2], y[3] + s * x[3]};
}

}  // namespace

Mat2 two_level_propagator(const std::function<Mat2(double)>& h, double t0, double t1, int steps) {
  const C mi{0.0, -1.0};
  const auto rhs = [&](double t, const Mat2& u) {
    Mat2 out = mul(h(t), u);
    for (auto& x : out) x *= mi;
    return out;
  };
  Mat2 u{1.0, 0.0, 0.0, 1.0};
  const double dt = (t1 - t0) / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = t0 + k * dt;
    const Mat2 k1 = rhs(t, u);
    const Mat2 k2 = rhs(t + 0.5 * dt, axpy(u, 0.5 * dt, k1));
    const Mat2 k3 = rhs(t + 0.5 * dt, axpy(u, 0.5 * dt, k2));
    const Mat2 k4 = rhs(t + dt, axpy(u, dt, k3));
    for (std::size_t i = 0; i < 4; ++i) u[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return u;
}

}  // namespace adialab::oracle

#pragma once

#include <boost/math/quadrature/gauss.hpp>

#include <array>

namespace adialab::detail {

/// 8-point Gauss-Legendre rule on [-1, 1].
struct Gauss8 {
  std::array<double, 8> nodes{};
  std::array<double, 8> weights{};

  Gauss8() {
    using rule = boost::math::quadrature::gauss<double, 8>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    for (std::size_t k = 0; k < 4; ++k) {
      nodes[3 - k] = -x[k];
      weights[3 - k] = w[k];
      nodes[4 + k] = x[k];
      weights[4 + k] = w[k];
    }
  }

  static const Gauss8& get() {
    static const Gauss8 rule;
    return rule;
  }
};

/// Composite 8-point Gauss-Legendre integral of f over [a, b].
template <typename F>
auto composite_gauss(F&& f, double a, double b, int panels) {
  const auto& g = Gauss8::get();
  const double width = (b - a) / panels;
  decltype(f(a)) total{};
  bool first = true;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * width;
    for (std::size_t k = 0; k < 8; ++k) {
      const double t = lo + 0.5 * width * (g.nodes[k] + 1.0);
      auto term = (0.5 * width * g.weights[k]) * f(t);
      if (first) {
        total = term;
        first = false;
      } else {
        total += term;
      }
    }
  }
  return total;
}

}  // namespace adialab::detail

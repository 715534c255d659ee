#ifndef BVP4_GREENS_VALIDATION_HPP
#define BVP4_GREENS_VALIDATION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bvp4/greens.hpp"
#include "bvp4/quadrature.hpp"

namespace bvp4 {

struct PropertyResult {
  std::string name;
  double violation = 0;
  double tolerance = 0;
  bool passed = false;

  static PropertyResult make(std::string name, double violation, double tolerance) {
    return {std::move(name), violation, tolerance, violation <= tolerance};
  }
};

using KernelSet = std::array<SplitKernel<double>, 4>;

inline KernelSet shipped_kernels() {
  return {split_kernel<double>(0), split_kernel<double>(1), split_kernel<double>(2), split_kernel<double>(3)};
}

/// Checks the defining properties of G_0 and the split representation in `kernels`.
inline std::vector<PropertyResult> verify_green_properties(const KernelSet& kernels, unsigned seed = 20240607u) {
  std::vector<PropertyResult> out;

  double boundary = 0;
  for (int s = 0; s < 100; ++s) {
    const double t = -1.0 + 2.0 * s / 99.0;
    for (int j = 0; j < 2; ++j) {
      boundary = std::max({boundary, std::abs(green_eval(j, -1.0, t)), std::abs(green_eval(j, 1.0, t))});
    }
  }
  out.push_back(PropertyResult::make("boundary vanishing of G0, G1 at x = +-1", boundary, 1e-14));

  constexpr double delta = 1e-8;
  double continuity = 0;
  double jump = 0;
  for (int s = 0; s < 41; ++s) {
    const double x = -0.95 + 1.9 * s / 40.0;
    for (int j = 0; j < 3; ++j) {
      continuity = std::max(continuity, std::abs(green_eval(j, x, x + delta) - green_eval(j, x, x - delta)));
    }
    jump = std::max(jump, std::abs(green_eval(3, x, x + delta) - green_eval(3, x, x - delta) + 1.0));
  }
  out.push_back(PropertyResult::make("continuity of G0, G1, G2 across t = x", continuity, 1e-6));
  out.push_back(PropertyResult::make("t-jump of G3 across t = x equals -1", jump, 1e-6));

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double reconstruction = 0;
  for (int s = 0; s < 400; ++s) {
    const double x = unit(rng);
    const double t = unit(rng);
    for (int j = 0; j < 4; ++j) {
      reconstruction = std::max(reconstruction, std::abs(kernels[static_cast<std::size_t>(j)].value(x, t) -
                                                         green_eval(j, x, t)));
    }
  }
  out.push_back(PropertyResult::make("split-kernel reconstruction at 400 random points", reconstruction, 1e-13));

  double excess = 0;
  for (int j = 0; j < 4; ++j) {
    const auto& k = kernels[static_cast<std::size_t>(j)];
    for (int i = 4 - j; i < 4; ++i) {
      excess = std::max({excess, k.q.row(i).cwiseAbs().maxCoeff(), k.p.row(i).cwiseAbs().maxCoeff()});
    }
  }
  out.push_back(PropertyResult::make("x-degree of G_j branches at most 3 - j", excess, 0.0));
  return out;
}

inline std::vector<PropertyResult> verify_green_properties() { return verify_green_properties(shipped_kernels()); }

/// Quadrature errors of the n-point rule for f on [0, L], L = 1, 1/2, 1/4, ...
struct QuadratureDecay {
  int n = 0;
  std::vector<double> lengths;
  std::vector<double> errors;
};

inline QuadratureDecay quadrature_decay(int n, const std::function<double(double)>& f,
                                        const std::function<double(double)>& primitive, int halvings = 3) {
  if (n < 2) throw DomainError("quadrature_decay: n must be >= 2");
  const auto rule = gauss_rule<double>(n);
  QuadratureDecay d;
  d.n = n;
  double length = 1.0;
  for (int h = 0; h < halvings; ++h, length /= 2) {
    const Vector<double> x = rescaled_nodes(rule, 0.0, length);
    const Vector<double> samples = x.unaryExpr(f);
    d.lengths.push_back(length);
    d.errors.push_back(std::abs(integrate_on(rule, 0.0, length, samples) - (primitive(length) - primitive(0.0))));
  }
  return d;
}

/// Errors below this are treated as rounding, not truncation.
inline constexpr double kQuadratureFloor = 1e-15;

/// Each halving of L must shrink the error of sin(5x) by at least 2^{2n},
/// until it reaches the rounding floor. Violation is the worst required/observed ratio.
inline PropertyResult verify_quadrature_bound(int n, int halvings = 3) {
  const auto d = quadrature_decay(
      n, [](double x) { return std::sin(5 * x); }, [](double x) { return -std::cos(5 * x) / 5; }, halvings);
  const double required = std::ldexp(1.0, 2 * n);
  double violation = 0;
  for (std::size_t i = 1; i < d.errors.size(); ++i) {
    if (d.errors[i] <= kQuadratureFloor) break;
    violation = std::max(violation, required * d.errors[i] / d.errors[i - 1]);
  }
  return PropertyResult::make("quadrature error decay >= 2^" + std::to_string(2 * n) + " per halving (n = " +
                                  std::to_string(n) + ")",
                              violation, 1.0);
}

}  // namespace bvp4

#endif  // BVP4_GREENS_VALIDATION_HPP

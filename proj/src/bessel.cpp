#include <algorithm>
#include <cmath>
#include <vector>

#include "bvp4/errors.hpp"
#include "bvp4/experiments.hpp"

namespace bvp4 {

std::vector<double> bessel_j_sequence(int max_order, double x) {
  if (max_order < 1) throw DomainError("bessel_j_sequence: max_order must be >= 1");
  if (!(x > 0)) throw DomainError("bessel_j_sequence: x must be positive");
  constexpr double kBig = 1e250;
  const double reach = std::max(static_cast<double>(max_order), x);
  int start = static_cast<int>(reach) + 30 + static_cast<int>(std::sqrt(160.0 * reach));
  start += start % 2;

  std::vector<double> j(static_cast<std::size_t>(max_order) + 1, 0.0);
  double above = 0;
  double current = 1e-300;
  double sum = 0;
  for (int k = start; k >= 1; --k) {
    const double below = 2.0 * k / x * current - above;
    above = current;
    current = below;
    if (std::abs(current) > kBig) {
      current /= kBig;
      above /= kBig;
      sum /= kBig;
      for (auto& v : j) v /= kBig;
    }
    // current holds J_{k-1}
    if (k - 1 <= max_order) j[static_cast<std::size_t>(k - 1)] = current;
    if ((k - 1) % 2 == 0 && k - 1 > 0) sum += 2 * current;
  }
  sum += current;
  for (auto& v : j) v /= sum;
  return j;
}

BesselValues bessel_reference(double x) {
  const auto j = bessel_j_sequence(11, x);
  return {j[10], (j[9] - j[11]) / 2};
}

}  // namespace bvp4

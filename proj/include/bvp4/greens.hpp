#ifndef BVP4_GREENS_HPP
#define BVP4_GREENS_HPP

#include <array>
#include <cstdint>

#include "bvp4/errors.hpp"
#include "bvp4/linalg.hpp"

namespace bvp4 {

// Clamped biharmonic Green's function on [-1, 1]:
//
//   G0(x,t) = (1-t)^2 (1+x)^2 (1+2t-2x-tx) / 24   for t > x
//   G0(x,t) = (1-x)^2 (1+t)^2 (1+2x-2t-tx) / 24   for t < x
//
// G_j = d^j G0 / dx^j. Each branch is (x-quadratic) * (x-linear) * (t-only
// factor), so the x-derivatives follow from the product rule directly.

/// G_j(x, t) for j = 0..3. On the diagonal t == x the t < x branch is used.
template <typename Scalar>
Scalar green_eval(int j, Scalar x, Scalar t) {
  if (j < 0 || j > 3) throw DomainError("green_eval: derivative order must be in 0..3");
  Scalar u, du, v, dv, c;
  if (t > x) {
    c = (1 - t) * (1 - t) / Scalar(24);
    u = (1 + x) * (1 + x);
    du = 2 * (1 + x);
    v = (1 + 2 * t) - (2 + t) * x;
    dv = -(2 + t);
  } else {
    c = (1 + t) * (1 + t) / Scalar(24);
    u = (1 - x) * (1 - x);
    du = -2 * (1 - x);
    v = (1 - 2 * t) + (2 - t) * x;
    dv = 2 - t;
  }
  // u'' = 2, u''' = 0, v'' = 0
  switch (j) {
    case 0: return c * u * v;
    case 1: return c * (du * v + u * dv);
    case 2: return c * (2 * v + 2 * du * dv);
    default: return c * 6 * dv;
  }
}

namespace detail {

using IntTable = std::array<std::array<std::int64_t, 4>, 4>;  // [x power][t power]

constexpr IntTable outer(std::array<std::int64_t, 3> xpoly, std::array<std::int64_t, 3> tpoly) {
  IntTable r{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) r[i][k] = xpoly[i] * tpoly[k];
  return r;
}

// Multiplies by (c0 + ct t + cx x + cxt x t).
constexpr IntTable times_bilinear(const IntTable& a, std::int64_t c0, std::int64_t ct, std::int64_t cx,
                                  std::int64_t cxt) {
  IntTable r{};
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      if (a[i][k] == 0) continue;
      r[i][k] += c0 * a[i][k];
      if (k + 1 < 4) r[i][k + 1] += ct * a[i][k];
      if (i + 1 < 4) r[i + 1][k] += cx * a[i][k];
      if (i + 1 < 4 && k + 1 < 4) r[i + 1][k + 1] += cxt * a[i][k];
    }
  }
  return r;
}

constexpr IntTable differentiate_x(const IntTable& a, int j) {
  IntTable r{};
  for (int i = j; i < 4; ++i) {
    std::int64_t f = 1;
    for (int s = 0; s < j; ++s) f *= (i - s);
    for (int k = 0; k < 4; ++k) r[i - j][k] = f * a[i][k];
  }
  return r;
}

// With v = 1 - x, s = 1 + t on t < x and u = 1 + x, w = 1 - t on t > x,
// both branches of 24 G0 read  v^2 s^2 (6 - 3v - 3s + v s)  in their own
// variables. Keeping the endpoint factors explicit avoids cancellation where
// the kernels vanish.
constexpr IntTable kBranch = times_bilinear(outer({0, 0, 1}, {0, 0, 1}), 6, -3, -3, 1);

}  // namespace detail

/// G_j written as sum_i (1-x)^i q_i(1+t) for t < x and sum_i (1+x)^i p_i(1-t)
/// for t > x, with q_i, p_i cubic. Entry (i, k) of q is the coefficient of
/// (1-x)^i (1+t)^k; entry (i, k) of p that of (1+x)^i (1-t)^k. Rows i > 3 - j
/// are zero.
template <typename Scalar>
struct SplitKernel {
  int order = 0;
  Eigen::Matrix<Scalar, 4, 4> q = Eigen::Matrix<Scalar, 4, 4>::Zero();
  Eigen::Matrix<Scalar, 4, 4> p = Eigen::Matrix<Scalar, 4, 4>::Zero();

  int x_powers() const { return 4 - order; }

  Scalar value(Scalar x, Scalar t) const { return t > x ? upper_value(x, t) : lower_value(x, t); }
  Scalar lower_value(Scalar x, Scalar t) const { return branch_value(q, 1 - x, 1 + t); }
  Scalar upper_value(Scalar x, Scalar t) const { return branch_value(p, 1 + x, 1 - t); }

 private:
  static Scalar branch_value(const Eigen::Matrix<Scalar, 4, 4>& c, Scalar a, Scalar b) {
    Scalar sum = 0;
    Scalar ai = 1;
    for (int i = 0; i < 4; ++i) {
      const Scalar row = c(i, 0) + b * (c(i, 1) + b * (c(i, 2) + b * c(i, 3)));
      sum += ai * row;
      ai *= a;
    }
    return sum;
  }
};

template <typename Scalar>
SplitKernel<Scalar> split_kernel(int j) {
  if (j < 0 || j > 3) throw DomainError("split_kernel: derivative order must be in 0..3");
  // d/dx = -d/dv on the lower branch and d/du on the upper one.
  const auto table = detail::differentiate_x(detail::kBranch, j);
  const Scalar lower_sign = j % 2 == 0 ? Scalar(1) : Scalar(-1);
  SplitKernel<Scalar> s;
  s.order = j;
  for (int i = 0; i < 4; ++i) {
    for (int k = 0; k < 4; ++k) {
      s.q(i, k) = lower_sign * Scalar(table[i][k]) / Scalar(24);
      s.p(i, k) = Scalar(table[i][k]) / Scalar(24);
    }
  }
  return s;
}

/// Boundary data (phi(-1), phi(1), phi'(-1), phi'(1)) in that order.
template <typename Scalar>
struct BoundaryData {
  Scalar left_value = 0;
  Scalar right_value = 0;
  Scalar left_slope = 0;
  Scalar right_slope = 0;

  static BoundaryData unit(int which) {
    BoundaryData b;
    b[which] = Scalar(1);
    return b;
  }

  Scalar& operator[](int i) {
    switch (i) {
      case 0: return left_value;
      case 1: return right_value;
      case 2: return left_slope;
      case 3: return right_slope;
    }
    throw DomainError("BoundaryData: index out of range");
  }
  Scalar operator[](int i) const { return const_cast<BoundaryData&>(*this)[i]; }

  bool is_zero() const {
    return left_value == 0 && right_value == 0 && left_slope == 0 && right_slope == 0;
  }
};

/// The four cubics with cardinal clamped boundary data on [-1, 1]:
/// psi_l0 = (1-x)^2 (2+x)/4, psi_r0 = (1+x)^2 (2-x)/4,
/// psi_l1 = (1-x)^2 (x+1)/4, psi_r1 = (1+x)^2 (x-1)/4.
template <typename Scalar>
struct BoundaryCubics {
  // 4 * psi, monomial coefficients in x.
  static constexpr std::array<std::array<int, 4>, 4> kTimesFour = {{
      {2, -3, 0, 1},    // l0
      {2, 3, 0, -1},    // r0
      {1, -1, -1, 1},   // l1
      {-1, -1, 1, 1},   // r1
  }};

  /// d^k/dx^k psi_which(x), which in {0: l0, 1: r0, 2: l1, 3: r1}, k >= 0.
  static Scalar eval(int which, Scalar x, int k) {
    if (k >= 4) return Scalar(0);
    const auto& c = kTimesFour[static_cast<std::size_t>(which)];
    Scalar sum = 0;
    for (int d = 3; d >= k; --d) {
      int f = 1;
      for (int s = 0; s < k; ++s) f *= (d - s);
      sum = sum * x + Scalar(f * c[static_cast<std::size_t>(d)]);
    }
    return sum / Scalar(4);
  }
};

/// psi_alpha^{(k)}(x) = sum of the four cubics weighted by the boundary data.
template <typename Scalar>
Scalar psi_alpha(const BoundaryData<Scalar>& alpha, Scalar x, int k) {
  if (k < 0) throw DomainError("psi_alpha: derivative order must be >= 0");
  Scalar sum = 0;
  for (int i = 0; i < 4; ++i) {
    if (alpha[i] != Scalar(0)) sum += alpha[i] * BoundaryCubics<Scalar>::eval(i, x, k);
  }
  return sum;
}

}  // namespace bvp4

#endif  // BVP4_GREENS_HPP

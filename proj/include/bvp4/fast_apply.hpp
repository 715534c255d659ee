#ifndef BVP4_FAST_APPLY_HPP
#define BVP4_FAST_APPLY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "bvp4/errors.hpp"
#include "bvp4/greens.hpp"
#include "bvp4/linalg.hpp"
#include "bvp4/problem.hpp"
#include "bvp4/quadrature.hpp"

namespace bvp4 {

// Every split branch is a cubic in the distance of t to one endpoint, so all
// kernel integrals reduce to the running moments
//
//   left_k(x)  = int_{-1}^{x} (1+t)^k sigma(t) dt,   right_k(x) = int_{x}^{1} (1-t)^k sigma(t) dt,
//
// and (G_j sigma)(x) = sum_i (1-x)^i q_i . left(x) + (1+x)^i p_i . right(x).
// sigma is identified on each subinterval with the degree n-1 interpolant of
// its node values; integrands then have degree <= n + 2 <= 2n - 1 and n-point
// sub-rules are exact.

/// Moment tables of the n-point rule on the reference interval [-1, 1].
template <typename Scalar>
struct ReferenceMomentTables {
  int n = 0;
  /// Row block l (rows l*n .. l*n+n-1) maps node values to int_{-1}^{y_r} (1+u)^l sigma(u) du.
  Matrix<Scalar> left;
  /// Same layout, int_{y_r}^{1} (1-u)^l sigma(u) du.
  Matrix<Scalar> right;
  /// Row l maps node values to int_{-1}^{1} (1+u)^l sigma(u) du.
  Matrix<Scalar> full_left;
  /// Row l maps node values to int_{-1}^{1} (1-u)^l sigma(u) du.
  Matrix<Scalar> full_right;
};

namespace detail {

/// Row vector mapping node values to the interpolant's value at z.
template <typename Scalar>
Eigen::Matrix<Scalar, 1, Eigen::Dynamic> interpolation_row(const LegendreTransform<Scalar>& transform, Scalar z) {
  const Vector<Scalar> p = legendre_eval<Scalar>(transform.order() - 1, z);
  return p.transpose() * transform.values_to_coeffs_matrix();
}

/// Rows l = 0..3 for int_{-1}^{hi} (1+u)^l sigma(u) du.
template <typename Scalar>
Matrix<Scalar> left_moment_rows(const GaussRule<Scalar>& rule, const LegendreTransform<Scalar>& transform,
                                Scalar hi) {
  const int n = rule.order();
  Matrix<Scalar> rows = Matrix<Scalar>::Zero(4, n);
  const Scalar half = (hi + Scalar(1)) / Scalar(2);
  for (int q = 0; q < n; ++q) {
    const Scalar dist = half * (Scalar(1) + rule.nodes(q));
    const auto interp = interpolation_row(transform, dist - Scalar(1));
    Scalar weight = half * rule.weights(q);
    for (int l = 0; l < 4; ++l) {
      rows.row(l) += weight * interp;
      weight *= dist;
    }
  }
  return rows;
}

/// Rows l = 0..3 for int_{lo}^{1} (1-u)^l sigma(u) du.
template <typename Scalar>
Matrix<Scalar> right_moment_rows(const GaussRule<Scalar>& rule, const LegendreTransform<Scalar>& transform,
                                 Scalar lo) {
  const int n = rule.order();
  Matrix<Scalar> rows = Matrix<Scalar>::Zero(4, n);
  const Scalar half = (Scalar(1) - lo) / Scalar(2);
  for (int q = 0; q < n; ++q) {
    const Scalar dist = half * (Scalar(1) - rule.nodes(q));
    const auto interp = interpolation_row(transform, Scalar(1) - dist);
    Scalar weight = half * rule.weights(q);
    for (int l = 0; l < 4; ++l) {
      rows.row(l) += weight * interp;
      weight *= dist;
    }
  }
  return rows;
}

inline constexpr std::array<std::array<int, 4>, 4> kBinomial = {{
    {1, 0, 0, 0},
    {1, 1, 0, 0},
    {1, 2, 1, 0},
    {1, 3, 3, 1},
}};

/// shift(k, l) = C(k,l) d^{k-l} h^{l+1}: turns reference moments of (1 +- u)^l
/// into moments of (1 +- t)^k when 1 +- t = d + h (1 +- u), dt = h du.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 4> moment_shift(Scalar d, Scalar h) {
  Eigen::Matrix<Scalar, 4, 4> shift = Eigen::Matrix<Scalar, 4, 4>::Zero();
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l <= k; ++l) {
      shift(k, l) = Scalar(kBinomial[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]) *
                    std::pow(d, k - l) * std::pow(h, l + 1);
    }
  }
  return shift;
}

template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> block_column(const Matrix<Scalar>& table, int n, int r, Eigen::Index col) {
  Eigen::Matrix<Scalar, 4, 1> out;
  for (int l = 0; l < 4; ++l) out(l) = table(l * n + r, col);
  return out;
}

}  // namespace detail

template <typename Scalar>
ReferenceMomentTables<Scalar> build_reference_tables(const GaussRule<Scalar>& rule) {
  const int n = rule.order();
  const LegendreTransform<Scalar> transform(rule);
  ReferenceMomentTables<Scalar> t;
  t.n = n;
  t.left.resize(4 * n, n);
  t.right.resize(4 * n, n);
  for (int r = 0; r < n; ++r) {
    const Matrix<Scalar> lrows = detail::left_moment_rows(rule, transform, rule.nodes(r));
    const Matrix<Scalar> rrows = detail::right_moment_rows(rule, transform, rule.nodes(r));
    for (int l = 0; l < 4; ++l) {
      t.left.row(l * n + r) = lrows.row(l);
      t.right.row(l * n + r) = rrows.row(l);
    }
  }
  t.full_left.resize(4, n);
  t.full_right.resize(4, n);
  for (int k = 0; k < n; ++k) {
    Scalar wl = rule.weights(k);
    Scalar wr = rule.weights(k);
    for (int l = 0; l < 4; ++l) {
      t.full_left(l, k) = wl;
      t.full_right(l, k) = wr;
      wl *= Scalar(1) + rule.nodes(k);
      wr *= Scalar(1) - rule.nodes(k);
    }
  }
  return t;
}

/// Everything the O(m n^2) kernel application needs: the mesh, the reference
/// moment tables, the split kernels for j = 0..3, and the endpoint distances.
template <typename Scalar>
struct PartialIntegralTables {
  Mesh<Scalar> mesh;
  ReferenceMomentTables<Scalar> reference;
  std::array<SplitKernel<Scalar>, 4> kernels;
  std::vector<Eigen::Matrix<Scalar, 4, 4>> left_shifts;   // 1 + t = (1 + x_s) + h (1 + u)
  std::vector<Eigen::Matrix<Scalar, 4, 4>> right_shifts;  // 1 - t = (1 - x_{s+1}) + h (1 - u)
  Vector<Scalar> plus;   // 1 + x at the global nodes
  Vector<Scalar> minus;  // 1 - x at the global nodes
};

template <typename Scalar>
PartialIntegralTables<Scalar> build_tables(const Mesh<Scalar>& mesh) {
  PartialIntegralTables<Scalar> t;
  t.mesh = mesh;
  t.reference = build_reference_tables(mesh.rule);
  for (int j = 0; j < 4; ++j) t.kernels[static_cast<std::size_t>(j)] = split_kernel<Scalar>(j);
  const int m = mesh.m;
  const int n = mesh.n;
  const Scalar h = mesh.half_width();
  t.left_shifts.reserve(static_cast<std::size_t>(m));
  t.right_shifts.reserve(static_cast<std::size_t>(m));
  t.plus.resize(mesh.size());
  t.minus.resize(mesh.size());
  for (int s = 0; s < m; ++s) {
    const Scalar d = Scalar(2 * s) / Scalar(m);
    const Scalar e = Scalar(2 * (m - 1 - s)) / Scalar(m);
    t.left_shifts.push_back(detail::moment_shift(d, h));
    t.right_shifts.push_back(detail::moment_shift(e, h));
    for (int r = 0; r < n; ++r) {
      const Eigen::Index idx = static_cast<Eigen::Index>(s) * n + r;
      t.plus(idx) = d + h * (Scalar(1) + mesh.rule.nodes(r));
      t.minus(idx) = e + h * (Scalar(1) - mesh.rule.nodes(r));
    }
  }
  return t;
}

/// Running moments left_k, right_k (k = 0..3) at every global node.
template <typename Scalar>
struct KernelMoments {
  Matrix<Scalar> left;   // 4 x N
  Matrix<Scalar> right;  // 4 x N
};

namespace detail {

/// Whole-subinterval moments of (1+t)^k and (1-t)^k, 4 x m each.
template <typename Scalar>
std::pair<Matrix<Scalar>, Matrix<Scalar>> full_moments(const PartialIntegralTables<Scalar>& tables,
                                                       const Eigen::Map<const Matrix<Scalar>>& by_interval) {
  const int m = tables.mesh.m;
  const Matrix<Scalar> ref_left = tables.reference.full_left * by_interval;
  const Matrix<Scalar> ref_right = tables.reference.full_right * by_interval;
  Matrix<Scalar> left(4, m);
  Matrix<Scalar> right(4, m);
  for (int s = 0; s < m; ++s) {
    left.col(s) = tables.left_shifts[static_cast<std::size_t>(s)] * ref_left.col(s);
    right.col(s) = tables.right_shifts[static_cast<std::size_t>(s)] * ref_right.col(s);
  }
  return {std::move(left), std::move(right)};
}

}  // namespace detail

template <typename Scalar, typename Derived>
KernelMoments<Scalar> kernel_moments(const PartialIntegralTables<Scalar>& tables,
                                     const Eigen::MatrixBase<Derived>& sigma) {
  const auto& mesh = tables.mesh;
  const int m = mesh.m;
  const int n = mesh.n;
  if (sigma.size() != mesh.size()) throw DomainError("kernel_moments: sigma has the wrong length");

  const Vector<Scalar> values = sigma;
  const Eigen::Map<const Matrix<Scalar>> by_interval(values.data(), n, m);
  const Matrix<Scalar> ref_left = tables.reference.left * by_interval;    // 4n x m
  const Matrix<Scalar> ref_right = tables.reference.right * by_interval;  // 4n x m
  const auto [full_left, full_right] = detail::full_moments(tables, by_interval);

  KernelMoments<Scalar> out{Matrix<Scalar>(4, mesh.size()), Matrix<Scalar>(4, mesh.size())};
  Matrix<Scalar> after(4, m);
  after.col(m - 1).setZero();
  for (int s = m - 2; s >= 0; --s) after.col(s) = after.col(s + 1) + full_right.col(s + 1);
  Eigen::Matrix<Scalar, 4, 1> before = Eigen::Matrix<Scalar, 4, 1>::Zero();
  for (int s = 0; s < m; ++s) {
    const auto& lshift = tables.left_shifts[static_cast<std::size_t>(s)];
    const auto& rshift = tables.right_shifts[static_cast<std::size_t>(s)];
    for (int r = 0; r < n; ++r) {
      const Eigen::Index idx = static_cast<Eigen::Index>(s) * n + r;
      out.left.col(idx) = before + lshift * detail::block_column(ref_left, n, r, s);
      out.right.col(idx) = after.col(s) + rshift * detail::block_column(ref_right, n, r, s);
    }
    before += full_left.col(s);
  }
  return out;
}

namespace detail {

/// sum_i minus^i q_i . left + plus^i p_i . right with minus = 1 - x, plus = 1 + x.
template <typename Scalar>
Scalar evaluate_split(const SplitKernel<Scalar>& kernel, Scalar plus, Scalar minus,
                      const Eigen::Matrix<Scalar, 4, 1>& left, const Eigen::Matrix<Scalar, 4, 1>& right) {
  Scalar sum = 0;
  Scalar vi = 1;
  Scalar ui = 1;
  for (int i = 0; i < kernel.x_powers(); ++i) {
    sum += vi * kernel.q.row(i).dot(left) + ui * kernel.p.row(i).dot(right);
    vi *= minus;
    ui *= plus;
  }
  return sum;
}

}  // namespace detail

/// (G_j sigma) at every global node from precomputed moments.
template <typename Scalar>
Vector<Scalar> apply_G(int j, const KernelMoments<Scalar>& moments, const PartialIntegralTables<Scalar>& tables) {
  if (j < 0 || j > 3) throw DomainError("apply_G: j must be in 0..3");
  const auto& kernel = tables.kernels[static_cast<std::size_t>(j)];
  Vector<Scalar> out(tables.mesh.size());
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out(i) = detail::evaluate_split<Scalar>(kernel, tables.plus(i), tables.minus(i), moments.left.col(i),
                                            moments.right.col(i));
  }
  return out;
}

/// (G_j sigma) at every global node. O(m n^2).
template <typename Scalar, typename Derived>
Vector<Scalar> apply_G(int j, const Eigen::MatrixBase<Derived>& sigma, const PartialIntegralTables<Scalar>& tables) {
  return apply_G(j, kernel_moments(tables, sigma), tables);
}

/// sigma + sum_{j<4} a_j (G_j sigma), with `coefficients` the 4 x N table of
/// leading-normalized a_j at the global nodes.
template <typename Scalar, typename Derived>
Vector<Scalar> apply_LG0(const Matrix<Scalar>& coefficients, const Eigen::MatrixBase<Derived>& sigma,
                         const PartialIntegralTables<Scalar>& tables) {
  if (coefficients.rows() != 4 || coefficients.cols() != sigma.size()) {
    throw DomainError("apply_LG0: coefficient table shape mismatch");
  }
  const auto moments = kernel_moments(tables, sigma);
  Vector<Scalar> out = sigma;
  for (int j = 0; j < 4; ++j) {
    out += coefficients.row(j).transpose().cwiseProduct(apply_G(j, moments, tables));
  }
  return out;
}

/// (G_j sigma) at the m + 1 breakpoints, from whole-subinterval moments only. O(m n).
template <typename Scalar, typename Derived>
Vector<Scalar> apply_G_at_breakpoints(int j, const Eigen::MatrixBase<Derived>& sigma,
                                      const PartialIntegralTables<Scalar>& tables) {
  if (j < 0 || j > 3) throw DomainError("apply_G_at_breakpoints: j must be in 0..3");
  const auto& mesh = tables.mesh;
  const int m = mesh.m;
  const int n = mesh.n;
  if (sigma.size() != mesh.size()) throw DomainError("apply_G_at_breakpoints: sigma has the wrong length");
  const Vector<Scalar> values = sigma;
  const Eigen::Map<const Matrix<Scalar>> by_interval(values.data(), n, m);
  const auto [full_left, full_right] = detail::full_moments(tables, by_interval);

  Matrix<Scalar> after(4, m + 1);
  after.col(m).setZero();
  for (int s = m - 1; s >= 0; --s) after.col(s) = after.col(s + 1) + full_right.col(s);
  const auto& kernel = tables.kernels[static_cast<std::size_t>(j)];
  Vector<Scalar> out(m + 1);
  Eigen::Matrix<Scalar, 4, 1> before = Eigen::Matrix<Scalar, 4, 1>::Zero();
  for (int s = 0; s <= m; ++s) {
    const Scalar plus = Scalar(2 * s) / Scalar(m);
    const Scalar minus = Scalar(2 * (m - s)) / Scalar(m);
    out(s) = detail::evaluate_split<Scalar>(kernel, plus, minus, before, after.col(s));
    if (s < m) before += full_left.col(s);
  }
  return out;
}

/// (G_j sigma)(x) at an arbitrary x in [-1, 1]; the partial integral inside the
/// containing subinterval is formed on the fly. O(m n + n^2).
template <typename Scalar, typename Derived>
Scalar apply_G_at(int j, const Eigen::MatrixBase<Derived>& sigma, const PartialIntegralTables<Scalar>& tables,
                  Scalar x) {
  if (j < 0 || j > 3) throw DomainError("apply_G_at: j must be in 0..3");
  if (!(x >= Scalar(-1) && x <= Scalar(1))) throw DomainError("apply_G_at: x outside [-1, 1]");
  const auto& mesh = tables.mesh;
  const int n = mesh.n;
  int containing = static_cast<int>(std::floor((x + Scalar(1)) / mesh.width()));
  containing = std::clamp(containing, 0, mesh.m - 1);

  const LegendreTransform<Scalar> transform(mesh.rule);
  Eigen::Matrix<Scalar, 4, 1> left = Eigen::Matrix<Scalar, 4, 1>::Zero();
  Eigen::Matrix<Scalar, 4, 1> right = Eigen::Matrix<Scalar, 4, 1>::Zero();
  for (int s = 0; s < mesh.m; ++s) {
    const auto seg = sigma.segment(static_cast<Eigen::Index>(s) * n, n);
    const auto& lshift = tables.left_shifts[static_cast<std::size_t>(s)];
    const auto& rshift = tables.right_shifts[static_cast<std::size_t>(s)];
    if (s == containing) {
      const Scalar u = std::clamp((x - mesh.center(s)) / mesh.half_width(), Scalar(-1), Scalar(1));
      left += lshift * (detail::left_moment_rows(mesh.rule, transform, u) * seg);
      right += rshift * (detail::right_moment_rows(mesh.rule, transform, u) * seg);
    } else if (s < containing) {
      left += lshift * (tables.reference.full_left * seg);
    } else {
      right += rshift * (tables.reference.full_right * seg);
    }
  }
  return detail::evaluate_split<Scalar>(tables.kernels[static_cast<std::size_t>(j)], Scalar(1) + x,
                                        Scalar(1) - x, left, right);
}

/// Reference-interval matrices S_j with (S_j sigma)_r = int_{-1}^{1} G_j(y_r, t)
/// sigma(t) dt for the node interpolant of sigma, integrated exactly on both
/// sides of the diagonal.
template <typename Scalar>
std::array<Matrix<Scalar>, 4> local_integration_matrices(const GaussRule<Scalar>& rule,
                                                         const ReferenceMomentTables<Scalar>& reference) {
  const int n = rule.order();
  std::array<Matrix<Scalar>, 4> s;
  for (int j = 0; j < 4; ++j) {
    const auto kernel = split_kernel<Scalar>(j);
    Matrix<Scalar> out = Matrix<Scalar>::Zero(n, n);
    for (int r = 0; r < n; ++r) {
      const Scalar minus = Scalar(1) - rule.nodes(r);
      const Scalar plus = Scalar(1) + rule.nodes(r);
      Scalar vi = 1;
      Scalar ui = 1;
      for (int i = 0; i < kernel.x_powers(); ++i) {
        for (int l = 0; l < 4; ++l) {
          out.row(r) += vi * kernel.q(i, l) * reference.left.row(l * n + r) +
                        ui * kernel.p(i, l) * reference.right.row(l * n + r);
        }
        vi *= minus;
        ui *= plus;
      }
    }
    s[static_cast<std::size_t>(j)] = std::move(out);
  }
  return s;
}

}  // namespace bvp4

#endif  // BVP4_FAST_APPLY_HPP

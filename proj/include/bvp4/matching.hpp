#ifndef BVP4_MATCHING_HPP
#define BVP4_MATCHING_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "bvp4/errors.hpp"
#include "bvp4/greens.hpp"
#include "bvp4/linalg.hpp"
#include "bvp4/local_solver.hpp"

namespace bvp4 {

// Unknowns beta_{i,1..4} for subintervals i = 1..m, column 4(i-1) + (j-1).
// Rows, left to right:
//   beta_{1,1} = alpha_l0 - phi~_1(-1)
//   beta_{1,3} = alpha_l1 - phi~_1'(-1)
//   for each interface x_{i+1}, derivative orders k = 0..3:
//     sum_j beta_{i,j} g_{i,j}^{(k)}(x_{i+1}) - sum_j beta_{i+1,j} g_{i+1,j}^{(k)}(x_{i+1})
//         = phi~_{i+1}^{(k)}(x_{i+1}) - phi~_i^{(k)}(x_{i+1})
//   beta_{m,2} = alpha_r0 - phi~_m(1)
//   beta_{m,4} = alpha_r1 - phi~_m'(1)
// With this ordering the matrix has 5 sub- and 3 super-diagonals.
inline constexpr int kMatchingLower = 5;
inline constexpr int kMatchingUpper = 3;

/// beta_{i,j} ordered beta_{1,1}, beta_{1,2}, ..., beta_{m,4}.
template <typename Scalar>
struct MatchingCoefficients {
  Vector<Scalar> beta;

  int subintervals() const { return static_cast<int>(beta.size() / 4); }
  Scalar operator()(int i, int j) const { return beta(4 * i + j); }  // zero-based
};

template <typename Scalar>
struct MatchingSystem {
  BandedMatrix<Scalar> matrix;
  Vector<Scalar> rhs;
};

namespace detail {

/// Local-coordinate derivative data times (1/h)^k, h the half width.
template <typename Scalar>
Eigen::Matrix<Scalar, 4, 1> to_global(const Eigen::Matrix<Scalar, 4, 1>& local, Scalar half_width) {
  Eigen::Matrix<Scalar, 4, 1> out = local;
  Scalar f = 1;
  for (int k = 0; k < 4; ++k) {
    out(k) *= f;
    f /= half_width;
  }
  return out;
}

}  // namespace detail

/// The banded matrix, which depends only on the homogeneous bases.
template <typename Scalar>
BandedMatrix<Scalar> matching_matrix(const std::vector<HomogeneousBasis<Scalar>>& bases, Scalar half_width) {
  const int m = static_cast<int>(bases.size());
  if (m < 1) throw DomainError("matching_matrix: need at least one subinterval");
  BandedMatrix<Scalar> a(4 * static_cast<Eigen::Index>(m), kMatchingLower, kMatchingUpper);
  a.at(0, 0) = Scalar(1);
  a.at(1, 2) = Scalar(1);
  // Value and slope rows only see the cardinal members; the exact zeros of the
  // other members may fall outside the band.
  const auto add = [&a](Eigen::Index row, Eigen::Index col, Scalar v) {
    if (v != Scalar(0) || a.in_band(row, col)) a.at(row, col) += v;
  };
  for (int i = 0; i + 1 < m; ++i) {
    const auto row0 = 2 + 4 * i;
    for (int j = 0; j < 4; ++j) {
      const auto& gl = bases[static_cast<std::size_t>(i)].members[static_cast<std::size_t>(j)];
      const auto& gr = bases[static_cast<std::size_t>(i + 1)].members[static_cast<std::size_t>(j)];
      const auto right_of_left = detail::to_global<Scalar>(gl.right, half_width);
      const auto left_of_right = detail::to_global<Scalar>(gr.left, half_width);
      for (int k = 0; k < 4; ++k) {
        add(row0 + k, 4 * i + j, right_of_left(k));
        add(row0 + k, 4 * (i + 1) + j, -left_of_right(k));
      }
    }
  }
  const auto last = 4 * static_cast<Eigen::Index>(m);
  a.at(last - 2, last - 3) = Scalar(1);
  a.at(last - 1, last - 1) = Scalar(1);
  return a;
}

/// The right-hand side for given local solutions and global boundary data.
template <typename Scalar>
Vector<Scalar> matching_rhs(const std::vector<LocalSolution<Scalar>>& tilde, const BoundaryData<Scalar>& alpha,
                            Scalar half_width) {
  const int m = static_cast<int>(tilde.size());
  Vector<Scalar> r(4 * static_cast<Eigen::Index>(m));
  const auto first = detail::to_global<Scalar>(tilde.front().left, half_width);
  const auto final = detail::to_global<Scalar>(tilde.back().right, half_width);
  r(0) = alpha.left_value - first(0);
  r(1) = alpha.left_slope - first(1);
  for (int i = 0; i + 1 < m; ++i) {
    const auto right_of_left = detail::to_global<Scalar>(tilde[static_cast<std::size_t>(i)].right, half_width);
    const auto left_of_right = detail::to_global<Scalar>(tilde[static_cast<std::size_t>(i + 1)].left, half_width);
    for (int k = 0; k < 4; ++k) r(2 + 4 * i + k) = left_of_right(k) - right_of_left(k);
  }
  r(4 * m - 2) = alpha.right_value - final(0);
  r(4 * m - 1) = alpha.right_slope - final(1);
  return r;
}

template <typename Scalar>
MatchingSystem<Scalar> assemble_matching(const std::vector<LocalSolution<Scalar>>& tilde,
                                         const std::vector<HomogeneousBasis<Scalar>>& bases,
                                         const BoundaryData<Scalar>& alpha, Scalar half_width) {
  if (tilde.size() != bases.size()) throw DomainError("assemble_matching: size mismatch");
  return {matching_matrix(bases, half_width), matching_rhs(tilde, alpha, half_width)};
}

/// Row-equilibrated banded LU of the matching matrix, reusable across
/// right-hand sides.
template <typename Scalar>
class MatchingFactor {
 public:
  explicit MatchingFactor(BandedMatrix<Scalar> matrix) {
    row_scale_ = matrix.equilibrate_rows();
    try {
      lu_.emplace(matrix);
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError(std::string("matching system is singular (homogeneous data linearly dependent): ") +
                                e.what());
    }
  }

  MatchingCoefficients<Scalar> solve(const Vector<Scalar>& rhs) const {
    return {lu_->solve(rhs.cwiseQuotient(row_scale_))};
  }

 private:
  Vector<Scalar> row_scale_;
  std::optional<BandedLU<Scalar>> lu_;
};

template <typename Scalar>
MatchingCoefficients<Scalar> solve_matching(const MatchingSystem<Scalar>& system) {
  return MatchingFactor<Scalar>(system.matrix).solve(system.rhs);
}

/// The glued solution at all global nodes, in global [-1, 1] coordinates.
template <typename Scalar>
struct CombinedSolution {
  Matrix<Scalar> derivatives;  // 5 x (m n), rows k = 0..4
  Matrix<Scalar> left;         // 4 x m: phi_i^{(k)} at x_i
  Matrix<Scalar> right;        // 4 x m: phi_i^{(k)} at x_{i+1}

  auto sigma() const { return derivatives.row(4).transpose(); }
};

/// phi_i^{(k)} = phi~_i^{(k)} + sum_j beta_{i,j} g_{i,j}^{(k)}, k = 0..4.
template <typename Scalar>
CombinedSolution<Scalar> combine(const std::vector<LocalSolution<Scalar>>& tilde,
                                 const std::vector<HomogeneousBasis<Scalar>>& bases,
                                 const MatchingCoefficients<Scalar>& beta, Scalar half_width) {
  const int m = static_cast<int>(tilde.size());
  if (m == 0 || bases.size() != tilde.size() || beta.subintervals() != m) {
    throw DomainError("combine: size mismatch");
  }
  const auto n = tilde.front().sigma.size();
  CombinedSolution<Scalar> out{Matrix<Scalar>(5, m * n), Matrix<Scalar>(4, m), Matrix<Scalar>(4, m)};
  for (int i = 0; i < m; ++i) {
    const auto& t = tilde[static_cast<std::size_t>(i)];
    if (t.derivatives.size() == 0) throw DomainError("combine: local solution lacks node derivatives");
    Matrix<Scalar> values = t.derivatives;
    Eigen::Matrix<Scalar, 4, 1> left = t.left;
    Eigen::Matrix<Scalar, 4, 1> right = t.right;
    for (int j = 0; j < 4; ++j) {
      const auto& g = bases[static_cast<std::size_t>(i)].members[static_cast<std::size_t>(j)];
      const Scalar b = beta(i, j);
      values += b * g.derivatives;
      left += b * g.left;
      right += b * g.right;
    }
    Scalar f = 1;
    for (int k = 0; k < 5; ++k) {
      values.row(k) *= f;
      if (k < 4) {
        left(k) *= f;
        right(k) *= f;
      }
      f /= half_width;
    }
    out.derivatives.block(0, i * n, 5, n) = values;
    out.left.col(i) = left;
    out.right.col(i) = right;
  }
  return out;
}

}  // namespace bvp4

#endif  // BVP4_MATCHING_HPP

#ifndef BVP4_LOCAL_SOLVER_HPP
#define BVP4_LOCAL_SOLVER_HPP

#include <array>
#include <optional>

#include "bvp4/errors.hpp"
#include "bvp4/fast_apply.hpp"
#include "bvp4/greens.hpp"
#include "bvp4/linalg.hpp"
#include "bvp4/quadrature.hpp"

namespace bvp4 {

/// How the local matrices approximate int G_j(y_i, t) sigma(t) dt.
enum class LocalIntegration {
  nystrom,  // G_j(y_i, y_k) w_k, with the mean of both branches of G3 at y_k = y_i
  exact,    // exact for the node interpolant of sigma, split at t = y_i
};

/// Reference-interval data shared by every subinterval with the same rule.
template <typename Scalar>
struct LocalOperator {
  GaussRule<Scalar> rule;
  LocalIntegration mode = LocalIntegration::nystrom;
  /// integration[j] * sigma approximates (G_j sigma) at the nodes.
  std::array<Matrix<Scalar>, 4> integration;
  /// Rows G_j(-1, y_k) w_k and G_j(1, y_k) w_k (j = 0..3); the kernels are
  /// smooth in t there, so plain Gauss quadrature is exact.
  Matrix<Scalar> left_rows;
  Matrix<Scalar> right_rows;
  /// psi[i](k, r) = psi_i^{(k)}(y_r) for the four boundary cubics.
  std::array<Matrix<Scalar>, 4> psi;

  int order() const { return rule.order(); }

  static LocalOperator build(const GaussRule<Scalar>& rule, LocalIntegration mode = LocalIntegration::nystrom) {
    LocalOperator op;
    op.rule = rule;
    op.mode = mode;
    const int n = rule.order();
    if (mode == LocalIntegration::exact) {
      op.integration = local_integration_matrices(rule, build_reference_tables(rule));
    } else {
      for (int j = 0; j < 4; ++j) {
        Matrix<Scalar> g(n, n);
        for (int i = 0; i < n; ++i)
          for (int k = 0; k < n; ++k) g(i, k) = green_eval<Scalar>(j, rule.nodes(i), rule.nodes(k)) * rule.weights(k);
        // G3 jumps by -1 across t = x; the diagonal takes the mean of both sides.
        if (j == 3) g.diagonal() -= Scalar(0.5) * rule.weights;
        op.integration[static_cast<std::size_t>(j)] = std::move(g);
      }
    }
    op.left_rows.resize(4, n);
    op.right_rows.resize(4, n);
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < n; ++k) {
        op.left_rows(j, k) = green_eval<Scalar>(j, Scalar(-1), rule.nodes(k)) * rule.weights(k);
        op.right_rows(j, k) = green_eval<Scalar>(j, Scalar(1), rule.nodes(k)) * rule.weights(k);
      }
    }
    for (int i = 0; i < 4; ++i) {
      Matrix<Scalar> table(4, n);
      for (int k = 0; k < 4; ++k)
        for (int r = 0; r < n; ++r) table(k, r) = BoundaryCubics<Scalar>::eval(i, rule.nodes(r), k);
      op.psi[static_cast<std::size_t>(i)] = std::move(table);
    }
    return op;
  }

  /// psi_alpha^{(k)} at the nodes, rows k = 0..3.
  Matrix<Scalar> psi_at_nodes(const BoundaryData<Scalar>& alpha) const {
    Matrix<Scalar> out = Matrix<Scalar>::Zero(4, order());
    for (int i = 0; i < 4; ++i) {
      if (alpha[i] != Scalar(0)) out += alpha[i] * psi[static_cast<std::size_t>(i)];
    }
    return out;
  }
};

/// The discretized second-kind equation on one subinterval (in local
/// coordinates): A = I + sum_j diag(a_j) S_j. The rows are scaled to unit
/// norm before the QR factorization, since a_j / a_4 may vary by many orders
/// of magnitude across a subinterval.
template <typename Scalar>
struct LocalSystem {
  int index = 0;
  Matrix<Scalar> coefficients;  // 4 x n, leading-normalized, subinterval-rescaled
  Matrix<Scalar> matrix;
  Vector<Scalar> row_scale;
  std::optional<DenseFactor<Scalar>> factor;
};

template <typename Scalar>
LocalSystem<Scalar> assemble_local(const Matrix<Scalar>& coefficients, const LocalOperator<Scalar>& op,
                                   int index = 0) {
  const int n = op.order();
  if (coefficients.rows() != 4 || coefficients.cols() != n) {
    throw DomainError("assemble_local: coefficient table must be 4 x n");
  }
  LocalSystem<Scalar> sys;
  sys.index = index;
  sys.coefficients = coefficients;
  sys.matrix = Matrix<Scalar>::Identity(n, n);
  for (int j = 0; j < 4; ++j) {
    sys.matrix += coefficients.row(j).transpose().asDiagonal() * op.integration[static_cast<std::size_t>(j)];
  }
  sys.row_scale = sys.matrix.rowwise().norm();
  if (!(sys.row_scale.minCoeff() > Scalar(0))) throw SingularMatrixError("assemble_local: zero row");
  sys.factor.emplace(sys.row_scale.cwiseInverse().asDiagonal() * sys.matrix);
  return sys;
}

/// Solution of one local problem, in the subinterval's local coordinates.
template <typename Scalar>
struct LocalSolution {
  Vector<Scalar> sigma;                  // phi'''' at the nodes
  Matrix<Scalar> derivatives;            // 5 x n, rows k = 0..4 (empty if not requested)
  Eigen::Matrix<Scalar, 4, 1> left;      // phi^{(k)}(-1), k = 0..3
  Eigen::Matrix<Scalar, 4, 1> right;     // phi^{(k)}(+1), k = 0..3
};

/// Solves L phi = f on [-1, 1] with clamped data alpha: A sigma = f - L psi_alpha,
/// then phi^{(j)} = G_j sigma + psi_alpha^{(j)}.
template <typename Scalar, typename Derived>
LocalSolution<Scalar> solve_local(const LocalSystem<Scalar>& sys, const LocalOperator<Scalar>& op,
                                  const Eigen::MatrixBase<Derived>& f, const BoundaryData<Scalar>& alpha,
                                  bool node_derivatives = true) {
  const int n = op.order();
  if (f.size() != n) throw DomainError("solve_local: rhs has the wrong length");
  if (!f.allFinite()) throw DomainError("solve_local: non-finite rhs");
  const bool has_alpha = !alpha.is_zero();
  Matrix<Scalar> psi;
  Vector<Scalar> rhs = f;
  if (has_alpha) {
    psi = op.psi_at_nodes(alpha);
    for (int j = 0; j < 4; ++j) rhs -= sys.coefficients.row(j).transpose().cwiseProduct(psi.row(j).transpose());
  }
  LocalSolution<Scalar> out;
  out.sigma = sys.factor->solve(rhs.cwiseQuotient(sys.row_scale));
  out.left = op.left_rows * out.sigma;
  out.right = op.right_rows * out.sigma;
  if (has_alpha) {
    for (int k = 0; k < 4; ++k) {
      out.left(k) += psi_alpha(alpha, Scalar(-1), k);
      out.right(k) += psi_alpha(alpha, Scalar(1), k);
    }
  }
  if (node_derivatives) {
    out.derivatives.resize(5, n);
    for (int j = 0; j < 4; ++j) {
      out.derivatives.row(j) = (op.integration[static_cast<std::size_t>(j)] * out.sigma).transpose();
      if (has_alpha) out.derivatives.row(j) += psi.row(j);
    }
    out.derivatives.row(4) = out.sigma.transpose();
  }
  return out;
}

/// Four solutions of L g = 0 with cardinal clamped data. `slope_scale` is
/// half the subinterval width, so that g_3'(left) = g_4'(right) = 1 hold in
/// the subinterval's own coordinates rather than the local ones.
template <typename Scalar>
struct HomogeneousBasis {
  std::array<LocalSolution<Scalar>, 4> members;
};

template <typename Scalar>
HomogeneousBasis<Scalar> homogeneous_basis(const LocalSystem<Scalar>& sys, const LocalOperator<Scalar>& op,
                                           Scalar slope_scale = Scalar(1)) {
  HomogeneousBasis<Scalar> basis;
  const Vector<Scalar> zero = Vector<Scalar>::Zero(op.order());
  for (int i = 0; i < 4; ++i) {
    BoundaryData<Scalar> alpha = BoundaryData<Scalar>::unit(i);
    if (i >= 2) alpha[i] = slope_scale;
    basis.members[static_cast<std::size_t>(i)] = solve_local(sys, op, zero, alpha);
  }
  return basis;
}

}  // namespace bvp4

#endif  // BVP4_LOCAL_SOLVER_HPP

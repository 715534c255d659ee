#ifndef BVP4_LINALG_HPP
#define BVP4_LINALG_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bvp4/errors.hpp"

namespace bvp4 {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Pivots smaller than this multiple of machine epsilon, relative to the
/// largest row norm of the matrix, are treated as exact zeros.
template <typename Scalar>
constexpr Scalar singular_threshold_factor() {
  return Scalar(1e3) * std::numeric_limits<Scalar>::epsilon();
}

namespace detail {

template <typename Derived>
typename Derived::Scalar max_row_norm(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() == 0) return Scalar(0);
  return a.rowwise().norm().maxCoeff();
}

}  // namespace detail

/// Householder QR of a square matrix. Immutable once constructed.
template <typename Scalar>
class DenseFactor {
 public:
  explicit DenseFactor(const Matrix<Scalar>& a) : qr_(a) {
    if (a.rows() != a.cols() || a.rows() == 0) {
      throw DomainError("qr_factor: matrix must be square and non-empty");
    }
    if (!a.allFinite()) throw DomainError("qr_factor: non-finite entry");
    const Scalar scale = detail::max_row_norm(a);
    const Scalar tol = singular_threshold_factor<Scalar>() * scale;
    const auto& r = qr_.matrixQR();
    for (Eigen::Index i = 0; i < r.rows(); ++i) {
      if (!(std::abs(r(i, i)) >= tol) || scale == Scalar(0)) {
        throw SingularMatrixError("qr_factor: matrix is singular to working precision (R(" +
                                  std::to_string(i) + "," + std::to_string(i) + ") below threshold)");
      }
    }
  }

  Eigen::Index order() const { return qr_.rows(); }

  template <typename Rhs>
  Vector<Scalar> solve(const Eigen::MatrixBase<Rhs>& b) const {
    if (b.rows() != order()) throw DomainError("DenseFactor::solve: size mismatch");
    return qr_.solve(b);
  }

  template <typename Rhs>
  Matrix<Scalar> solve_many(const Eigen::MatrixBase<Rhs>& b) const {
    if (b.rows() != order()) throw DomainError("DenseFactor::solve_many: size mismatch");
    return qr_.solve(b);
  }

 private:
  Eigen::HouseholderQR<Matrix<Scalar>> qr_;
};

template <typename Scalar>
DenseFactor<Scalar> qr_factor(const Matrix<Scalar>& a) {
  return DenseFactor<Scalar>(a);
}

/// Square matrix stored by diagonals. Entry (i, j) lives at
/// band(i, j - i + lower) for -lower <= j - i <= upper.
template <typename Scalar>
class BandedMatrix {
 public:
  BandedMatrix(Eigen::Index order, int lower, int upper)
      : order_(order), lower_(lower), upper_(upper),
        band_(Matrix<Scalar>::Zero(order, lower + upper + 1)) {
    if (order < 1 || lower < 0 || upper < 0) {
      throw DomainError("BandedMatrix: invalid shape");
    }
  }

  Eigen::Index order() const { return order_; }
  int lower_bandwidth() const { return lower_; }
  int upper_bandwidth() const { return upper_; }
  int diagonals() const { return lower_ + upper_ + 1; }

  bool in_band(Eigen::Index i, Eigen::Index j) const {
    const auto d = j - i;
    return i >= 0 && i < order_ && j >= 0 && j < order_ && d >= -lower_ && d <= upper_;
  }

  Scalar operator()(Eigen::Index i, Eigen::Index j) const {
    return in_band(i, j) ? band_(i, j - i + lower_) : Scalar(0);
  }

  /// Writable reference; throws if (i, j) is structurally zero.
  Scalar& at(Eigen::Index i, Eigen::Index j) {
    if (!in_band(i, j)) {
      throw DomainError("BandedMatrix: entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is outside the band");
    }
    return band_(i, j - i + lower_);
  }

  Matrix<Scalar> to_dense() const {
    Matrix<Scalar> a = Matrix<Scalar>::Zero(order_, order_);
    for (Eigen::Index i = 0; i < order_; ++i) {
      const auto j0 = std::max<Eigen::Index>(0, i - lower_);
      const auto j1 = std::min<Eigen::Index>(order_ - 1, i + upper_);
      for (auto j = j0; j <= j1; ++j) a(i, j) = band_(i, j - i + lower_);
    }
    return a;
  }

  template <typename Rhs>
  Vector<Scalar> multiply(const Eigen::MatrixBase<Rhs>& x) const {
    Vector<Scalar> y = Vector<Scalar>::Zero(order_);
    for (Eigen::Index i = 0; i < order_; ++i) {
      const auto j0 = std::max<Eigen::Index>(0, i - lower_);
      const auto j1 = std::min<Eigen::Index>(order_ - 1, i + upper_);
      for (auto j = j0; j <= j1; ++j) y(i) += band_(i, j - i + lower_) * x(j);
    }
    return y;
  }

  Scalar max_row_norm() const { return detail::max_row_norm(band_); }

  /// Divides each row by its largest magnitude entry; returns the scale factors.
  Vector<Scalar> equilibrate_rows() {
    Vector<Scalar> scale(order_);
    for (Eigen::Index i = 0; i < order_; ++i) {
      const Scalar s = band_.row(i).cwiseAbs().maxCoeff();
      scale(i) = s > Scalar(0) ? s : Scalar(1);
      band_.row(i) /= scale(i);
    }
    return scale;
  }

 private:
  Eigen::Index order_;
  int lower_;
  int upper_;
  Matrix<Scalar> band_;
};

/// LU factorization with partial pivoting of a BandedMatrix. Row interchanges
/// widen the stored upper band from `upper` to `upper + lower`.
template <typename Scalar>
class BandedLU {
 public:
  explicit BandedLU(const BandedMatrix<Scalar>& a)
      : n_(a.order()), kl_(a.lower_bandwidth()), ku_(a.upper_bandwidth() + a.lower_bandwidth()),
        lu_(Matrix<Scalar>::Zero(a.order(), 2 * a.lower_bandwidth() + a.upper_bandwidth() + 1)),
        pivots_(static_cast<std::size_t>(a.order())) {
    for (Eigen::Index i = 0; i < n_; ++i) {
      const auto j0 = std::max<Eigen::Index>(0, i - kl_);
      const auto j1 = std::min<Eigen::Index>(n_ - 1, i + a.upper_bandwidth());
      for (auto j = j0; j <= j1; ++j) ref(i, j) = a(i, j);
    }
    const Scalar tol = singular_threshold_factor<Scalar>() * a.max_row_norm();

    for (Eigen::Index k = 0; k < n_; ++k) {
      const auto last_row = std::min<Eigen::Index>(n_ - 1, k + kl_);
      const auto last_col = std::min<Eigen::Index>(n_ - 1, k + ku_);
      Eigen::Index p = k;
      Scalar best = std::abs(ref(k, k));
      for (auto i = k + 1; i <= last_row; ++i) {
        if (std::abs(ref(i, k)) > best) {
          best = std::abs(ref(i, k));
          p = i;
        }
      }
      pivots_[static_cast<std::size_t>(k)] = p;
      if (!(best >= tol) || best == Scalar(0)) {
        throw SingularMatrixError("banded LU: pivot " + std::to_string(k) +
                                  " is singular to working precision");
      }
      if (p != k) {
        for (auto j = k; j <= last_col; ++j) std::swap(ref(k, j), ref(p, j));
      }
      const Scalar pivot = ref(k, k);
      for (auto i = k + 1; i <= last_row; ++i) {
        const Scalar l = ref(i, k) / pivot;
        ref(i, k) = l;
        if (l == Scalar(0)) continue;
        for (auto j = k + 1; j <= last_col; ++j) ref(i, j) -= l * ref(k, j);
      }
    }
  }

  Eigen::Index order() const { return n_; }

  template <typename Rhs>
  Vector<Scalar> solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    if (rhs.rows() != n_) throw DomainError("BandedLU::solve: size mismatch");
    Vector<Scalar> x = rhs;
    for (Eigen::Index k = 0; k < n_; ++k) {
      const auto p = pivots_[static_cast<std::size_t>(k)];
      if (p != k) std::swap(x(k), x(p));
      const auto last_row = std::min<Eigen::Index>(n_ - 1, k + kl_);
      for (auto i = k + 1; i <= last_row; ++i) x(i) -= cref(i, k) * x(k);
    }
    for (Eigen::Index k = n_ - 1; k >= 0; --k) {
      const auto last_col = std::min<Eigen::Index>(n_ - 1, k + ku_);
      Scalar s = x(k);
      for (auto j = k + 1; j <= last_col; ++j) s -= cref(k, j) * x(j);
      x(k) = s / cref(k, k);
    }
    return x;
  }

 private:
  Scalar& ref(Eigen::Index i, Eigen::Index j) { return lu_(i, j - i + kl_); }
  Scalar cref(Eigen::Index i, Eigen::Index j) const { return lu_(i, j - i + kl_); }

  Eigen::Index n_;
  int kl_;
  int ku_;
  Matrix<Scalar> lu_;
  std::vector<Eigen::Index> pivots_;
};

/// Solves B x = rhs with banded partial-pivoting LU. Linear cost in the order.
template <typename Scalar, typename Rhs>
Vector<Scalar> banded_factor_solve(const BandedMatrix<Scalar>& b, const Eigen::MatrixBase<Rhs>& rhs) {
  return BandedLU<Scalar>(b).solve(rhs);
}

}  // namespace bvp4

#endif  // BVP4_LINALG_HPP

#ifndef BVP4_QUADRATURE_HPP
#define BVP4_QUADRATURE_HPP

#include <cmath>
#include <limits>
#include <numbers>

#include "bvp4/errors.hpp"
#include "bvp4/linalg.hpp"

namespace bvp4 {

/// Values P_0(x) ... P_{n_max}(x) by the three-term recurrence.
template <typename Scalar>
Vector<Scalar> legendre_eval(int n_max, Scalar x) {
  Vector<Scalar> p(n_max + 1);
  p(0) = Scalar(1);
  if (n_max >= 1) p(1) = x;
  for (int k = 1; k < n_max; ++k) {
    p(k + 1) = (Scalar(2 * k + 1) * x * p(k) - Scalar(k) * p(k - 1)) / Scalar(k + 1);
  }
  return p;
}

namespace detail {

/// P_n(x) and P_n'(x) for |x| < 1.
template <typename Scalar>
void legendre_with_derivative(int n, Scalar x, Scalar& p, Scalar& dp) {
  Scalar p0 = Scalar(1);
  Scalar p1 = x;
  if (n == 0) {
    p = p0;
    dp = Scalar(0);
    return;
  }
  for (int k = 1; k < n; ++k) {
    const Scalar p2 = (Scalar(2 * k + 1) * x * p1 - Scalar(k) * p0) / Scalar(k + 1);
    p0 = p1;
    p1 = p2;
  }
  p = p1;
  dp = Scalar(n) * (x * p1 - p0) / (x * x - Scalar(1));
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [-1, 1]; nodes increasing.
template <typename Scalar>
struct GaussRule {
  Vector<Scalar> nodes;
  Vector<Scalar> weights;

  int order() const { return static_cast<int>(nodes.size()); }
};

/// Nodes by Newton iteration on P_n from Chebyshev-type initial guesses.
template <typename Scalar>
GaussRule<Scalar> gauss_rule(int n) {
  if (n < 1) throw DomainError("gauss_rule: n must be >= 1");
  constexpr Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar pi = std::numbers::pi_v<Scalar>;
  GaussRule<Scalar> rule{Vector<Scalar>(n), Vector<Scalar>(n)};
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // i-th largest root.
    Scalar x = std::cos(pi * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar p = 0, dp = 1;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      detail::legendre_with_derivative(n, x, p, dp);
      const Scalar dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= Scalar(2) * eps * std::max(Scalar(1), std::abs(x))) {
        converged = true;
        break;
      }
    }
    detail::legendre_with_derivative(n, x, p, dp);
    if (!converged && std::abs(p) > Scalar(10) * eps) {
      throw ConvergenceError("gauss_rule: Newton iteration did not converge");
    }
    // Odd n: the middle root is exactly 0.
    if (n % 2 == 1 && i == half - 1) {
      x = Scalar(0);
      detail::legendre_with_derivative(n, x, p, dp);
    }
    const Scalar w = Scalar(2) / ((Scalar(1) - x * x) * dp * dp);
    rule.nodes(n - 1 - i) = x;
    rule.nodes(i) = -x;
    rule.weights(n - 1 - i) = w;
    rule.weights(i) = w;
  }
  return rule;
}

/// Gauss nodes mapped affinely into [a, b].
template <typename Scalar>
Vector<Scalar> rescaled_nodes(const GaussRule<Scalar>& rule, Scalar a, Scalar b) {
  return ((b - a) / Scalar(2)) * (rule.nodes.array() + Scalar(1)) + a;
}

/// sum_i f(rescaled y_i) (b - a)/2 w_i, with `samples` holding the f values.
template <typename Scalar, typename Derived>
Scalar integrate_on(const GaussRule<Scalar>& rule, Scalar a, Scalar b,
                    const Eigen::MatrixBase<Derived>& samples) {
  if (samples.size() != rule.order()) throw DomainError("integrate_on: sample count mismatch");
  return (b - a) / Scalar(2) * rule.weights.dot(samples);
}

/// Maps between node values and Legendre coefficients for one rule.
template <typename Scalar>
class LegendreTransform {
 public:
  explicit LegendreTransform(const GaussRule<Scalar>& rule) {
    const int n = rule.order();
    to_coeffs_.resize(n, n);
    to_values_.resize(n, n);
    for (int j = 0; j < n; ++j) {
      const Vector<Scalar> p = legendre_eval<Scalar>(n - 1, rule.nodes(j));
      for (int i = 0; i < n; ++i) {
        to_coeffs_(i, j) = Scalar(2 * i + 1) / Scalar(2) * p(i) * rule.weights(j);
        to_values_(j, i) = p(i);
      }
    }
  }

  int order() const { return static_cast<int>(to_coeffs_.rows()); }
  const Matrix<Scalar>& values_to_coeffs_matrix() const { return to_coeffs_; }
  const Matrix<Scalar>& coeffs_to_values_matrix() const { return to_values_; }

  template <typename Derived>
  Vector<Scalar> values_to_coeffs(const Eigen::MatrixBase<Derived>& samples) const {
    if (samples.size() != order()) throw DomainError("values_to_coeffs: sample count mismatch");
    return to_coeffs_ * samples;
  }

  template <typename Derived>
  Vector<Scalar> coeffs_to_values(const Eigen::MatrixBase<Derived>& coeffs) const {
    if (coeffs.size() != order()) throw DomainError("coeffs_to_values: coefficient count mismatch");
    return to_values_ * coeffs;
  }

 private:
  Matrix<Scalar> to_coeffs_;
  Matrix<Scalar> to_values_;
};

template <typename Scalar, typename Derived>
Vector<Scalar> values_to_coeffs(const GaussRule<Scalar>& rule, const Eigen::MatrixBase<Derived>& samples) {
  return LegendreTransform<Scalar>(rule).values_to_coeffs(samples);
}

template <typename Scalar, typename Derived>
Vector<Scalar> coeffs_to_values(const GaussRule<Scalar>& rule, const Eigen::MatrixBase<Derived>& coeffs) {
  return LegendreTransform<Scalar>(rule).coeffs_to_values(coeffs);
}

/// sum_i c_i P_i(x), evaluated with the recurrence in one pass.
template <typename Scalar, typename Derived>
Scalar eval_expansion(const Eigen::MatrixBase<Derived>& coeffs, Scalar x) {
  const auto n = coeffs.size();
  if (n == 0) return Scalar(0);
  Scalar p0 = Scalar(1);
  Scalar sum = coeffs(0);
  if (n == 1) return sum;
  Scalar p1 = x;
  sum += coeffs(1) * p1;
  for (Eigen::Index k = 1; k + 1 < n; ++k) {
    const Scalar p2 = (Scalar(2 * k + 1) * x * p1 - Scalar(k) * p0) / Scalar(k + 1);
    sum += coeffs(k + 1) * p2;
    p0 = p1;
    p1 = p2;
  }
  return sum;
}

/// Coefficients (length n + 1) of the primitive that vanishes at x = -1,
/// from  int P_k = (P_{k+1} - P_{k-1}) / (2k + 1).
template <typename Scalar, typename Derived>
Vector<Scalar> antiderivative_coeffs(const Eigen::MatrixBase<Derived>& coeffs) {
  const auto n = coeffs.size();
  Vector<Scalar> b = Vector<Scalar>::Zero(n + 1);
  if (n == 0) return b;
  // int P_0 = P_1 + P_0 (vanishes at -1 after fixing b_0 below).
  b(1) += coeffs(0);
  for (Eigen::Index k = 1; k < n; ++k) {
    const Scalar c = coeffs(k) / Scalar(2 * k + 1);
    b(k + 1) += c;
    b(k - 1) -= c;
  }
  // P_k(-1) = (-1)^k
  Scalar at_minus_one = 0;
  for (Eigen::Index k = 1; k <= n; ++k) at_minus_one += (k % 2 == 0 ? b(k) : -b(k));
  b(0) = -at_minus_one;
  return b;
}

/// Coefficients of the derivative of sum c_k P_k (same length, last entry 0).
template <typename Scalar, typename Derived>
Vector<Scalar> derivative_coeffs(const Eigen::MatrixBase<Derived>& coeffs) {
  const auto n = coeffs.size();
  Vector<Scalar> d = Vector<Scalar>::Zero(n);
  // P_k' = sum over j = k-1, k-3, ... of (2j + 1) P_j
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    for (Eigen::Index j = k - 1; j >= 0; j -= 2) d(j) += Scalar(2 * j + 1) * coeffs(k);
  }
  return d;
}

}  // namespace bvp4

#endif  // BVP4_QUADRATURE_HPP

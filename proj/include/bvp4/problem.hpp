#ifndef BVP4_PROBLEM_HPP
#define BVP4_PROBLEM_HPP

#include <array>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <utility>

#include "bvp4/errors.hpp"
#include "bvp4/greens.hpp"
#include "bvp4/linalg.hpp"
#include "bvp4/quadrature.hpp"

namespace bvp4 {

template <typename Scalar>
using ScalarField = std::function<Scalar(Scalar)>;

/// sum_{j=0}^{4} a_j(x) phi^{(j)}(x) = f(x) on [a, b] with clamped boundary data.
template <typename Scalar>
struct BVProblem {
  std::array<ScalarField<Scalar>, 5> coefficients;  // a_0 ... a_4
  ScalarField<Scalar> rhs;
  Scalar a = -1;
  Scalar b = 1;
  BoundaryData<Scalar> boundary;
};

/// A boundary functional: sum_d at_a[d] phi^{(d)}(a) + at_b[d] phi^{(d)}(b) = target.
template <typename Scalar>
struct GeneralBC {
  std::array<Scalar, 4> at_a{};
  std::array<Scalar, 4> at_b{};
  Scalar target = 0;

  static GeneralBC value_at_a(Scalar target) { return derivative_at(0, true, target); }
  static GeneralBC value_at_b(Scalar target) { return derivative_at(0, false, target); }
  static GeneralBC derivative_at(int order, bool left, Scalar target) {
    GeneralBC bc;
    (left ? bc.at_a : bc.at_b)[static_cast<std::size_t>(order)] = Scalar(1);
    bc.target = target;
    return bc;
  }
};

/// m equal subintervals of [-1, 1], each carrying an n-point Gauss rule.
template <typename Scalar>
struct Mesh {
  int m = 0;
  int n = 0;
  GaussRule<Scalar> rule;
  Vector<Scalar> breakpoints;  // m + 1 entries
  Vector<Scalar> nodes;        // m * n entries, subinterval-major
  Vector<Scalar> weights;

  Scalar width() const { return Scalar(2) / Scalar(m); }
  Scalar half_width() const { return Scalar(1) / Scalar(m); }
  Scalar center(int s) const { return (breakpoints(s) + breakpoints(s + 1)) / Scalar(2); }
  Eigen::Index size() const { return static_cast<Eigen::Index>(m) * n; }
  auto segment(Vector<Scalar>& v, int s) const { return v.segment(static_cast<Eigen::Index>(s) * n, n); }
  auto segment(const Vector<Scalar>& v, int s) const {
    return v.segment(static_cast<Eigen::Index>(s) * n, n);
  }
};

template <typename Scalar>
Mesh<Scalar> build_mesh(int m, int n) {
  if (m < 1) throw DomainError("build_mesh: m must be >= 1");
  if (n < 4) throw DomainError("build_mesh: n must be >= 4");
  Mesh<Scalar> mesh;
  mesh.m = m;
  mesh.n = n;
  mesh.rule = gauss_rule<Scalar>(n);
  mesh.breakpoints.resize(m + 1);
  for (int i = 0; i <= m; ++i) mesh.breakpoints(i) = Scalar(-1) + Scalar(2 * i) / Scalar(m);
  mesh.breakpoints(m) = Scalar(1);
  mesh.nodes.resize(mesh.size());
  mesh.weights.resize(mesh.size());
  for (int s = 0; s < m; ++s) {
    mesh.segment(mesh.nodes, s) = rescaled_nodes(mesh.rule, mesh.breakpoints(s), mesh.breakpoints(s + 1));
    mesh.segment(mesh.weights, s) = mesh.half_width() * mesh.rule.weights;
  }
  return mesh;
}

/// Affine map between [a, b] and [-1, 1].
template <typename Scalar>
struct IntervalMap {
  Scalar a = -1;
  Scalar b = 1;

  Scalar to_original(Scalar y) const { return (b - a) * (y + 1) / Scalar(2) + a; }
  Scalar to_reference(Scalar x) const { return Scalar(2) * (x - a) / (b - a) - Scalar(1); }
  /// d/dx = scale * d/dy
  Scalar derivative_scale() const { return Scalar(2) / (b - a); }
};

/// The equivalent problem on [-1, 1]: a~_j(y) = (2/(b-a))^j a_j(x(y)), f~(y) =
/// f(x(y)), slopes scaled by (b-a)/2, values unchanged.
template <typename Scalar>
BVProblem<Scalar> rescale_problem(const BVProblem<Scalar>& p) {
  if (!(p.b > p.a)) throw DomainError("rescale_problem: degenerate interval (b <= a)");
  const IntervalMap<Scalar> map{p.a, p.b};
  BVProblem<Scalar> r;
  r.a = -1;
  r.b = 1;
  Scalar scale = 1;
  for (int j = 0; j < 5; ++j) {
    const auto& field = p.coefficients[static_cast<std::size_t>(j)];
    if (!field) throw DomainError("rescale_problem: coefficient a_" + std::to_string(j) + " is not set");
    r.coefficients[static_cast<std::size_t>(j)] = [field, map, scale](Scalar y) {
      return scale * field(map.to_original(y));
    };
    scale *= map.derivative_scale();
  }
  if (p.rhs) {
    r.rhs = [f = p.rhs, map](Scalar y) { return f(map.to_original(y)); };
  }
  const Scalar half = (p.b - p.a) / Scalar(2);
  r.boundary = p.boundary;
  r.boundary.left_slope *= half;
  r.boundary.right_slope *= half;
  return r;
}

/// phi^{(j)}(x) = (2/(b-a))^j phi~^{(j)}(y(x)).
template <typename Scalar, typename Derived>
Vector<Scalar> inverse_rescale_derivatives(const Eigen::MatrixBase<Derived>& values, int j, Scalar a, Scalar b) {
  if (j < 0 || j > 4) throw DomainError("inverse_rescale_derivatives: j must be in 0..4");
  return std::pow(IntervalMap<Scalar>{a, b}.derivative_scale(), j) * values;
}

/// Sampled data of a problem on [-1, 1] divided through by its leading coefficient.
template <typename Scalar>
struct NormalizedTables {
  Matrix<Scalar> coefficients;  // 4 x N, row j holds a_j / a_4
  Vector<Scalar> leading;       // a_4 at each node
  Vector<Scalar> rhs;           // f / a_4 (empty when the problem has no rhs)
};

template <typename Scalar, typename Derived>
NormalizedTables<Scalar> normalize_leading(const BVProblem<Scalar>& p, const Eigen::MatrixBase<Derived>& nodes) {
  const auto count = nodes.size();
  NormalizedTables<Scalar> t;
  t.coefficients.resize(4, count);
  t.leading.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    const Scalar x = nodes(i);
    const Scalar lead = p.coefficients[4](x);
    if (lead == Scalar(0) || !std::isfinite(lead)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "normalize_leading: leading coefficient vanishes at node " << i << " (x = " << x << ")";
      throw DomainError(msg.str());
    }
    t.leading(i) = lead;
    for (int j = 0; j < 4; ++j) t.coefficients(j, i) = p.coefficients[static_cast<std::size_t>(j)](x) / lead;
  }
  if (p.rhs) {
    t.rhs.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) t.rhs(i) = p.rhs(nodes(i)) / t.leading(i);
  }
  return t;
}

}  // namespace bvp4

#endif  // BVP4_PROBLEM_HPP

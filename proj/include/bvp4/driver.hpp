#ifndef BVP4_DRIVER_HPP
#define BVP4_DRIVER_HPP

#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "bvp4/errors.hpp"
#include "bvp4/fast_apply.hpp"
#include "bvp4/greens.hpp"
#include "bvp4/linalg.hpp"
#include "bvp4/local_solver.hpp"
#include "bvp4/matching.hpp"
#include "bvp4/problem.hpp"
#include "bvp4/quadrature.hpp"

namespace bvp4 {

template <typename Scalar>
struct SolverOptions {
  int m = 16;
  int n = 10;
  int max_iterations = 30;
  Scalar stagnation_ratio = Scalar(0.5);
  Scalar target = 10 * std::numeric_limits<Scalar>::epsilon();
  LocalIntegration local_integration = LocalIntegration::nystrom;

  void validate() const {
    if (m < 1) throw DomainError("SolverOptions: m must be >= 1");
    if (n < 4) throw DomainError("SolverOptions: n must be >= 4");
    if (max_iterations < 1) throw DomainError("SolverOptions: max_iterations must be >= 1");
    if (!(stagnation_ratio > 0 && stagnation_ratio < 1)) {
      throw DomainError("SolverOptions: stagnation ratio must lie in (0, 1)");
    }
    if (!(target >= 0)) throw DomainError("SolverOptions: target must be >= 0");
  }
};

/// Everything that depends only on the operator, the interval, m and n.
template <typename Scalar>
struct Factorization {
  SolverOptions<Scalar> options;
  IntervalMap<Scalar> map;
  BVProblem<Scalar> problem;  // rescaled to [-1, 1]
  Mesh<Scalar> mesh;
  PartialIntegralTables<Scalar> tables;
  NormalizedTables<Scalar> normalized;
  LocalOperator<Scalar> local;
  std::vector<LocalSystem<Scalar>> systems;
  std::vector<HomogeneousBasis<Scalar>> bases;
  std::optional<MatchingFactor<Scalar>> matching;
};

/// Relative residual norms, one per deferred-corrections iteration. Entry 0
/// is the residual of the initial local + matching pass.
template <typename Scalar>
struct IterationLog {
  std::vector<Scalar> residuals;

  std::size_t iterations() const { return residuals.size(); }
  Scalar final_residual() const { return residuals.empty() ? Scalar(0) : residuals.back(); }
};

/// phi^{(k)}, k = 0..4, as per-subinterval Legendre expansions in original units.
template <typename Scalar>
struct PiecewiseSolution {
  Scalar a = -1;
  Scalar b = 1;
  int m = 0;
  int n = 0;
  std::array<Matrix<Scalar>, 5> coefficients;  // n x m each
  Matrix<Scalar> node_values;                 // 5 x (m n)
  Vector<Scalar> nodes;                       // original coordinates

  /// Index of the subinterval holding reference coordinate y. Breakpoints
  /// belong to the subinterval on their left, except y = -1.
  int locate(Scalar y) const {
    const Scalar pos = (y + Scalar(1)) * Scalar(m) / Scalar(2);
    return std::clamp(static_cast<int>(std::ceil(pos)) - 1, 0, m - 1);
  }

  Scalar evaluate(Scalar x, int k = 0) const {
    if (k < 0 || k > 4) throw DomainError("evaluate: derivative order must be in 0..4");
    if (!(x >= a && x <= b)) throw DomainError("evaluate: x outside [a, b]");
    const IntervalMap<Scalar> map{a, b};
    const Scalar y = std::clamp(map.to_reference(x), Scalar(-1), Scalar(1));
    const int s = locate(y);
    const Scalar center = Scalar(-1) + (Scalar(2 * s) + Scalar(1)) / Scalar(m);
    const Scalar u = std::clamp((y - center) * Scalar(m), Scalar(-1), Scalar(1));
    return eval_expansion(coefficients[static_cast<std::size_t>(k)].col(s), u);
  }

  /// *this += c * other (same mesh and interval).
  PiecewiseSolution& axpy(Scalar c, const PiecewiseSolution& other) {
    if (other.m != m || other.n != n || other.a != a || other.b != b) {
      throw DomainError("PiecewiseSolution::axpy: mesh mismatch");
    }
    for (std::size_t k = 0; k < 5; ++k) coefficients[k] += c * other.coefficients[k];
    node_values += c * other.node_values;
    return *this;
  }
};

template <typename Scalar>
Factorization<Scalar> factorize(const BVProblem<Scalar>& p, const SolverOptions<Scalar>& opts) {
  opts.validate();
  Factorization<Scalar> f;
  f.options = opts;
  f.map = IntervalMap<Scalar>{p.a, p.b};
  f.problem = rescale_problem(p);
  f.mesh = build_mesh<Scalar>(opts.m, opts.n);
  f.tables = build_tables(f.mesh);
  f.normalized = normalize_leading(f.problem, f.mesh.nodes);
  f.local = LocalOperator<Scalar>::build(f.mesh.rule, opts.local_integration);

  const Scalar h = f.mesh.half_width();
  Eigen::Matrix<Scalar, 4, 1> scale;
  for (int j = 0; j < 4; ++j) scale(j) = std::pow(h, 4 - j);
  f.systems.reserve(static_cast<std::size_t>(opts.m));
  f.bases.reserve(static_cast<std::size_t>(opts.m));
  for (int s = 0; s < opts.m; ++s) {
    const Matrix<Scalar> coeffs =
        scale.asDiagonal() * f.normalized.coefficients.middleCols(static_cast<Eigen::Index>(s) * opts.n, opts.n);
    try {
      f.systems.push_back(assemble_local(coeffs, f.local, s));
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError("factorize: local system " + std::to_string(s) + " is singular: " + e.what());
    }
    f.bases.push_back(homogeneous_basis(f.systems.back(), f.local, h));
  }
  f.matching.emplace(matching_matrix(f.bases, h));
  return f;
}

namespace detail {

template <typename Scalar, typename Derived>
Scalar weighted_norm(const Eigen::MatrixBase<Derived>& v, const Vector<Scalar>& weights) {
  return std::sqrt(v.cwiseAbs2().dot(weights));
}

/// Global sigma at the nodes and phi^{(k)}, k = 0..3, at the left end of
/// every subinterval, both in reference coordinates.
template <typename Scalar>
struct PassResult {
  Vector<Scalar> sigma;
  Matrix<Scalar> anchors;  // 4 x m
};

/// One local + matching pass for a normalized rhs on [-1, 1].
template <typename Scalar>
PassResult<Scalar> pipeline(const Factorization<Scalar>& f, const Vector<Scalar>& rhs,
                            const BoundaryData<Scalar>& alpha) {
  const auto& mesh = f.mesh;
  const Scalar h = mesh.half_width();
  const Scalar h4 = h * h * h * h;
  const BoundaryData<Scalar> none{};
  std::vector<LocalSolution<Scalar>> tilde;
  tilde.reserve(static_cast<std::size_t>(mesh.m));
  for (int s = 0; s < mesh.m; ++s) {
    const Vector<Scalar> local_rhs = h4 * mesh.segment(rhs, s);
    tilde.push_back(solve_local(f.systems[static_cast<std::size_t>(s)], f.local, local_rhs, none, false));
  }
  const auto beta = f.matching->solve(matching_rhs(tilde, alpha, h));
  PassResult<Scalar> out{Vector<Scalar>(mesh.size()), Matrix<Scalar>(4, mesh.m)};
  for (int s = 0; s < mesh.m; ++s) {
    const auto& t = tilde[static_cast<std::size_t>(s)];
    Vector<Scalar> local = t.sigma;
    Eigen::Matrix<Scalar, 4, 1> left = t.left;
    const auto& basis = f.bases[static_cast<std::size_t>(s)];
    for (int j = 0; j < 4; ++j) {
      const auto& g = basis.members[static_cast<std::size_t>(j)];
      local += beta(s, j) * g.sigma;
      left += beta(s, j) * g.left;
    }
    mesh.segment(out.sigma, s) = local / h4;
    out.anchors.col(s) = to_global<Scalar>(left, h);
  }
  return out;
}

/// psi_alpha^{(k)} at the global nodes of [-1, 1], rows k = 0..3.
template <typename Scalar>
Matrix<Scalar> psi_at_global_nodes(const Mesh<Scalar>& mesh, const BoundaryData<Scalar>& alpha) {
  Matrix<Scalar> out(4, mesh.size());
  for (Eigen::Index i = 0; i < mesh.size(); ++i)
    for (int k = 0; k < 4; ++k) out(k, i) = psi_alpha(alpha, mesh.nodes(i), k);
  return out;
}

/// Node values phi^{(j)} = G_j sigma + psi_alpha^{(j)} and piecewise expansions:
/// phi^{(4)} is the node interpolant of sigma and each lower order is the exact
/// primitive of the next one, anchored at the left breakpoint, so phi^{(k)}
/// has degree n + 3 - k on every subinterval.
template <typename Scalar>
PiecewiseSolution<Scalar> assemble_solution(const Factorization<Scalar>& f, const Vector<Scalar>& sigma,
                                            const BoundaryData<Scalar>& alpha) {
  const auto& mesh = f.mesh;
  PiecewiseSolution<Scalar> sol;
  sol.a = f.map.a;
  sol.b = f.map.b;
  sol.m = mesh.m;
  sol.n = mesh.n;
  sol.nodes.resize(mesh.size());
  for (Eigen::Index i = 0; i < mesh.size(); ++i) sol.nodes(i) = f.map.to_original(mesh.nodes(i));

  sol.node_values.resize(5, mesh.size());
  const auto moments = kernel_moments(f.tables, sigma);
  const Matrix<Scalar> psi = psi_at_global_nodes(mesh, alpha);
  for (int j = 0; j < 4; ++j) sol.node_values.row(j) = apply_G(j, moments, f.tables).transpose() + psi.row(j);
  sol.node_values.row(4) = sigma.transpose();

  const LegendreTransform<Scalar> transform(mesh.rule);
  const Eigen::Map<const Matrix<Scalar>> by_interval(sigma.data(), mesh.n, mesh.m);
  std::array<Vector<Scalar>, 4> anchors;
  for (int k = 0; k < 4; ++k) {
    auto& a = anchors[static_cast<std::size_t>(k)];
    a = apply_G_at_breakpoints(k, sigma, f.tables);
    for (int s = 0; s < mesh.m; ++s) a(s) += psi_alpha(alpha, mesh.breakpoints(s), k);
  }
  for (int k = 0; k < 4; ++k) sol.coefficients[static_cast<std::size_t>(k)].resize(mesh.n + 4 - k, mesh.m);
  sol.coefficients[4] = transform.values_to_coeffs_matrix() * by_interval;
  const Scalar h = mesh.half_width();
  for (int s = 0; s < mesh.m; ++s) {
    Vector<Scalar> current = sol.coefficients[4].col(s);
    for (int k = 3; k >= 0; --k) {
      current = h * antiderivative_coeffs<Scalar>(current);
      current(0) += anchors[static_cast<std::size_t>(k)](s);
      sol.coefficients[static_cast<std::size_t>(k)].col(s) = current;
    }
  }

  const Scalar d = f.map.derivative_scale();
  Scalar scale = 1;
  for (int k = 0; k < 5; ++k) {
    sol.node_values.row(k) *= scale;
    sol.coefficients[static_cast<std::size_t>(k)] *= scale;
    scale *= d;
  }
  return sol;
}

}  // namespace detail

/// Solves L phi = f with clamped data alpha (both in original coordinates)
/// by a local + matching pass followed by deferred corrections.
template <typename Scalar>
std::pair<PiecewiseSolution<Scalar>, IterationLog<Scalar>> solve(const Factorization<Scalar>& f,
                                                                 const ScalarField<Scalar>& rhs,
                                                                 const BoundaryData<Scalar>& alpha) {
  const auto& mesh = f.mesh;
  const auto& opts = f.options;
  const Scalar half = (f.map.b - f.map.a) / Scalar(2);
  BoundaryData<Scalar> alpha_ref = alpha;
  alpha_ref.left_slope *= half;
  alpha_ref.right_slope *= half;

  Vector<Scalar> f_ref(mesh.size());
  for (Eigen::Index i = 0; i < mesh.size(); ++i) {
    const Scalar value = rhs ? rhs(f.map.to_original(mesh.nodes(i))) : Scalar(0);
    f_ref(i) = value / f.normalized.leading(i);
  }
  if (!f_ref.allFinite()) throw DomainError("solve: right-hand side is not finite at the nodes");

  // f_alpha = f - L psi_alpha at the nodes (normalized, psi'''' = 0).
  Vector<Scalar> f_alpha = f_ref;
  if (!alpha_ref.is_zero()) {
    const Matrix<Scalar> psi = detail::psi_at_global_nodes(mesh, alpha_ref);
    for (int j = 0; j < 4; ++j) f_alpha -= f.normalized.coefficients.row(j).transpose().cwiseProduct(psi.row(j).transpose());
  }

  IterationLog<Scalar> log;
  const Scalar scale = detail::weighted_norm(f_alpha, mesh.weights);
  if (scale == Scalar(0)) {
    log.residuals.push_back(Scalar(0));
    return {detail::assemble_solution(f, Vector<Scalar>(Vector<Scalar>::Zero(mesh.size())), alpha_ref), log};
  }

  const BoundaryData<Scalar> none{};
  Vector<Scalar> sigma = detail::pipeline(f, f_ref, alpha_ref).sigma;
  Vector<Scalar> best = sigma;
  Scalar best_residual = std::numeric_limits<Scalar>::infinity();
  int slow_steps = 0;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Vector<Scalar> delta = f_alpha - apply_LG0(f.normalized.coefficients, sigma, f.tables);
    const Scalar r = detail::weighted_norm(delta, mesh.weights) / scale;
    if (!std::isfinite(r)) break;
    if (!log.residuals.empty()) {
      slow_steps = r > opts.stagnation_ratio * log.residuals.back() ? slow_steps + 1 : 0;
    }
    log.residuals.push_back(r);
    if (r < best_residual) {
      best_residual = r;
      best = sigma;
    }
    if (r <= opts.target || slow_steps >= 2 || it == opts.max_iterations) break;
    sigma += detail::pipeline(f, delta, none).sigma;
  }
  return {detail::assemble_solution(f, best, alpha_ref), log};
}

/// Solves with the problem's own rhs and boundary data.
template <typename Scalar>
std::pair<PiecewiseSolution<Scalar>, IterationLog<Scalar>> solve(const Factorization<Scalar>& f,
                                                                 const BVProblem<Scalar>& original) {
  return solve(f, original.rhs, original.boundary);
}

template <typename Scalar>
Scalar evaluate(const PiecewiseSolution<Scalar>& sol, Scalar x, int k = 0) {
  return sol.evaluate(x, k);
}

namespace detail {

template <typename Scalar>
Scalar apply_functional(const GeneralBC<Scalar>& bc, const PiecewiseSolution<Scalar>& sol) {
  Scalar sum = 0;
  for (int d = 0; d < 4; ++d) {
    const auto i = static_cast<std::size_t>(d);
    if (bc.at_a[i] != Scalar(0)) sum += bc.at_a[i] * sol.evaluate(sol.a, d);
    if (bc.at_b[i] != Scalar(0)) sum += bc.at_b[i] * sol.evaluate(sol.b, d);
  }
  return sum;
}

}  // namespace detail

/// Solves L phi = f subject to four general boundary functionals by
/// superposing a clamped solution and four homogeneous ones. `log`, when
/// given, receives the residual history of the clamped solve.
template <typename Scalar>
PiecewiseSolution<Scalar> solve_general_bc(const Factorization<Scalar>& f, const ScalarField<Scalar>& rhs,
                                           const std::array<GeneralBC<Scalar>, 4>& bcs,
                                           IterationLog<Scalar>* log = nullptr) {
  auto [particular, particular_log] = solve(f, rhs, BoundaryData<Scalar>{});
  if (log) *log = particular_log;
  std::array<PiecewiseSolution<Scalar>, 4> homogeneous;
  for (int i = 0; i < 4; ++i) {
    homogeneous[static_cast<std::size_t>(i)] = solve(f, ScalarField<Scalar>{}, BoundaryData<Scalar>::unit(i)).first;
  }
  Eigen::Matrix<Scalar, 4, 4> system;
  Eigen::Matrix<Scalar, 4, 1> target;
  for (int k = 0; k < 4; ++k) {
    const auto& bc = bcs[static_cast<std::size_t>(k)];
    target(k) = bc.target - detail::apply_functional(bc, particular);
    for (int i = 0; i < 4; ++i) system(k, i) = detail::apply_functional(bc, homogeneous[static_cast<std::size_t>(i)]);
  }
  Vector<Scalar> coeffs;
  try {
    coeffs = qr_factor(Matrix<Scalar>(system)).solve(target);
  } catch (const SingularMatrixError& e) {
    throw SingularMatrixError(std::string("solve_general_bc: boundary functionals are not independent for this operator: ") +
                              e.what());
  }
  for (int i = 0; i < 4; ++i) particular.axpy(coeffs(i), homogeneous[static_cast<std::size_t>(i)]);
  return particular;
}

}  // namespace bvp4

#endif  // BVP4_DRIVER_HPP

#include "bvp4/experiments.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <numbers>

#include "bvp4/errors.hpp"

namespace bvp4 {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

/// a_j = 1 + x^{4-j} on [0, 2 pi], exact solution sin(w x), clamped data from it.
ProblemSetup sine_problem(ProblemId id, double w) {
  ProblemSetup s;
  s.id = id;
  s.reference = ReferenceKind::closed_form;
  s.exact = [w](double x, int j) {
    const double scale = std::pow(w, j);
    switch (j % 4) {
      case 0: return scale * std::sin(w * x);
      case 1: return scale * std::cos(w * x);
      case 2: return -scale * std::sin(w * x);
      default: return -scale * std::cos(w * x);
    }
  };
  auto& p = s.problem;
  p.a = 0;
  p.b = 2 * std::numbers::pi;
  for (int j = 0; j < 5; ++j) {
    p.coefficients[static_cast<std::size_t>(j)] = [j](double x) { return 1 + std::pow(x, 4 - j); };
  }
  p.rhs = [exact = s.exact](double x) {
    double sum = 0;
    for (int j = 0; j < 5; ++j) sum += (1 + std::pow(x, 4 - j)) * exact(x, j);
    return sum;
  };
  p.boundary = {0, 0, w, w};
  return s;
}

/// (c phi'')'' = sin(2 pi x) + 1 on [0, 1] with c = (x - 1/2)^2 + 1.
ProblemSetup beam_problem(ProblemId id) {
  ProblemSetup s;
  s.id = id;
  s.reference = ReferenceKind::self_convergence;
  auto& p = s.problem;
  p.a = 0;
  p.b = 1;
  p.coefficients = {[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 2.0; },
                    [](double x) { return 4 * (x - 0.5); }, [](double x) { return (x - 0.5) * (x - 0.5) + 1; }};
  p.rhs = [](double x) { return std::sin(2 * std::numbers::pi * x) + 1; };
  if (id == ProblemId::beam_ss) {
    s.general_bc = std::array<GeneralBC<double>, 4>{
        GeneralBC<double>::value_at_a(0), GeneralBC<double>::value_at_b(0),
        GeneralBC<double>::derivative_at(2, true, 0), GeneralBC<double>::derivative_at(2, false, 0)};
  }
  return s;
}

/// x^2 phi'''' + 5x phi''' + (x^2 - 96) phi'' + 4x phi' + 2 phi = 0, the second
/// derivative of Bessel's operator of order 10, solved by J_10.
ProblemSetup bessel_problem() {
  ProblemSetup s;
  s.id = ProblemId::bessel;
  s.reference = ReferenceKind::special_function;
  auto& p = s.problem;
  p.a = std::sqrt(std::numeric_limits<double>::epsilon());
  p.b = 100;
  p.coefficients = {[](double) { return 2.0; }, [](double x) { return 4 * x; },
                    [](double x) { return x * x - 96; }, [](double x) { return 5 * x; },
                    [](double x) { return x * x; }};
  p.rhs = [](double) { return 0.0; };
  const auto end = bessel_reference(p.b);
  // J_10 and J_10' are below 1e-80 at the left end.
  p.boundary = {0, end.value, 0, end.derivative};
  s.exact = [](double x, int j) {
    const auto r = bessel_reference(x);
    const double y = r.value;
    const double dy = r.derivative;
    if (j == 0) return y;
    if (j == 1) return dy;
    const double x2 = x * x;
    const double d2 = -(x * dy + (x2 - 100) * y) / x2;
    if (j == 2) return d2;
    const double d3 = -(3 * x * d2 + (x2 - 99) * dy + 2 * x * y) / x2;
    if (j == 3) return d3;
    return -(5 * x * d3 + (x2 - 96) * d2 + 4 * x * dy + 2 * y) / x2;
  };
  return s;
}

}  // namespace

std::string to_string(ProblemId id) {
  switch (id) {
    case ProblemId::sin5: return "sin5";
    case ProblemId::sin150: return "sin150";
    case ProblemId::beam_fixed: return "beam-fixed";
    case ProblemId::beam_ss: return "beam-ss";
    case ProblemId::bessel: return "bessel";
  }
  return "unknown";
}

const std::vector<ProblemId>& all_problems() {
  static const std::vector<ProblemId> ids{ProblemId::sin5, ProblemId::sin150, ProblemId::beam_fixed,
                                          ProblemId::beam_ss, ProblemId::bessel};
  return ids;
}

std::optional<ProblemId> parse_problem_id(std::string_view name) {
  for (auto id : all_problems()) {
    if (to_string(id) == name) return id;
  }
  return std::nullopt;
}

int default_n(ProblemId id) {
  switch (id) {
    case ProblemId::sin150: return 15;
    case ProblemId::bessel: return 20;
    default: return 10;
  }
}

LocalIntegration default_local_integration(ProblemId id) {
  return id == ProblemId::bessel ? LocalIntegration::exact : LocalIntegration::nystrom;
}

ProblemSetup make_problem(ProblemId id) {
  switch (id) {
    case ProblemId::sin5: return sine_problem(id, 5);
    case ProblemId::sin150: return sine_problem(id, 150);
    case ProblemId::beam_fixed:
    case ProblemId::beam_ss: return beam_problem(id);
    case ProblemId::bessel: return bessel_problem();
  }
  throw DomainError("make_problem: unknown problem");
}

ExperimentSolve solve_setup(const ProblemSetup& setup, const SolverOptions<double>& opts) {
  ExperimentSolve out;
  auto start = Clock::now();
  const auto fact = factorize(setup.problem, opts);
  out.factor_seconds = seconds_since(start);
  start = Clock::now();
  if (setup.general_bc) {
    out.solution = solve_general_bc(fact, setup.problem.rhs, *setup.general_bc, &out.log);
  } else {
    auto [solution, log] = solve(fact, setup.problem);
    out.solution = std::move(solution);
    out.log = std::move(log);
  }
  out.solve_seconds = seconds_since(start);
  return out;
}

double relative_error_R(const std::function<double(double)>& estimate, const std::function<double(double)>& reference,
                        double a, double b, int points) {
  if (points < 2) throw DomainError("relative_error_R: need at least two grid points");
  if (!(b > a)) throw DomainError("relative_error_R: degenerate interval");
  double num = 0;
  double den = 0;
  for (int i = 0; i < points; ++i) {
    const double x = i + 1 == points ? b : a + (b - a) * i / (points - 1);
    const double r = reference(x);
    const double d = estimate(x) - r;
    num += d * d;
    den += r * r;
  }
  if (den == 0) throw DomainError("relative_error_R: reference vanishes on the whole grid");
  return std::sqrt(num / den);
}

ExperimentSpec default_spec(ProblemId id, std::vector<int> m) {
  ExperimentSpec spec;
  spec.problem = id;
  spec.m = std::move(m);
  spec.n = default_n(id);
  spec.local_integration = default_local_integration(id);
  return spec;
}

bool ErrorReport::all_ok() const {
  for (const auto& row : rows) {
    if (!row.ok) return false;
  }
  return true;
}

ErrorReport run_experiment(const ExperimentSpec& spec) {
  const auto setup = make_problem(spec.problem);
  ErrorReport report;
  report.problem = spec.problem;
  report.n = spec.n;
  const double a = setup.problem.a;
  const double b = setup.problem.b;
  for (int m : spec.m) {
    ErrorRow row;
    row.m = m;
    try {
      SolverOptions<double> opts;
      opts.m = m;
      opts.n = spec.n;
      opts.max_iterations = spec.max_iterations;
      opts.target = spec.target;
      opts.local_integration = spec.local_integration;
      const auto run = solve_setup(setup, opts);
      row.t_factor = run.factor_seconds;
      row.t_solve = run.solve_seconds;
      row.t_total = run.factor_seconds + run.solve_seconds;
      row.residuals = run.log.residuals;

      std::function<double(double, int)> reference = setup.exact;
      std::optional<ExperimentSolve> finer;
      if (setup.reference == ReferenceKind::self_convergence) {
        opts.m = 2 * m;
        finer = solve_setup(setup, opts);
        reference = [&finer](double x, int j) { return finer->solution.evaluate(x, j); };
      }
      for (int j = 0; j < 5; ++j) {
        row.R[static_cast<std::size_t>(j)] = relative_error_R(
            [&run, j](double x) { return run.solution.evaluate(x, j); },
            [&reference, j](double x) { return reference(x, j); }, a, b, spec.eval_grid);
      }
      row.ok = true;
      for (double r : row.R) {
        if (!std::isfinite(r)) {
          row.ok = false;
          row.message = "non-finite error";
        }
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.message = e.what();
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace bvp4

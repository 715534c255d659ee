#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bvp4/experiments.hpp"
#include "oracles.hpp"

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* name;
  double time_limit;  // seconds, 0 for none
  std::function<Outcome()> run;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

bvp4::BVProblem<double> quartic_problem() {
  bvp4::BVProblem<double> p;
  for (int j = 0; j < 4; ++j) p.coefficients[static_cast<std::size_t>(j)] = [](double) { return 0.0; };
  p.coefficients[4] = [](double) { return 1.0; };
  p.rhs = [](double) { return 24.0; };
  return p;
}

bvp4::ExperimentSolve solve_problem(bvp4::ProblemId id, int m) {
  const auto setup = bvp4::make_problem(id);
  bvp4::SolverOptions<double> opts;
  opts.m = m;
  opts.n = bvp4::default_n(id);
  opts.local_integration = bvp4::default_local_integration(id);
  return bvp4::solve_setup(setup, opts);
}

std::vector<double> errors_R0(bvp4::ProblemId id, const std::vector<int>& m) {
  const auto report = bvp4::run_experiment(bvp4::default_spec(id, m));
  std::vector<double> r;
  for (const auto& row : report.rows) r.push_back(row.ok ? row.R[0] : std::numeric_limits<double>::quiet_NaN());
  return r;
}

Outcome green_properties() {
  const auto results = bvp4::verify_green_properties();
  Outcome o{true, ""};
  for (const auto& r : results) {
    o.passed = o.passed && r.passed;
    if (!r.passed) o.detail += "failed: " + r.name + "; ";
  }
  o.detail += fmt("%zu properties checked", results.size());
  return o;
}

Outcome quadrature_exactness() {
  double worst = 0;
  for (int n = 2; n <= 30; ++n) {
    const auto rule = bvp4::gauss_rule<double>(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const bvp4::Vector<double> samples = rule.nodes.array().pow(d);
      const double exact = d % 2 == 0 ? 2.0 / (d + 1) : 0.0;
      worst = std::max(worst, std::abs(samples.dot(rule.weights) - exact));
    }
  }
  return {worst <= 1e-13, fmt("max abs error %.2e (limit 1e-13)", worst)};
}

Outcome quartic_end_to_end() {
  const auto p = quartic_problem();
  double worst = 0;
  for (int m : {1, 4, 16}) {
    for (int n : {4, 6, 10}) {
      bvp4::SolverOptions<double> opts;
      opts.m = m;
      opts.n = n;
      const auto sol = bvp4::solve(bvp4::factorize(p, opts), p).first;
      for (int i = 0; i < 1000; ++i) {
        const double x = -1.0 + 2.0 * i / 999.0;
        worst = std::max(worst, std::abs(sol.evaluate(x) - (x * x - 1) * (x * x - 1)));
      }
    }
  }
  return {worst <= 1e-12, fmt("max error %.2e over 9 (m, n) pairs (limit 1e-12)", worst)};
}

Outcome fast_apply_oracle() {
  const auto problem = bvp4::rescale_problem(bvp4::make_problem(bvp4::ProblemId::sin5).problem);
  std::mt19937_64 rng(2024);
  double worst = 0;
  for (int m = 1; m <= 16; ++m) {
    for (int n : {4, 6, 10}) {
      const auto mesh = bvp4::build_mesh<double>(m, n);
      const auto tables = bvp4::build_tables(mesh);
      const auto normalized = bvp4::normalize_leading(problem, mesh.nodes);
      std::array<bvp4::Matrix<double>, 4> dense;
      for (int j = 0; j < 4; ++j) dense[static_cast<std::size_t>(j)] = oracle::dense_green_matrix(mesh, j);
      for (int trial = 0; trial < 5; ++trial) {
        const bvp4::Vector<double> sigma = oracle::random_vector(mesh.size(), rng);
        const bvp4::Vector<double> expected = oracle::dense_LG0(normalized.coefficients, dense, sigma);
        const bvp4::Vector<double> got = bvp4::apply_LG0(normalized.coefficients, sigma, tables);
        worst = std::max(worst, oracle::weighted_norm(got - expected, mesh.weights) /
                                    oracle::weighted_norm(expected, mesh.weights));
      }
    }
  }
  return {worst <= 1e-11, fmt("max relative difference %.2e over m = 1..16, n = 4, 6, 10 (limit 1e-11)", worst)};
}

Outcome sin5_errors() {
  const auto r = errors_R0(bvp4::ProblemId::sin5, {4, 8, 16, 64});
  const bool ok = r[2] <= 1e-8 && r[3] <= 1e-12 && r[0] / r[1] >= 1e2 && r[1] / r[2] >= 1e2;
  return {ok, fmt("R(m=4,8,16,64) = %.2e %.2e %.2e %.2e (limits 1e-8 at 16, 1e-12 at 64, x100 per doubling)", r[0],
                  r[1], r[2], r[3])};
}

Outcome sin150_errors() {
  const auto r = errors_R0(bvp4::ProblemId::sin150, {64, 256});
  return {r[0] <= 1e-2 && r[1] <= 1e-9, fmt("R(m=64) = %.2e (limit 1e-2), R(m=256) = %.2e (limit 1e-9)", r[0], r[1])};
}

Outcome deferred_corrections() {
  const double floor = 1e3 * kEps;
  bool ok = true;
  std::string detail;
  for (int m : {16, 32, 64}) {
    const auto log = solve_problem(bvp4::ProblemId::sin5, m).log.residuals;
    bool shape = log.size() >= 3 && log.size() <= 10;
    std::size_t reached = log.size();
    for (std::size_t i = 0; i < log.size(); ++i) {
      if (log[i] <= floor) {
        reached = i;
        break;
      }
      if (i > 0 && !(log[i] < log[i - 1])) shape = false;
    }
    if (reached == log.size()) shape = false;
    for (std::size_t i = reached; i < log.size(); ++i) shape = shape && log[i] <= floor;
    const double drop = log.size() >= 3 ? log[0] / log[2] : 0.0;
    shape = shape && drop >= 1e3;
    ok = ok && shape;
    detail += fmt("m=%d: %zu iterations, drop 1->3 %.1e, final %.1e; ", m, log.size(), drop, log.back());
  }
  return {ok, detail + "(floor 1e3 eps, drop >= 1e3, <= 10 iterations)"};
}

Outcome interface_continuity() {
  const auto run = solve_problem(bvp4::ProblemId::sin5, 32);
  const auto& sol = run.solution;
  double worst = 0;
  for (int k = 0; k < 4; ++k) {
    const auto& c = sol.coefficients[static_cast<std::size_t>(k)];
    const double scale = std::max(1.0, sol.node_values.row(k).cwiseAbs().maxCoeff());
    for (int s = 0; s + 1 < sol.m; ++s) {
      const double jump = bvp4::eval_expansion<double>(c.col(s), 1.0) - bvp4::eval_expansion<double>(c.col(s + 1), -1.0);
      worst = std::max(worst, std::abs(jump) / scale);
    }
  }
  return {worst <= 1e-10, fmt("max scaled mismatch %.2e for k = 0..3 (limit 1e-10)", worst)};
}

Outcome beams() {
  const auto fixed = solve_problem(bvp4::ProblemId::beam_fixed, 16).solution;
  const auto ss = solve_problem(bvp4::ProblemId::beam_ss, 16).solution;
  const double fixed_bc = std::max({std::abs(fixed.evaluate(0.0, 0)), std::abs(fixed.evaluate(1.0, 0)),
                                    std::abs(fixed.evaluate(0.0, 1)), std::abs(fixed.evaluate(1.0, 1))});
  const double ss_bc = std::max({std::abs(ss.evaluate(0.0, 0)), std::abs(ss.evaluate(1.0, 0)),
                                 std::abs(ss.evaluate(0.0, 2)), std::abs(ss.evaluate(1.0, 2))});
  const double floor = 1e3 * kEps;
  bool converging = true;
  std::string rates;
  for (auto id : {bvp4::ProblemId::beam_fixed, bvp4::ProblemId::beam_ss}) {
    const auto r = errors_R0(id, {2, 4, 8, 16});
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      if (r[i] <= floor) break;
      converging = converging && (r[i] / r[i + 1] >= 1e2 || r[i + 1] <= floor);
    }
    rates += fmt("%s R = %.1e %.1e %.1e %.1e; ", bvp4::to_string(id).c_str(), r[0], r[1], r[2], r[3]);
  }
  const bool ok = fixed_bc <= 1e-10 && ss_bc <= 1e-9 && converging;
  return {ok, fmt("fixed BC %.1e (limit 1e-10), simply supported BC %.1e (limit 1e-9); ", fixed_bc, ss_bc) + rates +
                  "(x100 per doubling until 1e3 eps)"};
}

Outcome bessel() {
  const auto r = errors_R0(bvp4::ProblemId::bessel, {32});
  return {r[0] <= 1e-10, fmt("R(m=32) = %.2e (limit 1e-10)", r[0])};
}

Outcome linear_scaling() {
  const auto setup = bvp4::make_problem(bvp4::ProblemId::sin5);
  std::vector<double> medians;
  for (int m : {256, 512, 1024, 2048}) {
    std::vector<double> t;
    for (int rep = 0; rep < 3; ++rep) {
      bvp4::SolverOptions<double> opts;
      opts.m = m;
      const auto run = bvp4::solve_setup(setup, opts);
      t.push_back(run.factor_seconds + run.solve_seconds);
    }
    std::sort(t.begin(), t.end());
    medians.push_back(t[1]);
  }
  double worst = 0;
  for (std::size_t i = 0; i + 1 < medians.size(); ++i) worst = std::max(worst, medians[i + 1] / medians[i]);
  return {worst <= 3.0, fmt("median totals %.3f %.3f %.3f %.3f s, worst ratio %.2f (limit 3)", medians[0], medians[1],
                            medians[2], medians[3], worst)};
}

Outcome off_node_residual() {
  const auto setup = bvp4::make_problem(bvp4::ProblemId::sin5);
  const auto sol = solve_problem(bvp4::ProblemId::sin5, 16).solution;
  const auto& p = setup.problem;
  double f_max = 0;
  for (int i = 0; i < 10000; ++i) f_max = std::max(f_max, std::abs(p.rhs(p.a + (p.b - p.a) * i / 9999.0)));
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(p.a, p.b);
  double worst = 0;
  for (int i = 0; i < 100; ++i) {
    const double x = unit(rng);
    double lhs = 0;
    for (int j = 0; j < 5; ++j) lhs += p.coefficients[static_cast<std::size_t>(j)](x) * sol.evaluate(x, j);
    worst = std::max(worst, std::abs(lhs - p.rhs(x)) / f_max);
  }
  return {worst <= 1e-8, fmt("max relative residual %.2e at 100 random points (limit 1e-8)", worst)};
}

}  // namespace

int main(int argc, char** argv) {
  const bool strict = argc > 1 && std::strcmp(argv[1], "--strict") == 0;
  const std::vector<Criterion> criteria{
      {"C1", "Green's function properties", 1, green_properties},
      {"C2", "Gauss rule exactness, n = 2..30", 1, quadrature_exactness},
      {"C3", "quartic end to end", 1, quartic_end_to_end},
      {"C4", "fast apply vs dense oracle", 30, fast_apply_oracle},
      {"C5", "sin(5x) accuracy and convergence", 20, sin5_errors},
      {"C6", "sin(150x) accuracy", 60, sin150_errors},
      {"C7", "deferred corrections residual history", 0, deferred_corrections},
      {"C8", "interface continuity", 0, interface_continuity},
      {"C9", "beam problems", 30, beams},
      {"C10", "Bessel J10", 60, bessel},
      {"C11", "linear scaling", 0, linear_scaling},
      {"C12", "off-node ODE residual", 0, off_node_residual},
  };
  int passed = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (c.time_limit > 0 && seconds > c.time_limit) {
      o.passed = false;
      o.detail += fmt(" [runtime %.2f s exceeds %.0f s]", seconds, c.time_limit);
    }
    passed += o.passed;
    std::printf("%s %-4s %s: %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), seconds);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", passed, criteria.size());
  return strict && passed != static_cast<int>(criteria.size()) ? 1 : 0;
}

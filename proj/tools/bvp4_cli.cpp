#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bvp4/experiments.hpp"
#include "bvp4/greens_validation.hpp"

namespace {

int run_solve(const std::string& problem, const std::vector<int>& m, int n, int max_iters, double tol,
              const std::string& csv_dir, int eval_grid, const std::string& local) {
  const auto id = bvp4::parse_problem_id(problem);
  if (!id) {
    std::cerr << "unknown problem '" << problem << "'\n";
    return 2;
  }
  auto spec = bvp4::default_spec(*id, m);
  if (n > 0) spec.n = n;
  spec.max_iterations = max_iters;
  if (tol > 0) spec.target = tol;
  spec.eval_grid = eval_grid;
  if (local == "nystrom") spec.local_integration = bvp4::LocalIntegration::nystrom;
  if (local == "exact") spec.local_integration = bvp4::LocalIntegration::exact;

  const auto report = bvp4::run_experiment(spec);
  std::cout << bvp4::format_report(report);
  if (!csv_dir.empty()) {
    const auto paths = bvp4::write_csv(report, csv_dir);
    std::cout << "\nwrote " << paths.errors.string() << ", " << paths.timings.string() << ", "
              << paths.residuals.string() << "\n";
  }
  for (const auto& row : report.rows) {
    if (!row.ok) std::cerr << "m = " << row.m << " failed: " << row.message << "\n";
  }
  return report.all_ok() ? 0 : 1;
}

int run_verify() {
  auto results = bvp4::verify_green_properties();
  for (int n : {2, 4, 6, 8, 10}) results.push_back(bvp4::verify_quadrature_bound(n));
  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-4s %-60s violation %.3e  tolerance %.3e\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.violation, r.tolerance);
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourth-order linear boundary value problem solver"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "run a built-in experiment over a list of subinterval counts");
  std::string problem;
  std::vector<int> m;
  int n = 0;
  int max_iters = 30;
  double tol = 0;
  std::string csv_dir;
  int eval_grid = 10000;
  solve->add_option("--problem", problem, "sin5 | sin150 | beam-fixed | beam-ss | bessel")
      ->required()
      ->check(CLI::IsMember({"sin5", "sin150", "beam-fixed", "beam-ss", "bessel"}));
  solve->add_option("--m", m, "subinterval counts, e.g. 4,8,16")->required()->delimiter(',')->check(
      CLI::PositiveNumber);
  solve->add_option("--n", n, "Gauss nodes per subinterval (default per problem)")->check(CLI::Range(4, 200));
  solve->add_option("--max-iters", max_iters, "deferred-corrections iteration cap")->check(CLI::PositiveNumber);
  solve->add_option("--tol", tol, "target relative residual (default 10 eps)")->check(CLI::NonNegativeNumber);
  solve->add_option("--csv", csv_dir, "directory for errors/timings/residuals CSV files");
  solve->add_option("--eval-grid", eval_grid, "points in the error grid")->check(CLI::Range(2, 100000000));
  std::string local;
  solve->add_option("--local", local, "local integration: nystrom | exact (default per problem)")
      ->check(CLI::IsMember({"nystrom", "exact"}));

  app.add_subcommand("verify", "check Green's function properties and the quadrature error bound");

  CLI11_PARSE(app, argc, argv);
  try {
    if (solve->parsed()) return run_solve(problem, m, n, max_iters, tol, csv_dir, eval_grid, local);
    return run_verify();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

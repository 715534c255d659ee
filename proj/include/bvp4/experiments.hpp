#ifndef BVP4_EXPERIMENTS_HPP
#define BVP4_EXPERIMENTS_HPP

#include <array>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bvp4/driver.hpp"
#include "bvp4/problem.hpp"

namespace bvp4 {

enum class ProblemId { sin5, sin150, beam_fixed, beam_ss, bessel };

std::string to_string(ProblemId id);
std::optional<ProblemId> parse_problem_id(std::string_view name);
const std::vector<ProblemId>& all_problems();
int default_n(ProblemId id);
/// Exact for bessel, where the Nystrom local matrices are too crude a
/// preconditioner near the root of the leading coefficient.
LocalIntegration default_local_integration(ProblemId id);

enum class ReferenceKind { closed_form, self_convergence, special_function };

/// The experiment as a library problem, plus its reference where one exists.
struct ProblemSetup {
  ProblemId id = ProblemId::sin5;
  BVProblem<double> problem;
  std::optional<std::array<GeneralBC<double>, 4>> general_bc;  // replaces the clamped data when set
  ReferenceKind reference = ReferenceKind::closed_form;
  std::function<double(double, int)> exact;  // phi^{(j)}(x), j = 0..4; empty for self-convergence
};

ProblemSetup make_problem(ProblemId id);

/// Factorize and solve one experiment problem on m subintervals.
struct ExperimentSolve {
  PiecewiseSolution<double> solution;
  IterationLog<double> log;
  double factor_seconds = 0;
  double solve_seconds = 0;
};

ExperimentSolve solve_setup(const ProblemSetup& setup, const SolverOptions<double>& opts);

/// J_10(x) and J_10'(x) by Miller's downward recurrence.
struct BesselValues {
  double value = 0;
  double derivative = 0;
};

BesselValues bessel_reference(double x);
/// J_0(x) ... J_{max_order}(x), normalized with J_0 + 2 sum J_{2k} = 1.
std::vector<double> bessel_j_sequence(int max_order, double x);

/// sqrt(sum |est - ref|^2 / sum |ref|^2) over `points` equispaced points of [a, b].
double relative_error_R(const std::function<double(double)>& estimate, const std::function<double(double)>& reference,
                        double a, double b, int points = 10000);

struct ExperimentSpec {
  ProblemId problem = ProblemId::sin5;
  std::vector<int> m;
  int n = 10;
  int max_iterations = 30;
  double target = 10 * std::numeric_limits<double>::epsilon();
  int eval_grid = 10000;
  LocalIntegration local_integration = LocalIntegration::nystrom;
};

ExperimentSpec default_spec(ProblemId id, std::vector<int> m);

struct ErrorRow {
  int m = 0;
  bool ok = false;
  std::string message;
  std::array<double, 5> R{};
  double t_factor = 0;
  double t_solve = 0;
  double t_total = 0;
  std::vector<double> residuals;

  bool operator==(const ErrorRow&) const = default;
};

struct ErrorReport {
  ProblemId problem = ProblemId::sin5;
  int n = 0;
  std::vector<ErrorRow> rows;

  bool all_ok() const;
  bool operator==(const ErrorReport&) const = default;
};

/// Solves for every m in the spec; a failing m yields a row with ok = false.
ErrorReport run_experiment(const ExperimentSpec& spec);

std::string format_report(const ErrorReport& report);

struct CsvPaths {
  std::filesystem::path errors;
  std::filesystem::path timings;
  std::filesystem::path residuals;
};

CsvPaths csv_paths(const std::filesystem::path& dir, ProblemId id);
CsvPaths write_csv(const ErrorReport& report, const std::filesystem::path& dir);
ErrorReport read_csv(const std::filesystem::path& dir, ProblemId id);

}  // namespace bvp4

#endif  // BVP4_EXPERIMENTS_HPP

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

using bvp4::Vector;

namespace {

bvp4::BVProblem<double> biharmonic(double a, double b, std::function<double(double)> rhs,
                                   bvp4::BoundaryData<double> data) {
  bvp4::BVProblem<double> p;
  p.a = a;
  p.b = b;
  for (int j = 0; j < 4; ++j) p.coefficients[static_cast<std::size_t>(j)] = [](double) { return 0.0; };
  p.coefficients[4] = [](double) { return 1.0; };
  p.rhs = std::move(rhs);
  p.boundary = data;
  return p;
}

double quartic(double x, int k) {
  switch (k) {
    case 0: return (x * x - 1) * (x * x - 1);
    case 1: return 4 * x * x * x - 4 * x;
    case 2: return 12 * x * x - 4;
    case 3: return 24 * x;
    default: return 24;
  }
}

double x4(double x, int k) {
  static constexpr double f[5] = {1, 4, 12, 24, 24};
  return f[k] * std::pow(x, 4 - k);
}

/// The sine-family operator with solution e^{x/4}.
bvp4::BVProblem<double> exponential_on_sine_operator() {
  auto p = oracle::sine_family(5);
  p.rhs = [](double x) {
    double sum = 0;
    for (int j = 0; j < 5; ++j) sum += (1 + std::pow(x, 4 - j)) * std::pow(0.25, j) * std::exp(x / 4);
    return sum;
  };
  p.boundary = {1.0, std::exp(M_PI / 2), 0.25, 0.25 * std::exp(M_PI / 2)};
  return p;
}

}  // namespace

TEST_CASE("d^4 phi = 24 with zero clamped data is solved to rounding for every m, n") {
  const auto p = biharmonic(-1, 1, [](double) { return 24.0; }, {});
  for (int m : {1, 4, 16}) {
    for (int n : {4, 6, 10}) {
      bvp4::SolverOptions<double> opts;
      opts.m = m;
      opts.n = n;
      const auto [sol, log] = bvp4::solve(bvp4::factorize(p, opts), p);
      CAPTURE(m);
      CAPTURE(n);
      for (double x : {-1.0, -0.77, -0.31, 0.0, 0.123, 0.5, 0.999, 1.0}) {
        for (int k = 0; k < 5; ++k) CHECK(std::abs(sol.evaluate(x, k) - quartic(x, k)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("x^4 on [0, 3] exercises the interval map and nonzero boundary data") {
  const auto p = biharmonic(0, 3, [](double) { return 24.0; }, {0.0, 81.0, 0.0, 108.0});
  bvp4::SolverOptions<double> opts;
  opts.m = 5;
  opts.n = 6;
  const auto [sol, log] = bvp4::solve(bvp4::factorize(p, opts), p);
  for (double x : {0.0, 0.4, 1.7, 2.2, 3.0}) {
    for (int k = 0; k < 5; ++k) CHECK(sol.evaluate(x, k) == doctest::Approx(x4(x, k)).epsilon(1e-12).scale(1));
  }
  CHECK_THROWS_AS(sol.evaluate(3.5), bvp4::DomainError);
  CHECK_THROWS_AS(sol.evaluate(1.0, 5), bvp4::DomainError);
}

TEST_CASE("sin(5x) on the variable-coefficient operator") {
  const auto p = oracle::sine_family(5);
  bvp4::SolverOptions<double> opts;
  opts.m = 16;
  const auto [sol, log] = bvp4::solve(bvp4::factorize(p, opts), p);
  REQUIRE(log.iterations() >= 2);
  CHECK(log.residuals[1] < log.residuals[0]);
  CHECK(*std::min_element(log.residuals.begin(), log.residuals.end()) < 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0, 2 * M_PI);
  for (int i = 0; i < 50; ++i) {
    const double x = unit(rng);
    for (int k = 0; k < 5; ++k) {
      CHECK(std::abs(sol.evaluate(x, k) - oracle::sine_derivative(5, x, k)) <= 1e-9 * std::pow(5.0, k));
    }
  }
}

TEST_CASE("piecewise expansions of phi, ..., phi''' agree at interior breakpoints") {
  const auto p = oracle::sine_family(5);
  bvp4::SolverOptions<double> opts;
  opts.m = 8;
  const auto [sol, log] = bvp4::solve(bvp4::factorize(p, opts), p);
  for (int s = 0; s + 1 < sol.m; ++s) {
    for (int k = 0; k < 4; ++k) {
      const auto& c = sol.coefficients[static_cast<std::size_t>(k)];
      const double from_left = bvp4::eval_expansion<double>(c.col(s), 1.0);
      const double from_right = bvp4::eval_expansion<double>(c.col(s + 1), -1.0);
      CHECK(std::abs(from_left - from_right) <= 1e-10 * std::pow(5.0, k));
    }
  }
}

TEST_CASE("general boundary functionals: simply supported d^4 phi = 24") {
  const auto p = biharmonic(-1, 1, [](double) { return 24.0; }, {});
  bvp4::SolverOptions<double> opts;
  opts.m = 4;
  opts.n = 8;
  const auto f = bvp4::factorize(p, opts);
  using BC = bvp4::GeneralBC<double>;
  const std::array<BC, 4> bcs{BC::value_at_a(0), BC::value_at_b(0), BC::derivative_at(2, true, 0),
                              BC::derivative_at(2, false, 0)};
  const auto sol = bvp4::solve_general_bc(f, p.rhs, bcs);
  const auto exact = [](double x, int k) {
    switch (k) {
      case 0: return x * x * x * x - 6 * x * x + 5;
      case 1: return 4 * x * x * x - 12 * x;
      case 2: return 12 * x * x - 12;
      case 3: return 24 * x;
      default: return 24.0;
    }
  };
  for (double x : {-1.0, -0.4, 0.25, 0.9, 1.0}) {
    for (int k = 0; k < 5; ++k) CHECK(std::abs(sol.evaluate(x, k) - exact(x, k)) <= 1e-12);
  }

  const std::array<BC, 4> dependent{BC::value_at_a(0), BC::value_at_a(1), BC::value_at_b(0), BC::value_at_b(0)};
  CHECK_THROWS_AS(bvp4::solve_general_bc(f, p.rhs, dependent), bvp4::SingularMatrixError);
}

TEST_CASE("one factorization serves several right-hand sides") {
  const auto sine = oracle::sine_family(5);
  const auto expo = exponential_on_sine_operator();
  bvp4::SolverOptions<double> opts;
  opts.m = 16;
  const auto f = bvp4::factorize(sine, opts);
  const auto [s1, l1] = bvp4::solve(f, sine);
  const auto [s2, l2] = bvp4::solve(f, expo);
  const auto [fresh, lf] = bvp4::solve(bvp4::factorize(expo, opts), expo);
  for (double x : {0.3, 2.0, 4.4, 6.1}) {
    CHECK(std::abs(s1.evaluate(x) - std::sin(5 * x)) <= 1e-10);
    CHECK(std::abs(s2.evaluate(x) - std::exp(x / 4)) <= 1e-10 * std::exp(x / 4));
    CHECK(s2.evaluate(x) == fresh.evaluate(x));
  }
}

TEST_CASE("a vanishing leading coefficient is reported") {
  auto p = oracle::sine_family(5);
  p.coefficients[4] = [](double x) { return x < 3 ? 1.0 : 0.0; };
  bvp4::SolverOptions<double> opts;
  opts.m = 4;
  CHECK_THROWS_AS(bvp4::factorize(p, opts), bvp4::DomainError);
}

TEST_CASE("invalid options are rejected") {
  const auto p = oracle::sine_family(5);
  bvp4::SolverOptions<double> opts;
  opts.m = 0;
  CHECK_THROWS_AS(bvp4::factorize(p, opts), bvp4::DomainError);
  opts = {};
  opts.n = 3;
  CHECK_THROWS_AS(bvp4::factorize(p, opts), bvp4::DomainError);
  opts = {};
  opts.max_iterations = 0;
  CHECK_THROWS_AS(bvp4::factorize(p, opts), bvp4::DomainError);
  opts = {};
  opts.stagnation_ratio = 1.5;
  CHECK_THROWS_AS(bvp4::factorize(p, opts), bvp4::DomainError);
}

TEST_CASE("a non-finite right-hand side is reported") {
  auto p = oracle::sine_family(5);
  p.rhs = [](double) { return std::nan(""); };
  bvp4::SolverOptions<double> opts;
  opts.m = 2;
  CHECK_THROWS_AS(bvp4::solve(bvp4::factorize(p, opts), p), bvp4::DomainError);
}

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"

namespace {

double g0(double x, double t) { return bvp4::green_eval(0, x, t); }

}  // namespace

TEST_CASE("G0 is symmetric and clamped at both ends") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-1, 1);
  for (int i = 0; i < 200; ++i) {
    const double x = unit(rng);
    const double t = unit(rng);
    CHECK(g0(x, t) == doctest::Approx(g0(t, x)).epsilon(1e-14));
    CHECK(bvp4::green_eval(0, -1.0, t) == 0.0);
    CHECK(bvp4::green_eval(0, 1.0, t) == 0.0);
    CHECK(bvp4::green_eval(1, -1.0, t) == 0.0);
    CHECK(bvp4::green_eval(1, 1.0, t) == 0.0);
  }
}

TEST_CASE("G_j are the x-derivatives of G0 away from the diagonal") {
  constexpr double h = 1e-4;
  for (double t : {-0.6, 0.1, 0.8}) {
    for (double x : {-0.9, -0.2, 0.45, 0.95}) {
      if (std::abs(x - t) < 0.05) continue;
      for (int j = 1; j < 4; ++j) {
        const double fd = (bvp4::green_eval(j - 1, x + h, t) - bvp4::green_eval(j - 1, x - h, t)) / (2 * h);
        CHECK(bvp4::green_eval(j, x, t) == doctest::Approx(fd).epsilon(1e-6));
      }
    }
  }
  CHECK_THROWS_AS(bvp4::green_eval(4, 0.0, 0.0), bvp4::DomainError);
}

TEST_CASE("G0 inverts d^4: int G0(x,t) 24 dt = (x^2 - 1)^2") {
  const auto rule = bvp4::gauss_rule<double>(8);
  for (double x : {-0.75, 0.0, 0.3, 0.99}) {
    double sum = 0;
    for (const auto& [a, b] : {std::pair{-1.0, x}, std::pair{x, 1.0}}) {
      const double half = (b - a) / 2;
      for (int q = 0; q < 8; ++q) sum += half * rule.weights(q) * 24 * g0(x, a + half * (rule.nodes(q) + 1));
    }
    CHECK(sum == doctest::Approx((x * x - 1) * (x * x - 1)).epsilon(1e-14));
  }
}

TEST_CASE("split kernels reproduce G_j on both sides of the diagonal") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unit(-1, 1);
  for (int j = 0; j < 4; ++j) {
    const auto k = bvp4::split_kernel<double>(j);
    CHECK(k.order == j);
    CHECK(k.x_powers() == 4 - j);
    for (int i = 0; i < 100; ++i) {
      const double x = unit(rng);
      const double t = unit(rng);
      CHECK(k.value(x, t) == doctest::Approx(bvp4::green_eval(j, x, t)).epsilon(1e-13));
    }
    for (int i = 4 - j; i < 4; ++i) {
      CHECK(k.q.row(i).isZero(0));
      CHECK(k.p.row(i).isZero(0));
    }
  }
  const auto k3 = bvp4::split_kernel<double>(3);
  for (double x : {-0.5, 0.0, 0.7}) CHECK(k3.upper_value(x, x) - k3.lower_value(x, x) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(bvp4::split_kernel<double>(-1), bvp4::DomainError);
}

TEST_CASE("boundary cubics carry cardinal clamped data and psi_alpha combines them") {
  for (int which = 0; which < 4; ++which) {
    const double data[4] = {bvp4::BoundaryCubics<double>::eval(which, -1.0, 0),
                            bvp4::BoundaryCubics<double>::eval(which, 1.0, 0),
                            bvp4::BoundaryCubics<double>::eval(which, -1.0, 1),
                            bvp4::BoundaryCubics<double>::eval(which, 1.0, 1)};
    for (int i = 0; i < 4; ++i) CHECK(data[i] == doctest::Approx(i == which ? 1.0 : 0.0));
    CHECK(bvp4::BoundaryCubics<double>::eval(which, 0.3, 4) == 0.0);
  }
  const bvp4::BoundaryData<double> alpha{2.0, -1.0, 0.5, 3.0};
  CHECK(bvp4::psi_alpha(alpha, -1.0, 0) == doctest::Approx(2.0));
  CHECK(bvp4::psi_alpha(alpha, 1.0, 0) == doctest::Approx(-1.0));
  CHECK(bvp4::psi_alpha(alpha, -1.0, 1) == doctest::Approx(0.5));
  CHECK(bvp4::psi_alpha(alpha, 1.0, 1) == doctest::Approx(3.0));
  CHECK(bvp4::BoundaryData<double>::unit(2).left_slope == 1.0);
  CHECK(bvp4::BoundaryData<double>{}.is_zero());
}

TEST_CASE("the shipped kernels pass every property check") {
  for (const auto& r : bvp4::verify_green_properties()) {
    INFO(r.name);
    CHECK(r.passed);
  }
}

TEST_CASE("a perturbed kernel table is caught by the property checks") {
  auto kernels = bvp4::shipped_kernels();
  kernels[2].q(1, 2) += 1e-6;
  const auto results = bvp4::verify_green_properties(kernels);
  CHECK_FALSE(results[3].passed);

  auto degree = bvp4::shipped_kernels();
  degree[1].p(3, 0) = 1e-3;
  const auto structural = bvp4::verify_green_properties(degree);
  CHECK_FALSE(structural[4].passed);
  CHECK_FALSE(structural[3].passed);
}

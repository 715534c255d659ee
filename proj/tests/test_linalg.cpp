#include <random>

#include "doctest.h"
#include "oracles.hpp"

using bvp4::Matrix;
using bvp4::Vector;

TEST_CASE("dense QR solves a well-conditioned system") {
  std::mt19937_64 rng(7);
  for (int n : {1, 3, 10, 25}) {
    Matrix<double> a = Matrix<double>::Identity(n, n) * n;
    for (int i = 0; i < n; ++i) a.row(i) += oracle::random_vector(n, rng).transpose();
    const Vector<double> x = oracle::random_vector(n, rng);
    const Vector<double> b = a * x;
    const auto f = bvp4::qr_factor(a);
    CHECK((f.solve(b) - x).norm() <= 1e-13 * x.norm());
    const Matrix<double> many = f.solve_many(Matrix<double>(a));
    CHECK((many - Matrix<double>::Identity(n, n)).norm() <= 1e-13 * n);
  }
}

TEST_CASE("dense QR rejects singular and malformed input") {
  Matrix<double> a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  CHECK_THROWS_AS(bvp4::qr_factor(a), bvp4::SingularMatrixError);
  CHECK_THROWS_AS(bvp4::qr_factor(Matrix<double>(Matrix<double>::Zero(2, 2))), bvp4::SingularMatrixError);
  CHECK_THROWS_AS(bvp4::qr_factor(Matrix<double>(2, 3)), bvp4::DomainError);
  Matrix<double> bad = Matrix<double>::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(bvp4::qr_factor(bad), bvp4::DomainError);
  const auto f = bvp4::qr_factor(Matrix<double>(Matrix<double>::Identity(2, 2)));
  CHECK_THROWS_AS(f.solve(Vector<double>(3)), bvp4::DomainError);
}

TEST_CASE("banded storage round-trips through the dense form") {
  bvp4::BandedMatrix<double> b(6, 2, 1);
  for (int i = 0; i < 6; ++i)
    for (int j = std::max(0, i - 2); j <= std::min(5, i + 1); ++j) b.at(i, j) = 10 * i + j + 1;
  const Matrix<double> d = b.to_dense();
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const bool inside = j - i >= -2 && j - i <= 1;
      CHECK(d(i, j) == doctest::Approx(inside ? 10 * i + j + 1 : 0));
      CHECK(b(i, j) == d(i, j));
    }
  }
  CHECK_THROWS_AS(b.at(0, 3), bvp4::DomainError);
  const Vector<double> x = Vector<double>::LinSpaced(6, 1, 6);
  CHECK((b.multiply(x) - d * x).norm() == doctest::Approx(0));
}

TEST_CASE("banded LU agrees with a dense solve, with and without pivoting") {
  std::mt19937_64 rng(11);
  for (int order : {1, 9, 40, 200}) {
    bvp4::BandedMatrix<double> b(order, 5, 3);
    for (int i = 0; i < order; ++i) {
      for (int j = std::max(0, i - 5); j <= std::min(order - 1, i + 3); ++j) {
        b.at(i, j) = std::uniform_real_distribution<double>(-1, 1)(rng);
      }
      b.at(i, i) += i % 3 == 0 ? 0.0 : 4.0;  // some rows need pivoting
    }
    const Vector<double> rhs = oracle::random_vector(order, rng);
    const Vector<double> x = bvp4::banded_factor_solve(b, rhs);
    const Matrix<double> dense = b.to_dense();
    const Vector<double> expected = dense.fullPivLu().solve(rhs);
    CHECK((x - expected).norm() <= 1e-10 * (1 + expected.norm()));
    CHECK((dense * x - rhs).norm() <= 1e-11 * (1 + rhs.norm()));
  }
}

TEST_CASE("banded LU reports singular systems") {
  bvp4::BandedMatrix<double> b(4, 1, 1);
  for (int i = 0; i < 4; ++i) b.at(i, i) = 1;
  b.at(2, 2) = 0;
  b.at(2, 1) = 0;
  b.at(3, 2) = 0;
  CHECK_THROWS_AS(bvp4::BandedLU<double>{b}, bvp4::SingularMatrixError);
}

TEST_CASE("row equilibration scales each row to unit maximum") {
  bvp4::BandedMatrix<double> b(3, 1, 1);
  b.at(0, 0) = 4;
  b.at(0, 1) = -8;
  b.at(1, 1) = 0.5;
  b.at(2, 1) = 3;
  const auto s = b.equilibrate_rows();
  CHECK(s(0) == 8);
  CHECK(s(1) == 0.5);
  CHECK(s(2) == 3);
  CHECK(b(0, 1) == -1);
  CHECK(b(1, 1) == 1);
}

#include <doctest.h>

#include "margauss/bodies.hpp"
#include "margauss/frames.hpp"
#include "margauss/stein.hpp"

#include <cmath>

using namespace margauss;

TEST_CASE("sylvester_hadamard small orders") {
  CHECK(sylvester_hadamard<int>(1)(0, 0) == 1);
  Eigen::Matrix2i two;
  two << 1, 1, 1, -1;
  CHECK(sylvester_hadamard<int>(2) == two);
  const auto h8 = sylvester_hadamard<long long>(8);
  const Eigen::Matrix<long long, -1, -1> gram = h8 * h8.transpose();
  CHECK(gram == 8 * Eigen::Matrix<long long, -1, -1>::Identity(8, 8));
  CHECK_THROWS_AS(sylvester_hadamard<int>(6), std::invalid_argument);
  CHECK_THROWS_AS(sylvester_hadamard<int>(0), std::invalid_argument);
}

TEST_CASE("walsh_frame examples") {
  const auto f = walsh_frame(4, 2);
  Matrix expected(2, 4);
  expected << 0.5, 0.5, 0.5, 0.5, 0.5, -0.5, 0.5, -0.5;
  CHECK((f.rows - expected).cwiseAbs().maxCoeff() == 0.0);

  const auto f64 = walsh_frame(64, 5);
  for (int i = 0; i < 5; ++i) {
    const double l4 = std::sqrt(f64.rows.row(i).array().pow(4).sum());
    CHECK(l4 == doctest::Approx(0.125).epsilon(1e-14));
  }

  const auto f100 = walsh_frame(100, 3);
  CHECK(f100.rows.rightCols(36).cwiseAbs().maxCoeff() == 0.0);
  CHECK(frame_functionals(f100).l4_sum == doctest::Approx(3.0 / 8.0).epsilon(1e-14));
  CHECK(orthonormality_residual(f100.rows) < 1e-10);

  try {
    walsh_frame(100, 65);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("m=64") != std::string::npos);
  }
}

TEST_CASE("walsh flatness") {
  for (int n : {1, 7, 16, 100, 300}) {
    const int m = largest_power_of_two(n);
    const auto f = walsh_frame(n, std::min(m, 4));
    for (int i = 0; i < f.k(); ++i)
      for (int j = 0; j < n; ++j) {
        if (j < m)
          CHECK(std::abs(f.rows(i, j)) == doctest::Approx(1.0 / std::sqrt(m)).epsilon(1e-15));
        else
          CHECK(f.rows(i, j) == 0.0);
      }
  }
}

TEST_CASE("haar_frame") {
  auto s = substream(21, 0);
  CHECK(orthonormality_residual(haar_frame(50, 5, s).rows) < 1e-10);

  const auto rot = haar_frame(2, 2, s);
  CHECK(std::abs(std::abs(rot.rows.determinant()) - 1.0) < 1e-10);

  // Sum of fourth powers of a uniform unit vector: exact mean 3/(n+2).
  // The row functional ||theta||_4^2 is its square root; its oracle is the
  // same statistic on independently normalized Gaussian vectors.
  const int n = 1000, draws = 200;
  std::vector<double> q4, l4, oracle;
  auto t = substream(22, 0);
  for (int d = 0; d < draws; ++d) {
    const auto f = haar_frame(n, 1, s);
    q4.push_back(f.rows.array().pow(4).sum());
    l4.push_back(frame_functionals(f).l4_sum);
    const Vector g = gaussian_vector(t, n);
    oracle.push_back(std::sqrt((g / g.norm()).array().pow(4).sum()));
  }
  CHECK(std::abs(mean_of(q4) - 3.0 / (n + 2)) < 3 * standard_error(q4));
  const double diff_se = std::hypot(standard_error(l4), standard_error(oracle));
  CHECK(std::abs(mean_of(l4) - mean_of(oracle)) < 3 * diff_se);

  CHECK_THROWS(haar_frame(3, 4, s));
}

TEST_CASE("coordinate frame") {
  const auto f = coordinate_frame(5, 2);
  CHECK(frame_functionals(f).l4_sum == 2.0);
  CHECK(orthonormality_residual(f.rows) == 0.0);
  const auto thm = theorem_bounds(Theorem::unconditional, coordinate_frame(5, 1), nullptr, {});
  CHECK(*thm.d1_bound == doctest::Approx(14.0));
  for (int n : {3, 10})
    for (int k = 1; k <= n; ++k) CHECK(frame_functionals(coordinate_frame(n, k)).l4_sum == k);
}

TEST_CASE("project") {
  const auto f = coordinate_frame(3, 2);
  Vector x(3);
  x << 3, 4, 5;
  CHECK(project(f, x) == Eigen::Vector2d(3, 4));
  CHECK(project(walsh_frame(4, 2), Vector::Ones(4)).isApprox(Eigen::Vector2d(2, 0)));
  auto s = substream(1, 1);
  CHECK(project(haar_frame(6, 3, s), Vector::Zero(6)).isZero(0));
  CHECK_THROWS(project(f, Vector::Zero(4)));
  PointMatrix pts(2, 3);
  pts << 3, 4, 5, 1, 2, 3;
  const PointMatrix w = project_batch(f, pts);
  CHECK(w(1, 0) == 1.0);
  CHECK(w(1, 1) == 2.0);
}

TEST_CASE("frame functionals") {
  CHECK(frame_functionals(walsh_frame(64, 2)).l4_sum == doctest::Approx(0.25).epsilon(1e-14));

  // Triangle vertices at 90, 210 and 330 degrees, up to the labeling.
  const auto tri = regular_simplex(2);
  Matrix row(1, 2);
  row << 1, 0;
  const auto ff = frame_functionals(custom_frame(row), &tri, true);
  CHECK(*ff.simplex_cubic == doctest::Approx(2 * std::pow(std::sqrt(3.0) / 2, 3)));
  CHECK(*ff.simplex_cubic == doctest::Approx(1.29904).epsilon(1e-5));

  CHECK_THROWS(frame_functionals(walsh_frame(2, 2), &tri, true));
  CHECK_THROWS(frame_functionals(walsh_frame(4, 1), nullptr, true));
}

TEST_CASE("norm chain and range on random frames") {
  auto s = substream(99, 0);
  for (int t = 0; t < 100; ++t) {
    const int n = 2 + static_cast<int>(s.index(120));
    const int k = 1 + static_cast<int>(s.index(std::min(n, 6)));
    const auto f = haar_frame(n, k, s);
    CHECK(orthonormality_residual(f.rows) < 1e-10);
    for (int i = 0; i < k; ++i) {
      const auto a = f.rows.row(i).cwiseAbs().array();
      const double l3_cubed = a.cube().sum();
      const double l4_sq = std::sqrt(a.pow(4).sum());
      CHECK(l3_cubed <= l4_sq + 1e-15);
      CHECK(l4_sq <= 1.0 + 1e-15);
    }
    const double l4 = frame_functionals(f).l4_sum;
    CHECK(l4 >= k / std::sqrt(n) - 1e-12);
    CHECK(l4 <= k + 1e-12);
  }
  const auto w = walsh_frame(256, 4);
  CHECK(frame_functionals(w).l4_sum == doctest::Approx(4 / 16.0).epsilon(1e-14));
}

TEST_CASE("custom frame validation and frame kind names") {
  Matrix bad(2, 3);
  bad << 1, 0, 0, 1, 1, 0;
  CHECK_THROWS(custom_frame(bad));
  for (auto kind : {FrameKind::walsh, FrameKind::haar, FrameKind::coordinate, FrameKind::custom})
    CHECK(parse_frame_kind(to_string(kind)) == kind);
  CHECK_THROWS(parse_frame_kind("hadamard"));
}

#include <doctest.h>

#include "margauss/core.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

using namespace margauss;

namespace {

// Composite Simpson on [-L, L]; the integrands below are negligible past 12.
template <typename F>
double simpson(F&& f, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double s = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
  return s * h / 3.0;
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

}  // namespace

TEST_CASE("same seed and stream give the same draws") {
  auto a = substream(7, 0);
  auto b = substream(7, 0);
  for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
}

TEST_CASE("distinct stream ids are uncorrelated") {
  auto a = substream(7, 0);
  auto b = substream(7, 1);
  const int N = 10000;
  double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
  for (int i = 0; i < N; ++i) {
    const double x = a.normal(), y = b.normal();
    sa += x, sb += y, saa += x * x, sbb += y * y, sab += x * y;
  }
  const double cov = sab / N - sa * sb / N / N;
  const double corr = cov / std::sqrt((saa / N - sa * sa / N / N) * (sbb / N - sb * sb / N / N));
  CHECK(std::abs(corr) < 3.0 / std::sqrt(N) * 3.0);
}

TEST_CASE("normal mean over 10^6 draws") {
  auto s = substream(7, 0);
  double total = 0;
  for (int i = 0; i < 1000000; ++i) total += s.normal();
  CHECK(std::abs(total / 1e6) < 3e-3);
}

TEST_CASE("split is a pure function of the parent identity") {
  auto s = substream(11, 5);
  const auto before = s.split(3);
  s.normal();
  auto after = s.split(3);
  auto copy = before;
  CHECK(copy.stream_id() == after.stream_id());
  CHECK(copy.uniform() == after.uniform());
  CHECK(s.split(3).stream_id() != s.split(4).stream_id());
  auto x = substream(11, 5).split(3);
  auto y = substream(12, 5).split(3);
  CHECK(x.uniform() != y.uniform());
}

TEST_CASE("uniform and exponential ranges") {
  auto s = substream(1, 2);
  double em = 0;
  for (int i = 0; i < 200000; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    em += s.exponential();
  }
  CHECK(std::abs(em / 200000 - 1.0) < 0.01);
  for (int i = 0; i < 1000; ++i) CHECK(s.index(5) < 5u);
}

TEST_CASE("gaussian_vector covariance, third and second moments") {
  auto s = substream(3, 0);
  const int N = 1000000;
  Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
  for (int i = 0; i < N; ++i) {
    const Vector z = gaussian_vector(s, 3);
    acc += z * z.transpose();
  }
  acc /= N;
  CHECK((acc - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 0.02);

  // E|Z|^3 = 2 sqrt(2/pi): quadrature oracle, then Monte Carlo against it.
  const double oracle = simpson([](double x) { return std::abs(x * x * x) * phi(x); }, -12, 12,
                                240000);
  CHECK(oracle == doctest::Approx(1.5957691216057307).epsilon(1e-10));
  CHECK(oracle == doctest::Approx(2.0 * std::sqrt(2.0 / M_PI)).epsilon(1e-10));
  std::vector<double> sums(20, 0.0);
  std::vector<std::size_t> counts(20, N / 20);
  for (int b = 0; b < 20; ++b)
    for (int i = 0; i < N / 20; ++i) sums[b] += std::pow(std::abs(gaussian_vector(s, 1)[0]), 3);
  const auto est = combine_batch_means(sums, counts);
  CHECK(std::abs(est.value - oracle) < 3 * est.se);

  std::vector<double> sq(20, 0.0);
  for (int b = 0; b < 20; ++b)
    for (int i = 0; i < 5000; ++i) sq[b] += gaussian_vector(s, 2).squaredNorm();
  const auto e2 = combine_batch_means(sq, std::vector<std::size_t>(20, 5000));
  CHECK(std::abs(e2.value - 2.0) < 3 * e2.se);

  CHECK_THROWS_AS(gaussian_vector(s, 0), std::invalid_argument);
}

TEST_CASE("batch helpers") {
  const auto sizes = batch_sizes(103, 20);
  REQUIRE(sizes.size() == 20);
  std::size_t total = 0;
  for (auto n : sizes) {
    total += n;
    CHECK(n >= 5);
    CHECK(n <= 6);
  }
  CHECK(total == 103);
  CHECK_THROWS(batch_sizes(10, 20));

  const auto est = combine_batch_means({2.0, 4.0, 6.0}, {1, 1, 1});
  CHECK(est.value == doctest::Approx(4.0));
  CHECK(est.se == doctest::Approx(2.0 / std::sqrt(3.0)));
  CHECK(mean_of({1.0, 2.0, 3.0}) == doctest::Approx(2.0));
}

TEST_CASE("constants config") {
  const auto c = constants_from_json_text(R"({"C_tv_multi": 2.5})");
  CHECK(c.C_tv_multi == 2.5);
  CHECK(c.c_smooth == 1.0);
  CHECK(c.C_tv_simplex1d == 1.0);
  CHECK_THROWS(constants_from_json_text(R"({"C_tv_multi": 0})"));
  CHECK_THROWS(constants_from_json_text(R"({"c_smooth": -1})"));
  CHECK_THROWS(constants_from_json_text(R"({"C": 1})"));
  CHECK_THROWS(load_constants("/nonexistent/constants.json"));
}

TEST_CASE("MG_SEED override") {
  unsetenv("MG_SEED");
  CHECK(seed_from_env(5) == 5);
  setenv("MG_SEED", "18446744073709551615", 1);
  CHECK(seed_from_env(5) == 18446744073709551615ULL);
  setenv("MG_SEED", "12x", 1);
  CHECK_THROWS(seed_from_env(5));
  unsetenv("MG_SEED");
}

TEST_CASE("ordered_map keeps index order and surfaces errors") {
  const auto out = ordered_map<int>(50, [](std::size_t i) { return static_cast<int>(i * i); });
  for (int i = 0; i < 50; ++i) CHECK(out[i] == i * i);
  CHECK_THROWS_AS(ordered_map<int>(10,
                                   [](std::size_t i) -> int {
                                     if (i == 7) throw std::runtime_error("boom");
                                     return 0;
                                   }),
                  std::runtime_error);
}

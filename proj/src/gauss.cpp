#include "margauss/gauss.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace margauss {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_grid(const Grid& grid) {
  if (grid.points < 3 || !(grid.hi > grid.lo)) throw std::invalid_argument("invalid grid");
}

}  // namespace

double trapezoid(const Grid& grid, const Vector& values) {
  if (values.size() != grid.points) throw std::invalid_argument("trapezoid: size mismatch");
  const double h = grid.spacing();
  return h * (values.sum() - 0.5 * (values[0] + values[values.size() - 1]));
}

Density1D gaussian_density(double t, const Grid& grid) {
  if (!(t > 0.0)) throw std::invalid_argument("gaussian_density: t must be positive");
  check_grid(grid);
  Density1D f{grid, Vector(grid.points), true, "gaussian"};
  const double norm = 1.0 / std::sqrt(2.0 * kPi * t * t);
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    f.values[i] = norm * std::exp(-x * x / (2.0 * t * t));
  }
  return f;
}

Density1D uniform_density(const Grid& grid) {
  check_grid(grid);
  const double a = std::sqrt(3.0);
  const double h = grid.spacing();
  Density1D f{grid, Vector(grid.points), false, "uniform"};
  for (int i = 0; i < grid.points; ++i) {
    const double x = grid.at(i);
    const double overlap = std::max(0.0, std::min(x + h / 2, a) - std::max(x - h / 2, -a));
    f.values[i] = overlap / h / (2.0 * a);
  }
  return f;
}

Density1D laplace_density(const Grid& grid) {
  check_grid(grid);
  const double b = 1.0 / std::sqrt(2.0);
  Density1D f{grid, Vector(grid.points), true, "laplace"};
  for (int i = 0; i < grid.points; ++i) f.values[i] = std::exp(-std::abs(grid.at(i)) / b) / (2 * b);
  return f;
}

Density1D shipped_density(const std::string& name, const Grid& grid) {
  if (name == "uniform") return uniform_density(grid);
  if (name == "laplace") return laplace_density(grid);
  if (name == "gaussian") return gaussian_density(1.0, grid);
  throw std::invalid_argument("unknown density '" + name + "'");
}

SmoothingResult convolve_l1(const Density1D& f, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("convolve_l1: t must be positive");
  const double h = f.spacing();
  if (h > t / 10.0)
    throw std::invalid_argument("convolve_l1: grid spacing " + std::to_string(h) +
                                " is coarser than t/10 = " + std::to_string(t / 10.0));
  const int m = f.grid.points;
  // exp(-50) truncation of the kernel tails.
  const int reach = std::min(m - 1, static_cast<int>(std::ceil(10.0 * t / h)));
  Vector kernel(2 * reach + 1);
  for (int d = -reach; d <= reach; ++d) {
    const double x = d * h;
    kernel[d + reach] = h * std::exp(-x * x / (2.0 * t * t)) / std::sqrt(2.0 * kPi * t * t);
  }
  Vector weighted = f.values;
  weighted[0] *= 0.5;
  weighted[m - 1] *= 0.5;
  Vector smoothed = Vector::Zero(m);
  for (int i = 0; i < m; ++i) {
    const int lo = std::max(0, i - reach);
    const int hi = std::min(m - 1, i + reach);
    // sum_j weighted[j] kernel[i - j + reach]
    smoothed[i] = weighted.segment(lo, hi - lo + 1)
                      .dot(kernel.segment(i - hi + reach, hi - lo + 1).reverse());
  }
  SmoothingResult out;
  out.smoothed = Density1D{f.grid, smoothed, true, f.label + "*phi_t"};
  out.distance = trapezoid(f.grid, (smoothed - f.values).cwiseAbs());
  return out;
}

double derivative_l1(const Density1D& f) {
  const auto& v = f.values;
  const Eigen::Index m = v.size();
  return 0.5 * (v.segment(2, m - 2) - v.segment(0, m - 2)).cwiseAbs().sum();
}

LedouxCheck ledoux_check(const Density1D& f, double t) {
  if (!f.continuous)
    throw std::invalid_argument("ledoux_check: density '" + f.label + "' has jumps");
  LedouxCheck out;
  out.lhs = convolve_l1(f, t).distance;
  out.derivative_l1 = derivative_l1(f);
  out.rhs = std::sqrt(2.0) * t * out.derivative_l1;
  return out;
}

double gaussian_tv_exact(double s1, double s2, int dim) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw std::invalid_argument("gaussian_tv_exact: scales must be positive");
  if (dim < 1) throw std::invalid_argument("gaussian_tv_exact: dim must be >= 1");
  if (s1 == s2) return 0.0;
  const double a = std::min(s1, s2);
  const double b = std::max(s1, s2);
  // The narrower density is larger exactly inside |x|^2 < r2.
  const double r2 = dim * std::log(b * b / (a * a)) / (1.0 / (a * a) - 1.0 / (b * b));
  const double half = 0.5 * dim;
  const double inside_a = boost::math::gamma_p(half, r2 / (2.0 * a * a));
  const double inside_b = boost::math::gamma_p(half, r2 / (2.0 * b * b));
  return 2.0 * (inside_a - inside_b);
}

}  // namespace margauss

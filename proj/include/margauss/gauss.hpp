#pragma once

#include "margauss/core.hpp"

#include <string>

namespace margauss {

/// Uniform grid lo = x_0 < ... < x_{points-1} = hi.
struct Grid {
  double lo = -12.0;
  double hi = 12.0;
  int points = 24001;

  double spacing() const { return (hi - lo) / (points - 1); }
  double at(int i) const { return lo + i * spacing(); }
};

/// Density sampled on a grid. `continuous` is false when the density has
/// jumps; derivative-based checks reject those.
struct Density1D {
  Grid grid;
  Vector values;
  bool continuous = true;
  std::string label;

  double spacing() const { return grid.spacing(); }
};

/// Trapezoid rule on the grid.
double trapezoid(const Grid& grid, const Vector& values);

/// N(0, t^2) density.
Density1D gaussian_density(double t, const Grid& grid = {});
/// Uniform on [-sqrt(3), sqrt(3)], sampled as cell averages so that the jumps
/// do not bias the trapezoid integral.
Density1D uniform_density(const Grid& grid = {});
/// Laplace with variance 1.
Density1D laplace_density(const Grid& grid = {});
/// "uniform", "laplace" or "gaussian"; all isotropic and log-concave.
Density1D shipped_density(const std::string& name, const Grid& grid = {});

struct SmoothingResult {
  double distance = 0.0;  // ||f * phi_t - f||_1
  Density1D smoothed;
};

/// Discrete convolution with phi_t by quadrature. Requires spacing <= t / 10.
SmoothingResult convolve_l1(const Density1D& f, double t);

/// ||f'||_1 by central differences.
double derivative_l1(const Density1D& f);

struct LedouxCheck {
  double lhs = 0.0;  // ||f * phi_t - f||_1
  double rhs = 0.0;  // sqrt(2) t ||f'||_1
  double derivative_l1 = 0.0;
};

/// Rejects densities with jumps.
LedouxCheck ledoux_check(const Density1D& f, double t);

/// Exact L1 distance between N(0, s1^2 I) and N(0, s2^2 I) in R^dim, from the
/// chi-square probabilities of the ball where the two densities cross.
double gaussian_tv_exact(double s1, double s2, int dim);

}  // namespace margauss

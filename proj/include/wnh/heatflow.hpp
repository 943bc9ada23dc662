#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <vector>

namespace wnh {

// Warning bits carried alongside a grid density.
enum HeatflowFlag : unsigned {
  kCoarseGrid = 1u << 0,      // h > 1/16 in a finite-difference step
  kShortTime = 1u << 1,       // t < 10 h^2: difference noise may dominate T_n
  kNegativeValues = 1u << 2,  // some sample < 0 (possible after T_n)
};

// Samples on the uniform grid x_i = -L + i h, i = 0..2L/h.
struct GridDensity {
  double half_width = 8.0;
  double h = 1.0 / 128.0;
  std::vector<double> values;
  unsigned flags = 0;

  std::size_t size() const { return values.size(); }
  double x(std::size_t i) const { return -half_width + static_cast<double>(i) * h; }
  double integral() const;  // trapezoid rule
  bool has(HeatflowFlag f) const { return (flags & f) != 0; }
};

// Throws InputError unless L > 0, h > 0 and 2L/h is an integer (to 1e-9).
GridDensity sample_on_grid(double half_width, double h, const std::function<double(double)>& fn);
GridDensity normalized(GridDensity f);

// e^{-x^2}/sqrt(pi)
GridDensity stationary_density(double half_width = 8.0, double h = 1.0 / 128.0);
// e^{-(x - shift)^2} / sqrt(pi), the stationary density moved off center.
GridDensity shifted_gaussian(double shift = 0.2, double half_width = 8.0, double h = 1.0 / 128.0);
// e^{-x^2} (1 + amplitude sin x), normalized.
GridDensity sine_perturbed_gaussian(double amplitude = 0.2, double half_width = 8.0,
                                    double h = 1.0 / 128.0);

// L f = f''/2 + (x f)' by central differences, with f = 0 off the grid. The
// stationary density of this generator is proportional to e^{-x^2}.
GridDensity ou_generator_apply(const GridDensity& f);

// T_n f = sum_{m<n} (-t)^m / m! L^m f, evaluated Horner-style.
GridDensity reverse_approx_Tn(const GridDensity& f, double t, int n);

// e^{tL} f by quadrature against the Mehler transition density
//   x -> N(e^{-t} x, (1 - e^{-2t}) / 2),
// renormalized to integral 1. Throws DomainError if more than 1e-8 of the
// mass leaves [-L, L].
GridDensity semigroup_apply(const GridDensity& f, double t);

struct Chi2Result {
  double value = 0.0;
  bool negative_density = false;  // g <= 0 where f is not negligible
};

// int (g - f)^2 / g e^{-x^2} dx with g floored at 1e-12.
Chi2Result chi2_divergence(const GridDensity& g, const GridDensity& f);

struct ScalingPoint {
  double t = 0.0;
  int n = 1;
  double chi2 = 0.0;
  bool negative_density = false;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;  // ordered by n, then by t as given
  std::map<int, double> slopes;      // least-squares slope of log chi2 vs log t
};

// chi2(e^{tL} T_n f, f) over the (t, n) grid. `workers` only affects wall time.
ScalingResult run_scaling_experiment(const GridDensity& f, const std::vector<double>& times,
                                     const std::vector<int>& orders, int workers = 1);

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wnh

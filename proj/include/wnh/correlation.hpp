#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "wnh/ensembles.hpp"
#include "wnh/linalg.hpp"
#include "wnh/saddle.hpp"

namespace wnh {

// Half-open rectangle [x0, x1) x [y0, y1) in the rescaled plane.
struct Window {
  double x0 = -3.0;
  double x1 = 3.0;
  double y0 = -4.0;
  double y1 = 4.0;

  double area() const { return (x1 - x0) * (y1 - y0); }
  bool contains(Complex z) const {
    return z.real() >= x0 && z.real() < x1 && z.imag() >= y0 && z.imag() < y1;
  }
  // Throws InputError for an empty or non-finite window.
  void validate() const;
};

// Default bulk window |Re| <= 3, |Im| <= 3 sqrt(tau) + 1.
Window default_bulk_window(double tau);

// zeta_i = scale * (z_i - E - shift)
struct RescaledSpectrum {
  std::vector<Complex> zeta;
  double scale = 1.0;
  Complex shift;
  double energy = 0.0;
  std::int64_t trial = 0;
};

RescaledSpectrum rescale_bulk(const Spectrum& eigs, double energy, double scale, Complex shift,
                              std::int64_t trial = 0);

// E + shift + zeta / scale, the inverse of rescale_bulk.
Complex bulk_forward_map(Complex zeta, double energy, double scale, Complex shift);

// Histogram intensity estimate. density[iy * nx + ix] is
//   count / (trials * bin_area * normalization_area),
// with normalization_area = 1 for one-point estimates and the reference
// window area for pair estimates.
struct BinnedDensity {
  Window window;
  int nx = 1;
  int ny = 1;
  std::vector<double> density;
  std::int64_t trials = 0;
  std::int64_t total_points = 0;
  double normalization_area = 1.0;

  double bin_width() const { return (window.x1 - window.x0) / nx; }
  double bin_height() const { return (window.y1 - window.y0) / ny; }
  double bin_area() const { return bin_width() * bin_height(); }
  Complex center(int ix, int iy) const;
  double at(int ix, int iy) const { return density[static_cast<std::size_t>(iy * nx + ix)]; }
};

// Integer bin counts; merging is exact and order-independent.
class HistogramAccumulator {
 public:
  HistogramAccumulator(Window window, int nx, int ny);

  void add_point(Complex z);
  void add_trial() { ++trials_; }
  void merge(const HistogramAccumulator& other);
  BinnedDensity finish(double normalization_area = 1.0) const;

  std::int64_t trials() const { return trials_; }
  std::int64_t points() const { return points_; }
  const Window& window() const { return window_; }

 private:
  Window window_;
  int nx_;
  int ny_;
  std::vector<std::int64_t> counts_;
  std::int64_t trials_ = 0;
  std::int64_t points_ = 0;
};

BinnedDensity estimate_rho1(std::span<const RescaledSpectrum> samples, const Window& window, int nx,
                            int ny);

// Square displacement grid [-half_width, half_width]^2 with bins x bins cells.
struct DisplacementBins {
  double half_width = 3.0;
  int bins = 13;

  Window window() const { return {-half_width, half_width, -half_width, half_width}; }
};

// Adds zeta_j - zeta_i for all ordered pairs i != j with zeta_i in `window`.
void accumulate_pairs(HistogramAccumulator& acc, std::span<const Complex> zeta, const Window& window);

// Pair-displacement intensity: estimates int_W rho2(z, z + d) dz / |W| as a
// function of d.
BinnedDensity estimate_rho2(std::span<const RescaledSpectrum> samples, const Window& window,
                            const DisplacementBins& bins);

// Ratio of the pair intensity in the bin containing d = 0 to its plateau: the
// mean over the bins on the Im d = 0 row with |Re d| >= plateau_min.
struct RepulsionSummary {
  double near_zero = 0.0;
  double plateau = 0.0;
  double ratio = 0.0;
};
RepulsionSummary pair_repulsion(const BinnedDensity& rho2, double plateau_min = 2.0);

// Test function for linear statistics of order k in {1, 2}, declared to vanish
// outside `support` in every argument.
struct TestFunction {
  int k = 1;
  Window support;
  std::function<double(std::span<const Complex>)> f;
};

// sum over distinct index tuples of f(N pi rho(E) (z_i - E), ...), where
// `scale` carries the factor in front of (z_i - E). Throws InputError for k > 2.
double linear_statistic(const TestFunction& f, const Spectrum& eigs, double energy, double scale);

struct ComparisonReport {
  double rel_l1 = 0.0;
  double rel_l2 = 0.0;
  double sup_err = 0.0;  // max |est - th| / max th
  double chi2_stat = 0.0;
  int n_bins_used = 0;
};

// Compares against theory at bin centers over bins with theory >= floor_fraction * max.
// Throws NumericalError("degenerate comparison") if no bin qualifies or the
// estimate holds no points.
ComparisonReport compare(const BinnedDensity& estimate, const std::function<double(Complex)>& theory,
                         double floor_fraction = 1e-3);

// Integral over the window's y-range of a one-point estimate, one value per
// x-bin: sum_y density * bin_height.
std::vector<double> y_marginal(const BinnedDensity& rho1);

// Monte Carlo pipeline: sample, diagonalize, rescale, histogram.
enum class BulkScaling {
  // scale N eta_{E,t} / t, shift i sqrt(tau_N) <W2>, Gauss-divisible A_t
  GaussDivisible,
  // scale N pi rho_sc(E), no shift
  Wigner,
};

struct CorrelationConfig {
  BulkScaling scaling = BulkScaling::Wigner;
  EnsembleSpec ensemble;
  double energy = 0.0;
  Window window;
  int nx = 3;
  int ny = 16;
  DisplacementBins rho2_bins;
  std::int64_t trials = 100;
  int workers = 1;
  std::optional<double> tau_theory;  // default: tau_E (Wigner) or mean tau_{E,t}
  SaddleOptions saddle;
  std::function<void(std::int64_t)> on_trial_done;  // called from worker threads
};

struct CorrelationRun {
  BinnedDensity rho1;
  BinnedDensity rho2;
  double tau_theory = 0.0;
  std::vector<double> tau_et;       // per trial, Gauss-divisible scaling only
  std::vector<std::int64_t> failed_trials;
  std::int64_t successful_trials = 0;
};

CorrelationRun run_correlation(const CorrelationConfig& config);

}  // namespace wnh

#include "wnh/correlation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wnh/diagnostics.hpp"
#include "wnh/error.hpp"
#include "wnh/parallel.hpp"

namespace wnh {

void Window::validate() const {
  if (!(std::isfinite(x0) && std::isfinite(x1) && std::isfinite(y0) && std::isfinite(y1))) {
    throw InputError("window: non-finite bound");
  }
  if (!(x1 > x0 && y1 > y0)) throw InputError("window: empty rectangle");
}

Window default_bulk_window(double tau) {
  const double h = 3.0 * std::sqrt(tau) + 1.0;
  return {-3.0, 3.0, -h, h};
}

RescaledSpectrum rescale_bulk(const Spectrum& eigs, double energy, double scale, Complex shift,
                              std::int64_t trial) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw InputError("rescale_bulk: scale must be positive");
  RescaledSpectrum out;
  out.scale = scale;
  out.shift = shift;
  out.energy = energy;
  out.trial = trial;
  out.zeta.reserve(eigs.size());
  for (const Complex z : eigs.values) out.zeta.push_back(scale * (z - energy - shift));
  return out;
}

Complex bulk_forward_map(Complex zeta, double energy, double scale, Complex shift) {
  return energy + shift + zeta / scale;
}

Complex BinnedDensity::center(int ix, int iy) const {
  return {window.x0 + (ix + 0.5) * bin_width(), window.y0 + (iy + 0.5) * bin_height()};
}

HistogramAccumulator::HistogramAccumulator(Window window, int nx, int ny)
    : window_(window), nx_(nx), ny_(ny) {
  window_.validate();
  if (nx < 1 || ny < 1) throw InputError("histogram: bin counts must be positive");
  counts_.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);
}

void HistogramAccumulator::add_point(Complex z) {
  if (!window_.contains(z)) return;
  const double fx = (z.real() - window_.x0) / (window_.x1 - window_.x0) * nx_;
  const double fy = (z.imag() - window_.y0) / (window_.y1 - window_.y0) * ny_;
  const int ix = std::min(nx_ - 1, static_cast<int>(fx));
  const int iy = std::min(ny_ - 1, static_cast<int>(fy));
  ++counts_[static_cast<std::size_t>(iy * nx_ + ix)];
  ++points_;
}

void HistogramAccumulator::merge(const HistogramAccumulator& other) {
  if (other.nx_ != nx_ || other.ny_ != ny_) throw InputError("histogram merge: bin layout differs");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  trials_ += other.trials_;
  points_ += other.points_;
}

BinnedDensity HistogramAccumulator::finish(double normalization_area) const {
  BinnedDensity out;
  out.window = window_;
  out.nx = nx_;
  out.ny = ny_;
  out.trials = trials_;
  out.total_points = points_;
  out.normalization_area = normalization_area;
  out.density.assign(counts_.size(), 0.0);
  if (trials_ > 0) {
    const double denom = static_cast<double>(trials_) * out.bin_area() * normalization_area;
    for (std::size_t i = 0; i < counts_.size(); ++i) out.density[i] = static_cast<double>(counts_[i]) / denom;
  }
  return out;
}

BinnedDensity estimate_rho1(std::span<const RescaledSpectrum> samples, const Window& window, int nx,
                            int ny) {
  if (samples.empty()) throw InputError("estimate_rho1: no samples");
  HistogramAccumulator acc(window, nx, ny);
  for (const auto& s : samples) {
    acc.add_trial();
    for (const Complex z : s.zeta) acc.add_point(z);
  }
  return acc.finish();
}

void accumulate_pairs(HistogramAccumulator& acc, std::span<const Complex> zeta, const Window& window) {
  for (std::size_t i = 0; i < zeta.size(); ++i) {
    if (!window.contains(zeta[i])) continue;
    for (std::size_t j = 0; j < zeta.size(); ++j) {
      if (j != i) acc.add_point(zeta[j] - zeta[i]);
    }
  }
}

BinnedDensity estimate_rho2(std::span<const RescaledSpectrum> samples, const Window& window,
                            const DisplacementBins& bins) {
  if (samples.empty()) throw InputError("estimate_rho2: no samples");
  window.validate();
  HistogramAccumulator acc(bins.window(), bins.bins, bins.bins);
  for (const auto& s : samples) {
    acc.add_trial();
    accumulate_pairs(acc, s.zeta, window);
  }
  return acc.finish(window.area());
}

RepulsionSummary pair_repulsion(const BinnedDensity& rho2, double plateau_min) {
  const auto bin_of = [](double v, double lo, double width, int n) {
    return std::clamp(static_cast<int>(std::floor((v - lo) / width)), 0, n - 1);
  };
  const int ix0 = bin_of(0.0, rho2.window.x0, rho2.bin_width(), rho2.nx);
  const int iy0 = bin_of(0.0, rho2.window.y0, rho2.bin_height(), rho2.ny);
  RepulsionSummary out;
  out.near_zero = rho2.at(ix0, iy0);
  double sum = 0.0;
  int count = 0;
  for (int ix = 0; ix < rho2.nx; ++ix) {
    if (std::abs(rho2.center(ix, iy0).real()) >= plateau_min) {
      sum += rho2.at(ix, iy0);
      ++count;
    }
  }
  if (count == 0) throw InputError("pair_repulsion: no bins beyond the plateau radius");
  out.plateau = sum / count;
  out.ratio = out.plateau > 0.0 ? out.near_zero / out.plateau : std::numeric_limits<double>::infinity();
  return out;
}

double linear_statistic(const TestFunction& f, const Spectrum& eigs, double energy, double scale) {
  if (f.k < 1 || f.k > 2) throw InputError("linear_statistic: only k = 1 and k = 2 are supported");
  std::vector<Complex> inside;
  for (const Complex z : eigs.values) {
    const Complex zeta = scale * (z - energy);
    if (f.support.contains(zeta)) inside.push_back(zeta);
  }
  double sum = 0.0;
  if (f.k == 1) {
    for (const Complex z : inside) sum += f.f(std::span<const Complex>(&z, 1));
    return sum;
  }
  std::array<Complex, 2> args;
  for (std::size_t i = 0; i < inside.size(); ++i) {
    for (std::size_t j = 0; j < inside.size(); ++j) {
      if (i == j) continue;
      args = {inside[i], inside[j]};
      sum += f.f(args);
    }
  }
  return sum;
}

ComparisonReport compare(const BinnedDensity& estimate, const std::function<double(Complex)>& theory,
                         double floor_fraction) {
  if (estimate.total_points == 0 || estimate.trials == 0) {
    throw NumericalError("degenerate comparison: the estimate contains no points");
  }
  std::vector<double> th(estimate.density.size());
  double th_max = 0.0;
  for (int iy = 0; iy < estimate.ny; ++iy) {
    for (int ix = 0; ix < estimate.nx; ++ix) {
      const double v = theory(estimate.center(ix, iy));
      th[static_cast<std::size_t>(iy * estimate.nx + ix)] = v;
      th_max = std::max(th_max, v);
    }
  }
  const double floor = floor_fraction * th_max;
  ComparisonReport r;
  double l1 = 0.0, l1_ref = 0.0, l2 = 0.0, l2_ref = 0.0, sup = 0.0;
  const double cell = static_cast<double>(estimate.trials) * estimate.bin_area() * estimate.normalization_area;
  for (std::size_t i = 0; i < th.size(); ++i) {
    if (!(th[i] > 0.0) || th[i] < floor) continue;
    const double diff = estimate.density[i] - th[i];
    l1 += std::abs(diff);
    l1_ref += th[i];
    l2 += diff * diff;
    l2_ref += th[i] * th[i];
    sup = std::max(sup, std::abs(diff));
    r.chi2_stat += diff * diff / (th[i] / cell);
    ++r.n_bins_used;
  }
  if (r.n_bins_used == 0) throw NumericalError("degenerate comparison: every bin is below the theory floor");
  r.rel_l1 = l1 / l1_ref;
  r.rel_l2 = std::sqrt(l2 / l2_ref);
  r.sup_err = sup / th_max;
  return r;
}

std::vector<double> y_marginal(const BinnedDensity& rho1) {
  std::vector<double> marginal(static_cast<std::size_t>(rho1.nx), 0.0);
  for (int ix = 0; ix < rho1.nx; ++ix) {
    for (int iy = 0; iy < rho1.ny; ++iy) marginal[static_cast<std::size_t>(ix)] += rho1.at(ix, iy) * rho1.bin_height();
  }
  return marginal;
}

namespace {

struct WorkerState {
  HistogramAccumulator rho1;
  HistogramAccumulator rho2;
};

}  // namespace

CorrelationRun run_correlation(const CorrelationConfig& config) {
  config.ensemble.validate();
  config.window.validate();
  if (config.trials < 1) throw InputError("correlation: trials must be >= 1");
  const bool gauss_divisible = config.scaling == BulkScaling::GaussDivisible;
  if (gauss_divisible && !(config.ensemble.t > 0.0)) {
    throw InputError("correlation: Gauss-divisible scaling needs t > 0");
  }
  const Index n = config.ensemble.n;
  const double tau_n = config.ensemble.tau_n;
  const double energy = config.energy;
  const double rho_sc = semicircle_density(energy);
  if (!gauss_divisible && !(rho_sc > 0.0)) throw InputError("correlation: E must lie in (-2, 2)");

  std::vector<double> tau_values(static_cast<std::size_t>(config.trials),
                                 std::numeric_limits<double>::quiet_NaN());
  std::vector<char> failed(static_cast<std::size_t>(config.trials), 0);

  auto states = run_trials<WorkerState>(
      config.trials, config.workers,
      [&] {
        return WorkerState{HistogramAccumulator(config.window, config.nx, config.ny),
                           HistogramAccumulator(config.rho2_bins.window(), config.rho2_bins.bins,
                                                config.rho2_bins.bins)};
      },
      [&](WorkerState& state, std::int64_t trial) {
        Engine engine = RngStream{config.ensemble.seed, static_cast<std::uint64_t>(trial)}.engine();
        WeakEllipticDraw draw = sample_weak_elliptic(n, tau_n, config.ensemble.atom, engine);
        const ComplexMatrix a_t = sample_gauss_divisible(draw.a, config.ensemble.t, tau_n, engine);

        double scale = static_cast<double>(n) * std::numbers::pi * rho_sc;
        Complex shift(0.0, 0.0);
        if (gauss_divisible) {
          const ResolventPair pair(draw.w1, draw.w2);
          SaddleResult saddle;
          try {
            saddle = solve_lambda(StieltjesFunction::spectral(pair), energy, config.ensemble.t, config.saddle);
          } catch (const Error&) {
            failed[static_cast<std::size_t>(trial)] = 1;
            if (config.on_trial_done) config.on_trial_done(trial);
            return;
          }
          const double beta = alpha_beta(pair, saddle.lambda, tau_n).beta;
          tau_values[static_cast<std::size_t>(trial)] =
              tau_et(beta, n, tau_n, saddle.eta, config.ensemble.t);
          scale = static_cast<double>(n) * saddle.eta / config.ensemble.t;
          shift = Complex(0.0, std::sqrt(tau_n) * pair.w2_trace());
        }

        const RescaledSpectrum r = rescale_bulk(general_eigen(a_t), energy, scale, shift, trial);
        state.rho1.add_trial();
        for (const Complex z : r.zeta) state.rho1.add_point(z);
        state.rho2.add_trial();
        accumulate_pairs(state.rho2, r.zeta, config.window);
        if (config.on_trial_done) config.on_trial_done(trial);
      });

  HistogramAccumulator rho1 = states.front().rho1;
  HistogramAccumulator rho2 = states.front().rho2;
  for (std::size_t w = 1; w < states.size(); ++w) {
    rho1.merge(states[w].rho1);
    rho2.merge(states[w].rho2);
  }

  CorrelationRun run;
  run.rho1 = rho1.finish();
  run.rho2 = rho2.finish(config.window.area());
  run.successful_trials = rho1.trials();
  for (std::int64_t i = 0; i < config.trials; ++i) {
    if (failed[static_cast<std::size_t>(i)]) run.failed_trials.push_back(i);
  }
  if (gauss_divisible) run.tau_et = tau_values;

  if (config.tau_theory) {
    run.tau_theory = *config.tau_theory;
  } else if (gauss_divisible) {
    double sum = 0.0;
    std::int64_t count = 0;
    for (double v : tau_values) {
      if (std::isfinite(v)) {
        sum += v;
        ++count;
      }
    }
    run.tau_theory = count > 0 ? sum / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
  } else {
    run.tau_theory = std::numbers::pi * rho_sc * static_cast<double>(n) * tau_n;
  }
  return run;
}

}  // namespace wnh

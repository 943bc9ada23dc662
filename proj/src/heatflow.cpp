#include "wnh/heatflow.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wnh/error.hpp"
#include "wnh/parallel.hpp"

namespace wnh {

namespace {

void check_same_grid(const GridDensity& a, const GridDensity& b) {
  if (a.size() != b.size() || a.h != b.h || a.half_width != b.half_width) {
    throw InputError("heatflow: densities live on different grids");
  }
}

unsigned negativity_flag(const std::vector<double>& v) {
  return std::any_of(v.begin(), v.end(), [](double x) { return x < 0.0; }) ? kNegativeValues : 0u;
}

double normal_tail_outside(double lo, double hi, double mean, double sd) {
  const double a = (lo - mean) / (sd * std::numbers::sqrt2);
  const double b = (hi - mean) / (sd * std::numbers::sqrt2);
  return 0.5 * std::erfc(-a) + 0.5 * std::erfc(b);
}

}  // namespace

double GridDensity::integral() const {
  if (values.size() < 2) return 0.0;
  double s = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) s += values[i];
  return s * h;
}

GridDensity sample_on_grid(double half_width, double h, const std::function<double(double)>& fn) {
  if (!(half_width > 0.0) || !(h > 0.0) || !std::isfinite(half_width) || !std::isfinite(h)) {
    throw InputError("grid: L and h must be positive");
  }
  const double cells = 2.0 * half_width / h;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells) || rounded < 2.0) {
    throw InputError("grid: 2L/h must be an integer >= 2");
  }
  GridDensity g;
  g.half_width = half_width;
  g.h = h;
  g.values.resize(static_cast<std::size_t>(rounded) + 1);
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = fn(g.x(i));
  g.flags = negativity_flag(g.values);
  return g;
}

GridDensity normalized(GridDensity f) {
  const double z = f.integral();
  if (!(z > 0.0) || !std::isfinite(z)) throw NumericalError("normalize: integral is not positive");
  for (double& v : f.values) v /= z;
  return f;
}

GridDensity stationary_density(double half_width, double h) {
  return sample_on_grid(half_width, h, [](double x) { return std::exp(-x * x) / std::sqrt(std::numbers::pi); });
}

GridDensity shifted_gaussian(double shift, double half_width, double h) {
  if (!std::isfinite(shift)) throw InputError("shifted_gaussian: shift must be finite");
  return normalized(sample_on_grid(half_width, h, [shift](double x) { return std::exp(-(x - shift) * (x - shift)); }));
}

GridDensity sine_perturbed_gaussian(double amplitude, double half_width, double h) {
  if (!(std::abs(amplitude) < 1.0)) throw InputError("sine_perturbed_gaussian: |amplitude| must be < 1");
  return normalized(sample_on_grid(half_width, h, [amplitude](double x) {
    return std::exp(-x * x) * (1.0 + amplitude * std::sin(x));
  }));
}

GridDensity ou_generator_apply(const GridDensity& f) {
  GridDensity out = f;
  const std::size_t n = f.size();
  const double h = f.h;
  const auto val = [&](std::ptrdiff_t i) {
    return (i < 0 || i >= static_cast<std::ptrdiff_t>(n)) ? 0.0 : f.values[static_cast<std::size_t>(i)];
  };
  const auto xf = [&](std::ptrdiff_t i) { return (-f.half_width + static_cast<double>(i) * h) * val(i); };
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    const double second = (val(i + 1) - 2.0 * val(i) + val(i - 1)) / (h * h);
    const double drift = (xf(i + 1) - xf(i - 1)) / (2.0 * h);
    out.values[static_cast<std::size_t>(i)] = 0.5 * second + drift;
  }
  out.flags = f.flags | (h > 1.0 / 16.0 ? kCoarseGrid : 0u);
  return out;
}

GridDensity reverse_approx_Tn(const GridDensity& f, double t, int n) {
  if (n < 1) throw InputError("reverse_approx_Tn: n must be >= 1");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("reverse_approx_Tn: t must be >= 0");
  GridDensity r = f;
  for (int m = n - 1; m >= 1; --m) {
    const GridDensity lr = ou_generator_apply(r);
    for (std::size_t i = 0; i < r.size(); ++i) r.values[i] = f.values[i] - t / m * lr.values[i];
    r.flags |= lr.flags;
  }
  if (n > 1 && t > 0.0 && t < 10.0 * f.h * f.h) r.flags |= kShortTime;
  r.flags = (r.flags & ~static_cast<unsigned>(kNegativeValues)) | negativity_flag(r.values);
  return r;
}

GridDensity semigroup_apply(const GridDensity& f, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError("semigroup_apply: t must be > 0");
  const std::size_t n = f.size();
  const double decay = std::exp(-t);
  const double var = -0.5 * std::expm1(-2.0 * t);
  const double sd = std::sqrt(var);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);

  std::vector<double> w(n, f.h);
  w.front() = w.back() = 0.5 * f.h;

  double in_mass = 0.0, lost = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double fj = f.values[j] * w[j];
    in_mass += fj;
    lost += std::abs(fj) * normal_tail_outside(-f.half_width, f.half_width, decay * f.x(j), sd);
  }
  double abs_mass = 0.0;
  for (std::size_t j = 0; j < n; ++j) abs_mass += std::abs(f.values[j]) * w[j];
  if (!(abs_mass > 0.0)) throw NumericalError("semigroup_apply: input has no mass");
  if (lost / abs_mass > 1e-8) {
    std::ostringstream msg;
    msg << "semigroup_apply: " << lost / abs_mass << " of the mass leaves [-L, L]; enlarge the domain";
    throw DomainError(msg.str());
  }

  GridDensity out = f;
  // The kernel is negligible beyond 40 standard deviations.
  const double reach = 40.0 * sd;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = f.x(i);
    const double xmin = (y - reach) / decay, xmax = (y + reach) / decay;
    const auto jlo = static_cast<std::size_t>(std::clamp(std::floor((xmin + f.half_width) / f.h), 0.0,
                                                         static_cast<double>(n - 1)));
    const auto jhi = static_cast<std::size_t>(std::clamp(std::ceil((xmax + f.half_width) / f.h), 0.0,
                                                         static_cast<double>(n - 1)));
    double s = 0.0;
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const double d = y - decay * f.x(j);
      s += w[j] * f.values[j] * std::exp(-d * d / (2.0 * var));
    }
    out.values[i] = norm * s;
  }
  const double out_mass = out.integral();
  if (!(out_mass > 0.0)) throw NumericalError("semigroup_apply: output mass is not positive");
  for (double& v : out.values) v /= out_mass;
  out.flags = (f.flags & ~static_cast<unsigned>(kNegativeValues)) | negativity_flag(out.values);
  return out;
}

Chi2Result chi2_divergence(const GridDensity& g, const GridDensity& f) {
  check_same_grid(g, f);
  constexpr double kFloor = 1e-12;
  const double f_max = *std::max_element(f.values.begin(), f.values.end());
  Chi2Result r;
  std::vector<double> integrand(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double gi = g.values[i];
    if (gi <= 0.0 && std::abs(f.values[i]) > 1e-10 * f_max) r.negative_density = true;
    gi = std::max(gi, kFloor);
    const double d = g.values[i] - f.values[i];
    const double x = f.x(i);
    integrand[i] = d * d / gi * std::exp(-x * x);
  }
  GridDensity tmp = f;
  tmp.values = std::move(integrand);
  r.value = tmp.integral();
  return r;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InputError("slope fit: need >= 2 matched points");
  double sx = 0.0, sy = 0.0;
  const double n = static_cast<double>(x.size());
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("slope fit: non-positive value in log-log fit");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (lx[i] - sx / n) * (lx[i] - sx / n);
    sxy += (lx[i] - sx / n) * (ly[i] - sy / n);
  }
  if (!(sxx > 0.0)) throw InputError("slope fit: abscissae must differ");
  return sxy / sxx;
}

ScalingResult run_scaling_experiment(const GridDensity& f, const std::vector<double>& times,
                                     const std::vector<int>& orders, int workers) {
  if (times.empty() || orders.empty()) throw InputError("scaling experiment: empty t or n list");
  ScalingResult result;
  result.points.resize(times.size() * orders.size());
  for (std::size_t a = 0; a < orders.size(); ++a) {
    for (std::size_t b = 0; b < times.size(); ++b) {
      result.points[a * times.size() + b].n = orders[a];
      result.points[a * times.size() + b].t = times[b];
    }
  }
  struct Nothing {};
  run_trials<Nothing>(
      static_cast<std::int64_t>(result.points.size()), workers, [] { return Nothing{}; },
      [&](Nothing&, std::int64_t k) {
        ScalingPoint& p = result.points[static_cast<std::size_t>(k)];
        const GridDensity g = semigroup_apply(reverse_approx_Tn(f, p.t, p.n), p.t);
        const Chi2Result c = chi2_divergence(g, f);
        p.chi2 = c.value;
        p.negative_density = c.negative_density;
      });
  if (times.size() >= 2) {
    for (std::size_t a = 0; a < orders.size(); ++a) {
      std::vector<double> ts, cs;
      for (std::size_t b = 0; b < times.size(); ++b) {
        ts.push_back(times[b]);
        cs.push_back(result.points[a * times.size() + b].chi2);
      }
      result.slopes[orders[a]] = fit_loglog_slope(ts, cs);
    }
  }
  return result;
}

}  // namespace wnh

#include "wnh/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wnh/diagnostics.hpp"
#include "wnh/error.hpp"

namespace wnh {

// Tabulated density and CDF on a uniform grid covering all but ~e^{-40} of
// the mass. The trapezoid rule is spectrally accurate for these integrands.
struct AtomDistribution::Table {
  double lo = 0.0;
  double step = 0.0;
  double norm = 1.0;      // Z
  double variance = 0.5;  // of the normalized density
  std::vector<double> cdf;
};

namespace {

constexpr int kTableCells = 1 << 14;

double exponent(const std::array<double, 4>& a, double x) {
  const double s = x * x;
  return s + s * (a[0] + s * (a[1] + s * (a[2] + s * a[3])));
}

void validate_potential(const std::array<double, 4>& a, double delta) {
  for (double c : a) {
    if (!std::isfinite(c)) throw InputError("atom potential: non-finite coefficient");
  }
  if (!(delta > 0.0 && delta <= 1.0)) throw InputError("atom potential: delta must lie in (0, 1]");
  // V(x) + (1 - delta) x^2 = s * q(s) with s = x^2 and
  // q(s) = (a1 + 1 - delta) + a2 s + a3 s^2 + a4 s^3.
  int leading = -1;
  for (int j = 3; j >= 1; --j) {
    if (a[static_cast<std::size_t>(j)] != 0.0) {
      leading = j;
      break;
    }
  }
  if (leading >= 1 && a[static_cast<std::size_t>(leading)] < 0.0) {
    throw InputError("atom potential: leading coefficient is negative, density not normalizable");
  }
  auto q = [&](double s) { return (a[0] + 1.0 - delta) + s * (a[1] + s * (a[2] + s * a[3])); };
  for (int i = 0; i <= 200000; ++i) {
    const double s = 1e-3 * i;
    if (q(s) < 0.0) {
      std::ostringstream os;
      os << "atom potential violates V(x) >= -(1 - delta) x^2 at x = " << std::sqrt(s);
      throw InputError(os.str());
    }
  }
}

}  // namespace

AtomDistribution::AtomDistribution(Kind kind, std::array<double, 4> coeffs, double delta)
    : kind_(kind), coeffs_(coeffs), delta_(delta) {}

AtomDistribution AtomDistribution::gaussian() {
  return AtomDistribution(Kind::Gaussian, {0.0, 0.0, 0.0, 0.0}, 1.0);
}

AtomDistribution AtomDistribution::smoothed(std::array<double, 4> coeffs, double delta) {
  validate_potential(coeffs, delta);
  AtomDistribution atom(Kind::Smoothed, coeffs, delta);

  double half_width = 1.0;
  while (exponent(coeffs, half_width) < 40.0) half_width *= 1.25;

  auto table = std::make_shared<Table>();
  table->lo = -half_width;
  table->step = 2.0 * half_width / kTableCells;
  std::vector<double> f(kTableCells + 1);
  for (int i = 0; i <= kTableCells; ++i) {
    f[static_cast<std::size_t>(i)] = std::exp(-exponent(coeffs, table->lo + i * table->step));
  }
  table->cdf.assign(kTableCells + 1, 0.0);
  double second = 0.0;
  for (int i = 1; i <= kTableCells; ++i) {
    const auto k = static_cast<std::size_t>(i);
    table->cdf[k] = table->cdf[k - 1] + 0.5 * table->step * (f[k - 1] + f[k]);
  }
  for (int i = 0; i <= kTableCells; ++i) {
    const double x = table->lo + i * table->step;
    second += table->step * x * x * f[static_cast<std::size_t>(i)];
  }
  table->norm = table->cdf.back();
  table->variance = second / table->norm;
  for (double& c : table->cdf) c /= table->norm;
  atom.table_ = std::move(table);
  return atom;
}

double AtomDistribution::potential(double x) const {
  const double s = x * x;
  return s * (coeffs_[0] + s * (coeffs_[1] + s * (coeffs_[2] + s * coeffs_[3])));
}

double AtomDistribution::density(double x) const {
  if (kind_ == Kind::Gaussian) return std::exp(-x * x) / std::sqrt(std::numbers::pi);
  return std::exp(-exponent(coeffs_, x)) / table_->norm;
}

double AtomDistribution::variance() const {
  return kind_ == Kind::Gaussian ? 0.5 : table_->variance;
}

double AtomDistribution::sample(Engine& engine) const {
  if (kind_ == Kind::Gaussian) return std::normal_distribution<double>(0.0, std::sqrt(0.5))(engine);
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(engine);
  const auto& cdf = table_->cdf;
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const auto k = static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(it - cdf.begin(), 1,
                                                                     static_cast<std::ptrdiff_t>(cdf.size()) - 1));
  const double c0 = cdf[k - 1];
  const double c1 = cdf[k];
  const double frac = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
  return table_->lo + (static_cast<double>(k - 1) + frac) * table_->step;
}

double AtomDistribution::sample_standardized(Engine& engine) const {
  if (kind_ == Kind::Gaussian) return std::normal_distribution<double>(0.0, 1.0)(engine);
  return sample(engine) / std::sqrt(table_->variance);
}

double atom_density(const AtomDistribution& atom, double x) { return atom.density(x); }

void EnsembleSpec::validate() const {
  if (n < 2) throw InputError("ensemble: N must be at least 2");
  if (!(tau_n >= 0.0 && tau_n <= 1.0)) throw InputError("ensemble: tau_N must lie in [0, 1]");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("ensemble: t must be finite and >= 0");
}

namespace {

template <typename Draw>
HermitianMatrix fill_hermitian(Index n, Draw&& draw) {
  if (n < 1) throw InputError("sampler: dimension must be positive");
  DenseMatrix h(n, n);
  const double diag_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double off_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(n));
  for (Index j = 0; j < n; ++j) {
    h(j, j) = Complex(draw() * diag_scale, 0.0);
    for (Index i = j + 1; i < n; ++i) {
      const double re = draw() * off_scale;
      const double im = draw() * off_scale;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return HermitianMatrix(std::move(h));
}

void require_tau(double tau_n) {
  if (!(tau_n >= 0.0 && tau_n <= 1.0)) throw InputError("tau_N must lie in [0, 1]");
}

}  // namespace

HermitianMatrix sample_gue(Index n, Engine& engine) {
  std::normal_distribution<double> normal(0.0, 1.0);
  return fill_hermitian(n, [&] { return normal(engine); });
}

HermitianMatrix sample_wigner(Index n, const AtomDistribution& atom, Engine& engine) {
  if (atom.kind() == AtomDistribution::Kind::Gaussian) return sample_gue(n, engine);
  return fill_hermitian(n, [&] { return atom.sample_standardized(engine); });
}

ComplexMatrix sample_elliptic(Index n, double tau_n, Engine& engine) {
  require_tau(tau_n);
  const HermitianMatrix v1 = sample_gue(n, engine);
  const HermitianMatrix v2 = sample_gue(n, engine);
  return ComplexMatrix(v1.dense() + Complex(0.0, std::sqrt(tau_n)) * v2.dense());
}

WeakEllipticDraw sample_weak_elliptic(Index n, double tau_n, const AtomDistribution& atom,
                                      Engine& engine) {
  require_tau(tau_n);
  HermitianMatrix w1 = sample_wigner(n, atom, engine);
  HermitianMatrix w2 = sample_wigner(n, atom, engine);
  ComplexMatrix a(w1.dense() + Complex(0.0, std::sqrt(tau_n)) * w2.dense());
  return WeakEllipticDraw{std::move(a), std::move(w1), std::move(w2)};
}

ComplexMatrix sample_gauss_divisible(const ComplexMatrix& a, double t, double tau_n,
                                     Engine& engine) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("gauss-divisible: t must be finite and >= 0");
  require_tau(tau_n);
  if (t == 0.0) return a;
  return gauss_divisible(a, sample_elliptic(a.size(), tau_n, engine), t);
}

ComplexMatrix gauss_divisible(const ComplexMatrix& a, const ComplexMatrix& b, double t) {
  if (a.size() != b.size()) throw InputError("gauss-divisible: A and B differ in size");
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError("gauss-divisible: t must be finite and >= 0");
  return ComplexMatrix(a.dense() + std::sqrt(t) * b.dense());
}

double tau_n_for_effective(double tau_e, Index n, double energy) {
  const double rho = semicircle_density(energy);
  if (rho <= 0.0) throw DomainError("tau_n_for_effective: energy outside the bulk (-2, 2)");
  return tau_e / (static_cast<double>(n) * std::numbers::pi * rho);
}

}  // namespace wnh

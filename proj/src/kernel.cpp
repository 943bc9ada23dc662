#include "wnh/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wnh/error.hpp"
#include "wnh/quadrature.hpp"

namespace wnh {

void KernelParams::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    std::ostringstream os;
    os << "kernel: tau must be finite and positive, got " << tau;
    throw InputError(os.str());
  }
  if (order < 16) throw InputError("kernel: quadrature order must be at least 16");
}

double kernel_validity_half_width(double tau) { return 6.0 * std::sqrt(tau) + 6.0; }

Complex kernel_K(const KernelParams& params, Complex z, Complex w) {
  params.validate();
  const double tau = params.tau;
  const double dx = z.real() - w.real();
  const double s = z.imag() + w.imag();
  // exp(-i l (z - conj w)) = exp(-i l dx) exp(l s)
  const double log_prefactor = -1.5 * std::log(2.0 * std::numbers::pi) - 0.5 * std::log(tau) -
                               (z.imag() * z.imag() + w.imag() * w.imag()) / (4.0 * tau);
  // Factor out the maximum of -2 tau l^2 + l s on [-1, 1].
  const double l_star = std::clamp(s / (4.0 * tau), -1.0, 1.0);
  const double g_star = -2.0 * tau * l_star * l_star + l_star * s;

  const double c_abs = std::hypot(dx, s);
  const auto& rule = gauss_legendre(c_abs > 30.0 ? 2 * params.order : params.order);
  double re = 0.0;
  double im = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double l = rule.nodes[k];
    const double mag = rule.weights[k] * std::exp(-2.0 * tau * l * l + l * s - g_star);
    const double phase = l * dx;
    re += mag * std::cos(phase);
    im -= mag * std::sin(phase);
  }
  return std::exp(log_prefactor + g_star) * Complex(re, im);
}

DenseMatrix kernel_matrix(const KernelParams& params, const std::vector<Complex>& points) {
  const auto k = static_cast<Index>(points.size());
  DenseMatrix out(k, k);
  for (Index j = 0; j < k; ++j) {
    out(j, j) = kernel_K(params, points[static_cast<std::size_t>(j)], points[static_cast<std::size_t>(j)]).real();
    for (Index l = j + 1; l < k; ++l) {
      const Complex v = kernel_K(params, points[static_cast<std::size_t>(j)], points[static_cast<std::size_t>(l)]);
      out(j, l) = v;
      out(l, j) = std::conj(v);
    }
  }
  return out;
}

KernelGrid evaluate_kernel_grid(const KernelParams& params, std::vector<Complex> points) {
  params.validate();
  KernelGrid grid{params, std::move(points), {}};
  grid.values = kernel_matrix(params, grid.points);
  return grid;
}

CorrelationValue rho_k(const KernelParams& params, const std::vector<Complex>& points) {
  if (points.empty() || points.size() > 8) throw InputError("rho_k: need 1 <= k <= 8 points");
  CorrelationValue out;
  for (std::size_t i = 0; i < points.size() && !out.duplicate_points; ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (points[i] == points[j]) {
        out.duplicate_points = true;
        break;
      }
    }
  }
  const DenseMatrix kmat = kernel_matrix(params, points);
  const Complex det = kmat.partialPivLu().determinant();
  if (std::abs(det.imag()) > 1e-10) {
    std::ostringstream os;
    os << "rho_k: determinant has imaginary part " << det.imag();
    throw NumericalError(os.str());
  }
  if (det.real() < -1e-10) {
    std::ostringstream os;
    os << "rho_k: negative determinant " << det.real();
    throw NumericalError(os.str());
  }
  out.value = det.real();
  return out;
}

double rho_1(const KernelParams& params, Complex z) { return kernel_K(params, z, z).real(); }

double marginal_density(const KernelParams& params, double /*x*/) {
  params.validate();
  return 1.0 / std::numbers::pi;
}

}  // namespace wnh

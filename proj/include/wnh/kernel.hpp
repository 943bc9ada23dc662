#pragma once

#include <vector>

#include "wnh/linalg.hpp"

namespace wnh {

// Parameters of the bulk kernel
//   K_tau(z, w) = (2 pi)^{-3/2} tau^{-1/2} exp(-[(Im z)^2 + (Im w)^2] / (4 tau))
//                 * int_{-1}^{1} exp(-2 tau l^2 - i l (z - conj(w))) dl.
struct KernelParams {
  double tau = 1.0;
  int order = 64;  // Gauss-Legendre order; doubled when |z - conj(w)| > 30

  // Throws InputError unless tau is finite and positive and order >= 16.
  void validate() const;
};

// Half-width in Im of the region where kernel_K meets its 1e-12 accuracy target.
double kernel_validity_half_width(double tau);

Complex kernel_K(const KernelParams& params, Complex z, Complex w);

// [K_tau(z_j, z_l)], Hermitian by construction.
DenseMatrix kernel_matrix(const KernelParams& params, const std::vector<Complex>& points);

struct KernelGrid {
  KernelParams params;
  std::vector<Complex> points;
  DenseMatrix values;
};

KernelGrid evaluate_kernel_grid(const KernelParams& params, std::vector<Complex> points);

struct CorrelationValue {
  double value = 0.0;
  bool duplicate_points = false;  // determinant vanishes identically
};

// rho^{(k)}_tau(z_1..z_k) = det [K_tau(z_j, z_l)], 1 <= k <= 8.
// Throws NumericalError if the determinant has an imaginary part above 1e-10
// or is below -1e-10.
CorrelationValue rho_k(const KernelParams& params, const std::vector<Complex>& points);

// One-point function K_tau(z, z).
double rho_1(const KernelParams& params, Complex z);

// y-marginal of the one-point function, int_R K_tau(x + iy, x + iy) dy.
// The y-integral of the prefactor gives sqrt(2 pi tau) exp(2 tau l^2), which
// cancels exp(-2 tau l^2), so the marginal equals 1/pi for every tau and x.
double marginal_density(const KernelParams& params, double x);

}  // namespace wnh

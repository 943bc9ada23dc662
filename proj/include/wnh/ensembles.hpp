#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "wnh/linalg.hpp"
#include "wnh/rng.hpp"

namespace wnh {

// Atom distribution dnu(x) ∝ exp(-V(x) - x^2) dx with
// V(x) = sum_{j=1..4} coeffs[j-1] * x^{2j}. The gaussian kind is V == 0.
//
// Validity: the density must be normalizable and V(x) >= -(1 - delta) x^2.
// Wigner entries use the atom rescaled to unit variance, so every valid atom
// produces the semicircle law on [-2, 2].
class AtomDistribution {
 public:
  enum class Kind { Gaussian, Smoothed };

  static AtomDistribution gaussian();
  // Throws InputError if the potential violates the validity conditions.
  static AtomDistribution smoothed(std::array<double, 4> coeffs, double delta = 0.5);

  Kind kind() const { return kind_; }
  const std::array<double, 4>& coeffs() const { return coeffs_; }
  double delta() const { return delta_; }

  double potential(double x) const;
  // Normalized density exp(-V(x) - x^2) / Z.
  double density(double x) const;
  // Second moment of the normalized density (the atom is symmetric).
  double variance() const;

  // One raw draw from the normalized density.
  double sample(Engine& engine) const;
  // One draw rescaled to unit variance.
  double sample_standardized(Engine& engine) const;

 private:
  struct Table;

  AtomDistribution(Kind kind, std::array<double, 4> coeffs, double delta);

  Kind kind_;
  std::array<double, 4> coeffs_{};
  double delta_ = 0.5;
  std::shared_ptr<const Table> table_;  // immutable, shared between copies
};

double atom_density(const AtomDistribution& atom, double x);

struct EnsembleSpec {
  Index n = 2;
  double tau_n = 0.0;
  double t = 0.0;
  AtomDistribution atom = AtomDistribution::gaussian();
  std::uint64_t seed = 0;

  // Throws InputError on N < 2, tau_N outside [0, 1] or t < 0.
  void validate() const;
};

// Diagonal entries N(0, 1/N); off-diagonal real and imaginary parts
// independent N(0, 1/(2N)).
HermitianMatrix sample_gue(Index n, Engine& engine);

// Diagonal entries atom/sqrt(N); off-diagonal real and imaginary parts
// atom/sqrt(2N), with the atom standardized to unit variance.
HermitianMatrix sample_wigner(Index n, const AtomDistribution& atom, Engine& engine);

// V1 + i sqrt(tau_N) V2 with independent GUE V1, V2.
ComplexMatrix sample_elliptic(Index n, double tau_n, Engine& engine);

struct WeakEllipticDraw {
  ComplexMatrix a;
  HermitianMatrix w1;
  HermitianMatrix w2;
};

// A = W1 + i sqrt(tau_N) W2 with independent Wigner W1, W2.
WeakEllipticDraw sample_weak_elliptic(Index n, double tau_n, const AtomDistribution& atom,
                                      Engine& engine);

// A + sqrt(t) B with B a fresh elliptic draw at the same tau_N.
ComplexMatrix sample_gauss_divisible(const ComplexMatrix& a, double t, double tau_n,
                                     Engine& engine);

// A + sqrt(t) B for a given B; throws InputError on a size mismatch.
ComplexMatrix gauss_divisible(const ComplexMatrix& a, const ComplexMatrix& b, double t);

// tau_N such that N tau_N pi rho_sc(E) equals tau_E.
double tau_n_for_effective(double tau_e, Index n, double energy);

}  // namespace wnh

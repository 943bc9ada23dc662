#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wnh/diagnostics.hpp"
#include "wnh/linalg.hpp"

namespace wnh {

// A Stieltjes transform together with its derivative.
struct StieltjesFunction {
  std::function<Complex(Complex)> value;
  std::function<Complex(Complex)> derivative;

  static StieltjesFunction semicircle();
  // Spectral m_N of W1. The pair must outlive the returned object.
  static StieltjesFunction spectral(const ResolventPair& pair);
};

struct SaddleResult {
  Complex lambda;
  double u = 0.0;
  double eta = 0.0;
  double residual = 0.0;
  int iterations = 0;
  double energy = 0.0;
  double t = 0.0;
  bool used_fallback = false;
  bool energy_outside_bulk = false;
  std::optional<double> tau_et;
};

struct SaddleOptions {
  double tol = 1e-13;
  double imag_rel_tol = 1e-12;  // |Im F| <= imag_rel_tol * eta
  int max_iter = 200;
};

// Solves lambda = E + t m(lambda) in the upper half plane by Newton's method
// on F(lambda) = lambda - E - t m(lambda), F' = 1 - t m'(lambda), starting
// from E + i t pi rho_sc(E) (E + i t outside the bulk). A step that leaves
// the upper half plane is replaced by damped fixed-point steps.
//
// Converged when |F| <= tol and |Im F| <= imag_rel_tol * Im(lambda). Throws
// NumericalError after max_iter iterations (the message lists the last
// iterates), which includes iterates collapsing onto a real root of a discrete
// m_N, and DomainError if t <= 0.
SaddleResult solve_lambda(const StieltjesFunction& m, double energy, double t,
                          const SaddleOptions& options = {});

// tau_{E,t} = beta + N tau_N eta^2 / t
double tau_et(double beta_at_lambda, Index n, double tau_n, double eta, double t);

// N tau_N eta Im m(lambda), the bracket whose large-N limit defines tau_E.
// Equal to N tau_N eta^2 / t at the fixed point.
double tau_e_bracket_term(Index n, double tau_n, double eta, Complex m_at_lambda);

struct EtaBoundsCheck {
  bool pass = false;
  bool eta_pass = false;
  bool u_pass = false;
  bool u_lower_skipped = false;
  double eta_over_t = 0.0;
  double u_shift_over_t = 0.0;  // |u - E| / t
  double eta_margin = 0.0;      // worst relative slack of t/C <= eta <= C t
  double u_margin = 0.0;
};

// Checks t/C <= eta <= C t and t/C <= |u - E| <= C t. The lower bound on
// |u - E| is skipped when |Re m(lambda)| = |u - E| / t < 0.05.
EtaBoundsCheck verify_eta_bounds(const SaddleResult& result, double c);

}  // namespace wnh

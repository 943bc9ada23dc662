#include "wnh/saddle.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "wnh/error.hpp"

namespace wnh {

StieltjesFunction StieltjesFunction::semicircle() {
  return {[](Complex z) { return semicircle_m(z); }, [](Complex z) { return semicircle_m_prime(z); }};
}

StieltjesFunction StieltjesFunction::spectral(const ResolventPair& pair) {
  return {[&pair](Complex z) { return stieltjes_m(pair, z); },
          [&pair](Complex z) { return m_prime(pair, z); }};
}

SaddleResult solve_lambda(const StieltjesFunction& m, double energy, double t,
                          const SaddleOptions& options) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("solve_lambda: t must be positive");
  if (!std::isfinite(energy)) throw InputError("solve_lambda: non-finite energy");

  SaddleResult out;
  out.energy = energy;
  out.t = t;
  out.energy_outside_bulk = std::abs(energy) >= 2.0;

  const double rho = semicircle_density(energy);
  auto residual_of = [&](Complex l) { return l - energy - t * m.value(l); };

  // The imaginary part is also tested relative to eta: for a discrete m_N and
  // t below the eigenvalue spacing, iterates can slide onto a real root with a
  // tiny absolute residual while Im(lambda) collapses. For t below the squared
  // spacing an upper root may not exist at all; a second start higher in the
  // plane catches the cases where it does.
  auto converged = [&](Complex l, Complex r) {
    return std::abs(r) <= options.tol && std::abs(r.imag()) <= options.imag_rel_tol * l.imag();
  };
  const double starts[] = {rho > 0.0 ? t * std::numbers::pi * rho : t, std::sqrt(t)};
  std::vector<Complex> history;
  Complex lambda;
  Complex f;
  for (const double eta0 : starts) {
    lambda = Complex(energy, eta0);
    f = residual_of(lambda);
    for (int iter = 1; iter <= options.max_iter; ++iter) {
      if (converged(lambda, f)) break;
      history.push_back(lambda);
      Complex next = lambda - f / (1.0 - t * m.derivative(lambda));
      if (!(next.imag() > 0.0) || !std::isfinite(next.real()) || !std::isfinite(next.imag())) {
        // Damped fixed-point step lambda <- E + t m(lambda).
        out.used_fallback = true;
        next = 0.5 * lambda + 0.5 * (energy + t * m.value(lambda));
      }
      lambda = next;
      ++out.iterations;
      if (!(lambda.imag() > 1e-12 * t)) break;  // collapsed onto the real axis
      f = residual_of(lambda);
    }
    if (converged(lambda, f)) break;
  }
  out.residual = std::abs(f);
  if (!converged(lambda, f)) {
    std::ostringstream os;
    os << "solve_lambda did not converge in " << options.max_iter << " iterations from either start at E=" << energy
       << ", t=" << t << "; residual " << out.residual << "; last iterates:";
    const std::size_t first = history.size() > 5 ? history.size() - 5 : 0;
    for (std::size_t i = first; i < history.size(); ++i) os << " " << history[i];
    throw NumericalError(os.str());
  }
  if (!(lambda.imag() > 0.0)) {
    std::ostringstream os;
    os << "solve_lambda converged to lambda=" << lambda << " outside the upper half plane";
    throw DomainError(os.str());
  }
  out.lambda = lambda;
  out.u = lambda.real();
  out.eta = lambda.imag();
  return out;
}

double tau_et(double beta_at_lambda, Index n, double tau_n, double eta, double t) {
  if (!(eta > 0.0) || !(t > 0.0)) throw DomainError("tau_et: eta and t must be positive");
  return beta_at_lambda + static_cast<double>(n) * tau_n * eta * eta / t;
}

double tau_e_bracket_term(Index n, double tau_n, double eta, Complex m_at_lambda) {
  return static_cast<double>(n) * tau_n * eta * m_at_lambda.imag();
}

EtaBoundsCheck verify_eta_bounds(const SaddleResult& r, double c) {
  if (!(c >= 1.0)) throw InputError("verify_eta_bounds: C must be >= 1");
  EtaBoundsCheck out;
  out.eta_over_t = r.eta / r.t;
  out.u_shift_over_t = std::abs(r.u - r.energy) / r.t;

  out.eta_margin = std::min(out.eta_over_t * c - 1.0, 1.0 - out.eta_over_t / c);
  out.eta_pass = out.eta_margin >= 0.0;

  // At the fixed point u - E = t Re m(lambda).
  out.u_lower_skipped = out.u_shift_over_t < 0.05;
  const double upper = 1.0 - out.u_shift_over_t / c;
  out.u_margin = out.u_lower_skipped ? upper : std::min(out.u_shift_over_t * c - 1.0, upper);
  out.u_pass = out.u_margin >= 0.0;
  out.pass = out.eta_pass && out.u_pass;
  return out;
}

}  // namespace wnh

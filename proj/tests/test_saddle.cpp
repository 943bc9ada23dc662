#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wnh/diagnostics.hpp"
#include "wnh/ensembles.hpp"
#include "wnh/error.hpp"
#include "wnh/saddle.hpp"

using namespace wnh;

TEST_SUITE("saddle") {
  TEST_CASE("closed form at E = 0") {
    const auto sc = StieltjesFunction::semicircle();
    for (double t : {1e-1, 1e-2, 1e-3}) {
      const SaddleResult r = solve_lambda(sc, 0.0, t);
      CHECK(std::abs(r.eta - t / std::sqrt(1.0 + t)) <= 1e-10);
      CHECK(r.residual <= 1e-12);
      CHECK(std::abs(r.lambda - 0.0 - t * semicircle_m(r.lambda)) <= 1e-12);
      CHECK(r.u == r.lambda.real());
      CHECK(r.eta == r.lambda.imag());
      CHECK(std::abs(r.u) <= 1e-15);
    }
  }

  TEST_CASE("eta / t approaches pi rho_sc(E)") {
    const auto sc = StieltjesFunction::semicircle();
    for (double e : {0.0, 0.5, 1.0}) {
      const SaddleResult r = solve_lambda(sc, e, 1e-3);
      CHECK(r.eta / r.t == doctest::Approx(std::numbers::pi * semicircle_density(e)).epsilon(0.03));
    }
    const SaddleResult r = solve_lambda(sc, 0.5, 1e-2);
    CHECK(r.eta / r.t == doctest::Approx(std::numbers::pi * semicircle_density(0.5)).epsilon(0.03));
  }

  TEST_CASE("Newton converges quickly across the bulk") {
    const auto sc = StieltjesFunction::semicircle();
    for (double e = -1.5; e <= 1.5 + 1e-12; e += 0.5) {
      for (double t : {1e-1, 1e-2, 1e-3}) {
        const SaddleResult r = solve_lambda(sc, e, t);
        CHECK(r.iterations <= 30);
        CHECK(r.eta > 0.0);
        // Reflection: conj(lambda) solves the same equation in the lower half plane.
        const Complex lb = std::conj(r.lambda);
        CHECK(std::abs(lb - e - t * semicircle_m(lb)) <= 1e-12);
      }
    }
  }

  TEST_CASE("eta increases with t at E = 0") {
    const auto sc = StieltjesFunction::semicircle();
    double prev = 0.0;
    for (double t = 0.001; t < 1.0; t *= 1.5) {
      const double eta = solve_lambda(sc, 0.0, t).eta;
      CHECK(eta > prev);
      prev = eta;
    }
  }

  TEST_CASE("solver errors") {
    const auto sc = StieltjesFunction::semicircle();
    CHECK_THROWS_AS(solve_lambda(sc, 0.0, 0.0), DomainError);
    CHECK_THROWS_AS(solve_lambda(sc, 0.0, -1.0), DomainError);
    SaddleOptions opts;
    opts.max_iter = 1;
    opts.tol = 1e-300;
    try {
      solve_lambda(sc, 0.3, 0.1, opts);
      FAIL("expected a NumericalError");
    } catch (const NumericalError& e) {
      CHECK(std::string(e.what()).find("iterates") != std::string::npos);
    }
  }

  TEST_CASE("discrete m_N below the spacing scale") {
    // With t << 1/N the iteration can drift onto a real root; that must be
    // reported, not returned as a saddle with a tiny eta.
    constexpr Index n = 256;
    Engine eng = RngStream{505, 0}.engine();
    const ResolventPair pair(sample_gue(n, eng));
    const auto sp = StieltjesFunction::spectral(pair);
    int converged = 0, refused = 0;
    for (double e = -1.6; e <= 1.6; e += 0.2) {
      try {
        const SaddleResult r = solve_lambda(sp, e, 1e-3);
        CHECK(std::abs(r.eta - 1e-3 * sp.value(r.lambda).imag()) <= 1e-12 * r.eta);
        ++converged;
      } catch (const NumericalError&) {
        ++refused;
      }
    }
    CHECK(refused > 0);
    CHECK(converged > 0);
    const SaddleResult r = solve_lambda(sp, 0.0, 0.1);
    CHECK(r.eta / r.t == doctest::Approx(1.0).epsilon(0.1));
  }

  TEST_CASE("tau_et") {
    CHECK(tau_et(0.0, 100, 0.0, 0.3, 0.1) == 0.0);
    CHECK(tau_et(0.7, 100, 0.0, 0.3, 0.1) == 0.7);
    CHECK_THROWS_AS(tau_et(0.1, 10, 0.1, 0.0, 0.1), DomainError);

    const auto sc = StieltjesFunction::semicircle();
    for (double e : {-1.0, 0.0, 0.4}) {
      for (double t : {0.1, 0.01}) {
        const SaddleResult r = solve_lambda(sc, e, t);
        const double n = 300.0, tau = 1.0 / 300.0;
        const double a = n * tau * r.eta * r.eta / t;
        const double b = tau_e_bracket_term(300, tau, r.eta, semicircle_m(r.lambda));
        const double te = tau_et(0.5, 300, tau, r.eta, t);
        CHECK(std::abs(a - b) / te <= 1e-10);
      }
    }
  }

  TEST_CASE("tau_et for a GUE pair") {
    constexpr Index n = 512;
    const double tau = 1.0 / n;
    const double t = 1.0 / std::sqrt(static_cast<double>(n));
    Engine eng = RngStream{200, 0}.engine();
    const WeakEllipticDraw d = sample_weak_elliptic(n, tau, AtomDistribution::gaussian(), eng);
    const ResolventPair pair(d.w1, d.w2);
    const SaddleResult r = solve_lambda(StieltjesFunction::spectral(pair), 0.0, t);
    const double beta = alpha_beta(pair, r.lambda, tau).beta;
    const double value = tau_et(beta, n, tau, r.eta, t);
    const double rho = semicircle_density(0.0);
    const double expected = n * tau * std::numbers::pi * rho * (1.0 + std::numbers::pi * t * rho);
    CHECK(value == doctest::Approx(expected).epsilon(0.10));
  }

  TEST_CASE("verify_eta_bounds") {
    const auto sc = StieltjesFunction::semicircle();
    const SaddleResult r0 = solve_lambda(sc, 0.0, 0.01);
    const EtaBoundsCheck c0 = verify_eta_bounds(r0, 2.0);
    CHECK(c0.eta_pass);
    CHECK(c0.eta_over_t == doctest::Approx(0.995037).epsilon(1e-6));
    CHECK(r0.u == 0.0);
    CHECK(c0.u_lower_skipped);
    CHECK(c0.pass);

    // pi rho_sc(0.8) = 0.9165 < 1/C for C = 1.0001.
    const SaddleResult r8 = solve_lambda(sc, 0.8, 1e-3);
    const EtaBoundsCheck c8 = verify_eta_bounds(r8, 1.0001);
    CHECK_FALSE(c8.eta_pass);
    CHECK(c8.eta_margin < 0.0);
    CHECK_THROWS_AS(verify_eta_bounds(r8, 0.5), InputError);
  }
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wnh/error.hpp"
#include "wnh/heatflow.hpp"

using namespace wnh;

namespace {

double max_abs(const GridDensity& a) {
  double m = 0.0;
  for (double v : a.values) m = std::max(m, std::abs(v));
  return m;
}

double max_diff(const GridDensity& a, const GridDensity& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.values[i] - b.values[i]));
  return m;
}

double moment(const GridDensity& f, int k) {
  GridDensity g = f;
  for (std::size_t i = 0; i < g.size(); ++i) g.values[i] *= std::pow(g.x(i), k);
  return g.integral();
}

GridDensity gaussian(double mean, double sd, double half_width, double h) {
  return normalized(sample_on_grid(half_width, h, [&](double x) {
    return std::exp(-0.5 * (x - mean) * (x - mean) / (sd * sd));
  }));
}

}  // namespace

TEST_SUITE("heatflow") {
  TEST_CASE("grid construction") {
    CHECK_THROWS_AS(sample_on_grid(1.0, 0.3, [](double) { return 1.0; }), InputError);
    CHECK_THROWS_AS(sample_on_grid(0.0, 0.1, [](double) { return 1.0; }), InputError);
    CHECK_THROWS_AS(sample_on_grid(1.0, -0.1, [](double) { return 1.0; }), InputError);
    const GridDensity g = sample_on_grid(1.0, 0.25, [](double x) { return x; });
    CHECK(g.size() == 9);
    CHECK(g.x(0) == -1.0);
    CHECK(g.x(8) == 1.0);
    CHECK(stationary_density().integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(shifted_gaussian().integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sine_perturbed_gaussian().integral() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(moment(shifted_gaussian(0.2), 1) == doctest::Approx(0.2).epsilon(1e-10));
  }

  TEST_CASE("generator annihilates the stationary density") {
    const GridDensity lf = ou_generator_apply(stationary_density());
    CHECK(max_abs(lf) <= 1e-3);
    CHECK_FALSE(lf.has(kCoarseGrid));
  }

  TEST_CASE("generator against a symbolic derivative") {
    // f = e^{-x^2/2}: L f = (1 - x^2) f / 2
    const GridDensity f = sample_on_grid(8.0, 1.0 / 128.0, [](double x) { return std::exp(-0.5 * x * x); });
    const GridDensity expect =
        sample_on_grid(8.0, 1.0 / 128.0, [](double x) { return 0.5 * (1.0 - x * x) * std::exp(-0.5 * x * x); });
    CHECK(max_diff(ou_generator_apply(f), expect) <= 1e-4);
  }

  TEST_CASE("generator is linear") {
    const GridDensity a = shifted_gaussian(0.3);
    const GridDensity b = sine_perturbed_gaussian(0.4);
    GridDensity sum = a;
    for (std::size_t i = 0; i < sum.size(); ++i) sum.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
    const GridDensity la = ou_generator_apply(a);
    const GridDensity lb = ou_generator_apply(b);
    const GridDensity ls = ou_generator_apply(sum);
    for (std::size_t i = 0; i < ls.size(); ++i) {
      CHECK(ls.values[i] == doctest::Approx(2.0 * la.values[i] - 0.5 * lb.values[i]).epsilon(1e-10).scale(1.0));
    }
  }

  TEST_CASE("reverse approximations") {
    const GridDensity f = shifted_gaussian(0.2);
    CHECK(max_diff(reverse_approx_Tn(f, 0.1, 1), f) == 0.0);
    CHECK(max_diff(reverse_approx_Tn(f, 0.0, 3), f) == 0.0);
    GridDensity t2 = ou_generator_apply(f);
    for (std::size_t i = 0; i < t2.size(); ++i) t2.values[i] = f.values[i] - 0.1 * t2.values[i];
    CHECK(max_diff(reverse_approx_Tn(f, 0.1, 2), t2) <= 1e-15);
    // T_3 = f - t L f + t^2/2 L^2 f
    const GridDensity l1 = ou_generator_apply(f);
    const GridDensity l2 = ou_generator_apply(l1);
    GridDensity t3 = f;
    for (std::size_t i = 0; i < t3.size(); ++i) t3.values[i] += -0.1 * l1.values[i] + 0.005 * l2.values[i];
    CHECK(max_diff(reverse_approx_Tn(f, 0.1, 3), t3) <= 1e-12);
    CHECK_THROWS_AS(reverse_approx_Tn(f, 0.1, 0), InputError);
  }

  TEST_CASE("semigroup leaves the stationary density fixed") {
    const GridDensity f = stationary_density();
    for (double t : {0.01, 0.1, 1.0}) CHECK(max_diff(semigroup_apply(f, t), f) <= 1e-6);
  }

  TEST_CASE("semigroup moves moments like an OU process") {
    const double mean = 1.0, sd = 0.3;
    const GridDensity f = gaussian(mean, sd, 8.0, 1.0 / 128.0);
    for (double t : {0.05, 0.3, 1.0}) {
      const GridDensity g = semigroup_apply(f, t);
      const double m1 = moment(g, 1);
      const double var = moment(g, 2) - m1 * m1;
      CHECK(g.integral() == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(m1 == doctest::Approx(std::exp(-t) * mean).epsilon(1e-6));
      CHECK(var == doctest::Approx(std::exp(-2 * t) * sd * sd + 0.5 * (1 - std::exp(-2 * t))).epsilon(1e-5));
    }
  }

  TEST_CASE("semigroup composes") {
    const GridDensity f = sine_perturbed_gaussian(0.3);
    const GridDensity two = semigroup_apply(semigroup_apply(f, 0.1), 0.15);
    const GridDensity one = semigroup_apply(f, 0.25);
    CHECK(max_diff(two, one) <= 1e-6);
  }

  TEST_CASE("semigroup refuses to lose mass") {
    const GridDensity f = gaussian(1.9, 0.05, 2.0, 1.0 / 128.0);
    CHECK_THROWS_AS(semigroup_apply(f, 0.01), DomainError);
    CHECK_THROWS_AS(semigroup_apply(stationary_density(), -0.1), InputError);
  }

  TEST_CASE("chi-square divergence") {
    const GridDensity f = stationary_density();
    CHECK(chi2_divergence(f, f).value == 0.0);
    const double delta = 0.05;
    GridDensity g = f;
    for (double& v : g.values) v *= 1.0 + delta;
    // int e^{-2x^2} / sqrt(pi) dx = 1 / sqrt(2)
    const Chi2Result r = chi2_divergence(g, f);
    CHECK(r.value == doctest::Approx(delta * delta / (1.0 + delta) / std::sqrt(2.0)).epsilon(1e-9));
    CHECK_FALSE(r.negative_density);
    GridDensity neg = f;
    neg.values[neg.size() / 2] = -1.0;
    CHECK(chi2_divergence(neg, f).negative_density);
  }

  TEST_CASE("flags") {
    const GridDensity coarse = shifted_gaussian(0.2, 4.0, 0.125);
    CHECK(ou_generator_apply(coarse).has(kCoarseGrid));
    const GridDensity medium = shifted_gaussian(0.2, 4.0, 1.0 / 16.0);
    CHECK(reverse_approx_Tn(medium, 0.01, 2).has(kShortTime));
    CHECK_FALSE(reverse_approx_Tn(medium, 0.1, 2).has(kShortTime));
  }

  TEST_CASE("grid refinement converges at second order") {
    auto chi2_at = [](double h) {
      const GridDensity f = shifted_gaussian(0.2, 8.0, h);
      return chi2_divergence(semigroup_apply(reverse_approx_Tn(f, 0.1, 2), 0.1), f).value;
    };
    const double c1 = chi2_at(1.0 / 32.0);
    const double c2 = chi2_at(1.0 / 64.0);
    const double c3 = chi2_at(1.0 / 128.0);
    const double ratio = (c1 - c2) / (c2 - c3);
    CHECK(ratio == doctest::Approx(4.0).epsilon(0.25));
    CHECK(std::abs(c2 - c3) / c3 < 0.01);
  }

  TEST_CASE("log-log slope fit") {
    const std::vector<double> x{0.2, 0.1, 0.05};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 2.5));
    CHECK(fit_loglog_slope(x, y) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), InputError);
  }

  TEST_CASE("chi-square scales like t^{2n}") {
    const std::vector<double> times{0.2, 0.1, 0.05};
    const ScalingResult r1 = run_scaling_experiment(shifted_gaussian(), times, {1, 2}, 1);
    const ScalingResult r2 = run_scaling_experiment(shifted_gaussian(), times, {1, 2}, 2);
    REQUIRE(r1.points.size() == 6);
    CHECK(r1.points[0].n == 1);
    CHECK(r1.points[0].t == 0.2);
    CHECK(r1.points[3].n == 2);
    CHECK(r1.slopes.at(1) > 1.7);
    CHECK(r1.slopes.at(2) > 3.7);
    for (std::size_t i = 0; i < 6; ++i) CHECK(r1.points[i].chi2 == r2.points[i].chi2);
  }
}

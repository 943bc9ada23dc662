#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "wnh/error.hpp"
#include "wnh/linalg.hpp"

using namespace wnh;
using testing::max_abs_diff;
using testing::random_dense;
using testing::random_hermitian;

namespace {

// Characteristic polynomial coefficients by Faddeev-LeVerrier:
// det(zI - M) = sum_k c[k] z^k, c[n] = 1.
std::vector<Complex> char_poly(const DenseMatrix& m) {
  const Index n = m.rows();
  std::vector<Complex> c(static_cast<std::size_t>(n + 1));
  c[static_cast<std::size_t>(n)] = 1.0;
  DenseMatrix mk = DenseMatrix::Zero(n, n);
  const DenseMatrix id = DenseMatrix::Identity(n, n);
  for (Index k = 1; k <= n; ++k) {
    mk = m * mk + c[static_cast<std::size_t>(n - k + 1)] * id;
    c[static_cast<std::size_t>(n - k)] = -(m * mk).trace() / static_cast<double>(k);
  }
  return c;
}

// Durand-Kerner simultaneous root iteration for a monic polynomial.
std::vector<Complex> poly_roots(const std::vector<Complex>& c) {
  const std::size_t n = c.size() - 1;
  const auto p = [&](Complex z) {
    Complex v = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) v = v * z + c[k];
    return v;
  };
  std::vector<Complex> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = std::pow(Complex(0.4, 0.9), static_cast<double>(i)) * 2.0;
  for (int it = 0; it < 2000; ++it) {
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      Complex denom = 1.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) denom *= r[i] - r[j];
      }
      const Complex step = p(r[i]) / denom;
      r[i] -= step;
      change = std::max(change, std::abs(step));
    }
    if (change < 1e-15) break;
  }
  return r;
}

}  // namespace

TEST_SUITE("linalg") {
  TEST_CASE("hermitian matrix construction") {
    DenseMatrix m(2, 2);
    m << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
    CHECK_NOTHROW(HermitianMatrix{m});
    m(0, 1) = Complex(0.0, 1.0 + 1e-15);
    CHECK_THROWS_AS(HermitianMatrix{m}, InputError);
    const HermitianMatrix s = HermitianMatrix::symmetrized(m);
    CHECK(s(0, 1) == std::conj(s(1, 0)));
    DenseMatrix bad = DenseMatrix::Identity(2, 2);
    bad(0, 0) = Complex(std::nan(""), 0.0);
    CHECK_THROWS_AS(ComplexMatrix{bad}, InputError);
    CHECK_THROWS_AS(ComplexMatrix{DenseMatrix(2, 3)}, InputError);
  }

  TEST_CASE("hermitian_eigen small cases") {
    const std::vector<double> d{3.0, 1.0, 2.0};
    const auto e = hermitian_eigen(HermitianMatrix::diagonal(d));
    CHECK(e.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});
    DenseMatrix x(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    const auto ex = hermitian_eigen(HermitianMatrix(x));
    CHECK(ex.eigenvalues[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(ex.eigenvalues[1] == doctest::Approx(1.0).epsilon(1e-14));
    const Spectrum s = ex.spectrum();
    CHECK(s.kind == SpectrumKind::HermitianReal);
    CHECK(s.values[0].imag() == 0.0);
  }

  TEST_CASE("hermitian_eigen reconstruction") {
    std::mt19937_64 rng(11);
    for (int n : {8, 64, 400}) {
      const HermitianMatrix h = random_hermitian(n, rng);
      const auto e = hermitian_eigen(h);
      Eigen::VectorXd lam = Eigen::Map<const Eigen::VectorXd>(e.eigenvalues.data(), n);
      const DenseMatrix rec = e.vectors * lam.asDiagonal() * e.vectors.adjoint();
      CHECK(ComplexMatrix(rec - h.dense()).dense().norm() <= 1e-10 * n * operator_norm(h));
      CHECK(std::is_sorted(e.eigenvalues.begin(), e.eigenvalues.end()));
      CHECK((e.vectors.adjoint() * e.vectors - DenseMatrix::Identity(n, n)).norm() <= 1e-10 * n);
    }
  }

  TEST_CASE("eigenvalues invariant under unitary conjugation") {
    std::mt19937_64 rng(12);
    const HermitianMatrix h = random_hermitian(10, rng);
    const Eigen::HouseholderQR<DenseMatrix> qr(random_dense(10, rng));
    const DenseMatrix q = qr.householderQ();
    const auto a = hermitian_eigen(h).eigenvalues;
    const auto b = hermitian_eigen(HermitianMatrix::symmetrized(q * h.dense() * q.adjoint())).eigenvalues;
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-9);
  }

  TEST_CASE("general_eigen small cases") {
    DenseMatrix nil(2, 2);
    nil << 0.0, 1.0, 0.0, 0.0;
    const Spectrum s0 = general_eigen(ComplexMatrix(nil));
    CHECK(std::abs(s0.values[0]) <= 1e-12);
    CHECK(std::abs(s0.values[1]) <= 1e-12);
    DenseMatrix rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    const Spectrum s1 = general_eigen(ComplexMatrix(rot));
    // Real parts tie up to rounding, so either order is canonical.
    const double lo = std::min(s1.values[0].imag(), s1.values[1].imag());
    const double hi = std::max(s1.values[0].imag(), s1.values[1].imag());
    CHECK(std::abs(lo + 1.0) <= 1e-14);
    CHECK(std::abs(hi - 1.0) <= 1e-14);
    CHECK(std::abs(s1.values[0].real()) <= 1e-14);
    CHECK(s1.kind == SpectrumKind::GeneralComplex);
  }

  TEST_CASE("general_eigen matches characteristic polynomial roots") {
    std::mt19937_64 rng(13);
    for (int rep = 0; rep < 5; ++rep) {
      const DenseMatrix m = random_dense(5, rng);
      const Spectrum s = general_eigen(ComplexMatrix(m));
      std::vector<Complex> roots = poly_roots(char_poly(m));
      sort_canonical(roots);
      for (std::size_t i = 0; i < roots.size(); ++i) CHECK(std::abs(roots[i] - s.values[i]) <= 1e-8);
      for (std::size_t i = 1; i < s.values.size(); ++i) {
        const Complex a = s.values[i - 1], b = s.values[i];
        CHECK((a.real() < b.real() || (a.real() == b.real() && a.imag() <= b.imag())));
      }
    }
  }

  TEST_CASE("general_eigen agrees with hermitian_eigen on Hermitian input") {
    std::mt19937_64 rng(14);
    const HermitianMatrix h = random_hermitian(12, rng);
    const auto a = hermitian_eigen(h).eigenvalues;
    const Spectrum b = general_eigen(h.as_complex());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(b.values[i] - a[i]) <= 1e-8);
  }

  TEST_CASE("resolvent") {
    const ComplexMatrix g0 = resolvent(HermitianMatrix::zero(2), Complex(0.0, 1.0));
    CHECK(max_abs_diff(g0.dense(), Complex(0.0, 1.0) * DenseMatrix::Identity(2, 2)) <= 1e-15);
    const std::vector<double> d{1.0, -1.0};
    const Complex z(1.0, 1.0);
    const ComplexMatrix gd = resolvent(HermitianMatrix::diagonal(d), z);
    CHECK(std::abs(gd(0, 0) - 1.0 / (1.0 - z)) <= 1e-15);
    CHECK(std::abs(gd(1, 1) - 1.0 / (-1.0 - z)) <= 1e-15);
    CHECK_THROWS_AS(resolvent(HermitianMatrix::diagonal(d), Complex(2.0, 0.0)), DomainError);

    std::mt19937_64 rng(15);
    const HermitianMatrix h = random_hermitian(6, rng);
    const Complex w(0.3, 0.2);
    const DenseMatrix direct = (h.dense() - w * DenseMatrix::Identity(6, 6)).partialPivLu().inverse();
    const ComplexMatrix g = resolvent(h, w);
    CHECK(max_abs_diff(g.dense(), direct) <= 1e-10);
    CHECK(((h.dense() - w * DenseMatrix::Identity(6, 6)) * g.dense() - DenseMatrix::Identity(6, 6)).norm() <= 1e-10);
  }

  TEST_CASE("resolvent identity and Herglotz property") {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(-2.0, 2.0), v(0.01, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
      const HermitianMatrix h = random_hermitian(8, rng);
      const Complex z(u(rng), v(rng)), w(u(rng), -v(rng));
      const DenseMatrix gz = resolvent(h, z).dense(), gw = resolvent(h, w).dense();
      CHECK(max_abs_diff(gz - gw, (z - w) * gz * gw) <= 1e-9);
      CHECK(normalized_trace(gz).imag() > 0.0);
    }
  }

  TEST_CASE("normalized_trace and traceless_part") {
    CHECK(normalized_trace(ComplexMatrix::identity(7)) == Complex(1.0, 0.0));
    const std::vector<double> d{1.0, 2.0, 3.0};
    CHECK(normalized_trace(HermitianMatrix::diagonal(d)) == Complex(2.0, 0.0));
    std::mt19937_64 rng(17);
    const DenseMatrix m = random_dense(10, rng);
    Complex sum = 0.0;
    for (int i = 0; i < 10; ++i) sum += m(i, i);
    CHECK(std::abs(normalized_trace(ComplexMatrix(m)) - sum / 10.0) <= 1e-15);

    CHECK(traceless_part(HermitianMatrix::identity(4)).dense().norm() == 0.0);
    const std::vector<double> d13{1.0, 3.0};
    const HermitianMatrix t = traceless_part(HermitianMatrix::diagonal(d13));
    CHECK(t(0, 0) == Complex(-1.0, 0.0));
    CHECK(t(1, 1) == Complex(1.0, 0.0));
    const HermitianMatrix w = random_hermitian(9, rng);
    const HermitianMatrix w0 = traceless_part(w);
    CHECK(std::abs(normalized_trace(w0)) <= 1e-14);
    CHECK(max_abs_diff(traceless_part(w0).dense(), w0.dense()) <= 1e-15);
    const DenseMatrix diff = w.dense() - w0.dense();
    CHECK(max_abs_diff(diff, diff(0, 0) * DenseMatrix::Identity(9, 9)) <= 1e-15);
  }

  TEST_CASE("operator_norm") {
    CHECK(operator_norm(ComplexMatrix::identity(5)) == doctest::Approx(1.0).epsilon(1e-12));
    const std::vector<double> d{-5.0, 2.0};
    CHECK(operator_norm(HermitianMatrix::diagonal(d)) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(operator_norm(HermitianMatrix::diagonal(d).as_complex()) == doctest::Approx(5.0).epsilon(1e-12));
    std::mt19937_64 rng(18);
    const DenseMatrix m = random_dense(6, rng);
    const auto e = hermitian_eigen(HermitianMatrix::symmetrized(m.adjoint() * m));
    CHECK(operator_norm(ComplexMatrix(m)) == doctest::Approx(std::sqrt(e.eigenvalues.back())).epsilon(1e-8));
  }
}

#include "wnh/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <lapacke.h>

#include "wnh/error.hpp"

extern "C" void openblas_set_num_threads(int);

namespace wnh {
namespace {

// Worker threads own the parallelism; BLAS must not add its own, otherwise
// results could depend on the thread count.
const bool kBlasSingleThreaded = [] {
  openblas_set_num_threads(1);
  return true;
}();

void require_square_finite(const DenseMatrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw InputError(os.str());
  }
  if (!m.allFinite()) throw InputError(std::string(what) + ": non-finite entry");
}

void require_off_axis(Complex z) {
  if (z.imag() == 0.0) {
    std::ostringstream os;
    os << "resolvent requested on the real axis at z = " << z.real();
    throw DomainError(os.str());
  }
}

}  // namespace

ComplexMatrix::ComplexMatrix(DenseMatrix entries) : entries_(std::move(entries)) {
  require_square_finite(entries_, "ComplexMatrix");
}

ComplexMatrix ComplexMatrix::identity(Index n) { return ComplexMatrix(DenseMatrix::Identity(n, n)); }

ComplexMatrix ComplexMatrix::zero(Index n) { return ComplexMatrix(DenseMatrix::Zero(n, n)); }

HermitianMatrix::HermitianMatrix(DenseMatrix entries) : entries_(std::move(entries)) {
  require_square_finite(entries_, "HermitianMatrix");
  const Index n = entries_.rows();
  for (Index j = 0; j < n; ++j) {
    if (entries_(j, j).imag() != 0.0) throw InputError("HermitianMatrix: diagonal entry is not real");
    for (Index i = j + 1; i < n; ++i) {
      if (entries_(i, j) != std::conj(entries_(j, i))) {
        std::ostringstream os;
        os << "HermitianMatrix: entries (" << i << "," << j << ") and (" << j << "," << i
           << ") are not conjugate";
        throw InputError(os.str());
      }
    }
  }
}

HermitianMatrix HermitianMatrix::symmetrized(const DenseMatrix& m) {
  require_square_finite(m, "HermitianMatrix::symmetrized");
  DenseMatrix h = (m + m.adjoint()) * 0.5;
  // Sums commute exactly, so h(i,j) == conj(h(j,i)) already; the diagonal
  // imaginary parts cancel to +-0, normalize the sign.
  for (Index i = 0; i < h.rows(); ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  return HermitianMatrix(std::move(h), Trusted{});
}

HermitianMatrix HermitianMatrix::diagonal(std::span<const double> d) {
  DenseMatrix h = DenseMatrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) h(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
  return HermitianMatrix(std::move(h));
}

HermitianMatrix HermitianMatrix::identity(Index n) {
  return HermitianMatrix(DenseMatrix::Identity(n, n), Trusted{});
}

HermitianMatrix HermitianMatrix::zero(Index n) {
  if (n <= 0) throw InputError("HermitianMatrix::zero: dimension must be positive");
  return HermitianMatrix(DenseMatrix::Zero(n, n), Trusted{});
}

HermitianMatrix HermitianMatrix::scaled(double s) const {
  if (!std::isfinite(s)) throw InputError("HermitianMatrix::scaled: non-finite factor");
  return HermitianMatrix(entries_ * s, Trusted{});
}

Spectrum HermitianEigen::spectrum() const {
  Spectrum s;
  s.kind = SpectrumKind::HermitianReal;
  s.values.reserve(eigenvalues.size());
  for (double v : eigenvalues) s.values.emplace_back(v, 0.0);
  return s;
}

HermitianEigen hermitian_eigen(const HermitianMatrix& h) {
  // zheevr (MRRR). The divide-and-conquer driver zheevd in the system
  // OpenBLAS returns wrong eigenvectors for n >= ~400.
  const Index n = h.size();
  DenseMatrix work = h.dense();
  HermitianEigen out;
  out.vectors.resize(n, n);
  out.eigenvalues.resize(static_cast<std::size_t>(n));
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(n));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'A', 'L', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(work.data()), static_cast<lapack_int>(n), 0.0, 0.0, 0, 0,
      0.0, &found, out.eigenvalues.data(), reinterpret_cast<lapack_complex_double*>(out.vectors.data()),
      static_cast<lapack_int>(n), support.data());
  if (info != 0 || found != static_cast<lapack_int>(n)) {
    std::ostringstream os;
    os << "zheevr failed (info=" << info << ", found " << found << " of " << n << " eigenvalues)";
    throw NumericalError(os.str());
  }
  return out;
}

void sort_canonical(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

Spectrum general_eigen(const ComplexMatrix& m) {
  const Index n = m.size();
  DenseMatrix work = m.dense();
  std::vector<Complex> w(static_cast<std::size_t>(n));
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', 'N', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(work.data()), static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
  if (info != 0) {
    std::ostringstream os;
    os << "zgeev failed (info=" << info << ") for n=" << n
       << "; Frobenius norm " << m.dense().norm() << ", max |entry| "
       << m.dense().cwiseAbs().maxCoeff();
    throw NumericalError(os.str());
  }
  sort_canonical(w);
  return Spectrum{std::move(w), SpectrumKind::GeneralComplex};
}

ComplexMatrix resolvent(const HermitianEigen& eig, Complex z) {
  require_off_axis(z);
  const Index n = static_cast<Index>(eig.eigenvalues.size());
  Eigen::VectorXcd d(n);
  for (Index i = 0; i < n; ++i) d(i) = 1.0 / (eig.eigenvalues[static_cast<std::size_t>(i)] - z);
  DenseMatrix g = eig.vectors * d.asDiagonal() * eig.vectors.adjoint();
  return ComplexMatrix(std::move(g));
}

ComplexMatrix resolvent(const HermitianMatrix& h, Complex z) {
  require_off_axis(z);
  return resolvent(hermitian_eigen(h), z);
}

Complex normalized_trace(const DenseMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) throw InputError("normalized_trace: expected square matrix");
  return m.trace() / static_cast<double>(m.rows());
}

Complex normalized_trace(const ComplexMatrix& m) { return normalized_trace(m.dense()); }

Complex normalized_trace(const HermitianMatrix& m) { return normalized_trace(m.dense()); }

HermitianMatrix traceless_part(const HermitianMatrix& w) {
  const double mean = normalized_trace(w).real();
  DenseMatrix out = w.dense();
  for (Index i = 0; i < out.rows(); ++i) out(i, i) -= mean;
  return HermitianMatrix(std::move(out));
}

double operator_norm(const ComplexMatrix& m) {
  Eigen::BDCSVD<DenseMatrix> svd(m.dense());
  return svd.singularValues()(0);
}

double operator_norm(const HermitianMatrix& h) {
  const auto eig = hermitian_eigen(h);
  return std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
}

}  // namespace wnh

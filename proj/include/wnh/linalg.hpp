#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace wnh {

using Complex = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

// Square complex matrix with finite entries.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(DenseMatrix entries);

  static ComplexMatrix identity(Index n);
  static ComplexMatrix zero(Index n);

  Index size() const { return entries_.rows(); }
  const DenseMatrix& dense() const { return entries_; }
  Complex operator()(Index i, Index j) const { return entries_(i, j); }

 private:
  DenseMatrix entries_;
};

// Complex matrix with entries(i, j) == conj(entries(j, i)) exactly and a real
// diagonal. Construction either verifies this bit-for-bit or symmetrizes.
class HermitianMatrix {
 public:
  // Throws InputError unless `entries` is exactly Hermitian.
  explicit HermitianMatrix(DenseMatrix entries);

  // (M + M*) / 2, which is exactly Hermitian in floating point.
  static HermitianMatrix symmetrized(const DenseMatrix& m);
  static HermitianMatrix diagonal(std::span<const double> d);
  static HermitianMatrix identity(Index n);
  static HermitianMatrix zero(Index n);

  Index size() const { return entries_.rows(); }
  const DenseMatrix& dense() const { return entries_; }
  Complex operator()(Index i, Index j) const { return entries_(i, j); }

  HermitianMatrix scaled(double s) const;
  ComplexMatrix as_complex() const { return ComplexMatrix(entries_); }

 private:
  struct Trusted {};
  HermitianMatrix(DenseMatrix entries, Trusted) : entries_(std::move(entries)) {}

  DenseMatrix entries_;
};

enum class SpectrumKind { HermitianReal, GeneralComplex };

// Eigenvalues in canonical order: ascending for Hermitian spectra,
// lexicographic in (Re, Im) for general ones.
struct Spectrum {
  std::vector<Complex> values;
  SpectrumKind kind = SpectrumKind::GeneralComplex;

  std::size_t size() const { return values.size(); }
};

struct HermitianEigen {
  std::vector<double> eigenvalues;  // ascending
  DenseMatrix vectors;              // columns are orthonormal eigenvectors

  Spectrum spectrum() const;
};

HermitianEigen hermitian_eigen(const HermitianMatrix& h);

// Throws NumericalError if the QR iteration does not converge.
Spectrum general_eigen(const ComplexMatrix& m);

// (H - z)^{-1} assembled from the eigendecomposition. Im z == 0 is a DomainError.
ComplexMatrix resolvent(const HermitianMatrix& h, Complex z);
ComplexMatrix resolvent(const HermitianEigen& eig, Complex z);

// (1/n) tr M
Complex normalized_trace(const DenseMatrix& m);
Complex normalized_trace(const ComplexMatrix& m);
Complex normalized_trace(const HermitianMatrix& m);

// W - <W>, normalized trace zero.
HermitianMatrix traceless_part(const HermitianMatrix& w);

// Largest singular value.
double operator_norm(const ComplexMatrix& m);
double operator_norm(const HermitianMatrix& h);

void sort_canonical(std::vector<Complex>& values);

}  // namespace wnh

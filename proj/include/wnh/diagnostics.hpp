#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wnh/linalg.hpp"

namespace wnh {

double semicircle_density(double energy);

// Root of m^2 + z m + 1 = 0 with Im m * Im z > 0.
Complex semicircle_m(Complex z);
// d/dz of semicircle_m.
Complex semicircle_m_prime(Complex z);

// Spectral data of a pair (W1, W2) shared by every resolvent functional: the
// eigendecomposition of W1 and the traceless part of W2 written in the
// eigenbasis of W1. In that basis G_z is diagonal, so single-resolvent
// quantities cost O(N) and alpha/beta cost O(N^2).
class ResolventPair {
 public:
  explicit ResolventPair(const HermitianMatrix& w1);
  ResolventPair(const HermitianMatrix& w1, const HermitianMatrix& w2);

  Index size() const { return static_cast<Index>(eig_.eigenvalues.size()); }
  const HermitianEigen& eigen() const { return eig_; }
  bool has_w2() const { return w2_rotated_.size() > 0; }
  // U* (W2 - <W2>) U
  const DenseMatrix& w2_traceless_rotated() const { return w2_rotated_; }
  double w2_trace() const { return w2_trace_; }
  bool w2_traceless_is_zero() const { return w2_zero_; }

  // 1/(lambda_i - z), Im z != 0.
  Eigen::VectorXcd resolvent_diagonal(Complex z) const;

 private:
  HermitianEigen eig_;
  DenseMatrix w2_rotated_;
  double w2_trace_ = 0.0;
  bool w2_zero_ = true;
};

// m_N(z) = <G_z>
Complex stieltjes_m(const ResolventPair& pair, Complex z);
Complex stieltjes_m(const HermitianMatrix& w1, Complex z);
// m_N'(z) = <G_z^2>
Complex m_prime(const ResolventPair& pair, Complex z);
Complex m_prime(const HermitianMatrix& w1, Complex z);

struct AlphaBeta {
  double alpha = 0.0;
  double beta = 0.0;
};

// alpha = N tau <(Re(G) W2o)^2>, beta = N tau <(Im(G) W2o)^2>, W2o traceless part.
AlphaBeta alpha_beta(const ResolventPair& pair, Complex z, double tau_n);
AlphaBeta alpha_beta(const HermitianMatrix& w1, const HermitianMatrix& w2, Complex z, double tau_n);

// < prod_j G_{z_j} W2o >, exact dense evaluation.
Complex multi_resolvent_trace(const ResolventPair& pair, const std::vector<Complex>& z_list);
Complex multi_resolvent_trace(const HermitianMatrix& w1, const HermitianMatrix& w2_traceless,
                              const std::vector<Complex>& z_list);

// Evaluation grid for the spectral domain
//   S_eps = { |Re z| <= 10, N^{-1+eps} <= |Im z| <= 10 }.
// Re values: `re_points` uniform on [-re_max, re_max] plus `extra_re`;
// Im values: `eta_levels` log-spaced on [N^{-1+eps}, eta_max].
struct SpectralGridSpec {
  int re_points = 10;
  double re_max = 1.5;
  std::vector<double> extra_re;
  int eta_levels = 5;
  double eta_max = 1.0;
};

struct SpectralDomainSpec {
  double epsilon = 0.5;
  Index n = 2;
  int n_epsilon = 96;  // ceil(48 / eps)
  double eta_min = 0.0;

  // Throws InputError unless eps in (0, 1/2] and N >= 2.
  static SpectralDomainSpec make(double epsilon, Index n);
  bool contains(Complex z) const;
  std::vector<Complex> grid(const SpectralGridSpec& spec) const;
};

struct ClassConstants {
  double c0 = 4.0;
  double c_m = 10.0;
  double c_m_prime = 0.05;
  double c_beta = 20.0;
  double c3 = 10.0;
};

struct ConditionRecord {
  std::string name;
  bool pass = true;
  // Worst relative slack over the grid; negative iff the condition fails.
  double margin = 0.0;
  std::vector<Complex> witnesses;  // grid points attaining the worst margin
  double measured = 0.0;           // smallest constant that would make it pass
};

struct MultiTraceRecord {
  int m = 0;
  double measured_constant = 0.0;  // max over grid and configurations of |trace| * eta^{m/2-1}
  bool pass = true;
};

struct ClassReport {
  bool pass = false;
  std::vector<ConditionRecord> conditions;  // C0, C1.1, C1.2, C2, C3.1, C3.2
  std::vector<MultiTraceRecord> multi_trace;
  bool c3_growth = false;  // per-m constant grows by more than 2x over the tested m
  double epsilon = 0.0;
  int n_epsilon = 0;
  std::vector<Complex> grid;

  const ConditionRecord& condition(const std::string& name) const;
};

struct ClassCheckOptions {
  SpectralGridSpec grid;
  ClassConstants constants;
  int m_max = 8;  // C3.2 tested for m = 2..min(4 n_eps, m_max)
};

ClassReport check_class_membership(const HermitianMatrix& w1, const HermitianMatrix& w2,
                                   double epsilon, double tau_n,
                                   const ClassCheckOptions& options = {});

}  // namespace wnh

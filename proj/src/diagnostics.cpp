#include "wnh/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wnh/error.hpp"

namespace wnh {

double semicircle_density(double energy) {
  if (std::abs(energy) >= 2.0) return 0.0;
  return std::sqrt(4.0 - energy * energy) / (2.0 * std::numbers::pi);
}

Complex semicircle_m(Complex z) {
  if (z.imag() == 0.0) throw DomainError("semicircle_m: z must be off the real axis");
  // sqrt(z-2) sqrt(z+2) ~ z at infinity; the roots multiply to 1.
  const Complex root = std::sqrt(z - 2.0) * std::sqrt(z + 2.0);
  Complex m = 0.5 * (-z + root);
  if (m.imag() * z.imag() <= 0.0) m = 1.0 / m;
  return m;
}

Complex semicircle_m_prime(Complex z) {
  const Complex m = semicircle_m(z);
  return -m / (2.0 * m + z);
}

ResolventPair::ResolventPair(const HermitianMatrix& w1) : eig_(hermitian_eigen(w1)) {}

ResolventPair::ResolventPair(const HermitianMatrix& w1, const HermitianMatrix& w2)
    : eig_(hermitian_eigen(w1)) {
  if (w2.size() != w1.size()) throw InputError("ResolventPair: W1 and W2 dimensions differ");
  w2_trace_ = normalized_trace(w2).real();
  const HermitianMatrix traceless = traceless_part(w2);
  w2_zero_ = (traceless.dense().array() == Complex(0.0, 0.0)).all();
  w2_rotated_ = eig_.vectors.adjoint() * traceless.dense() * eig_.vectors;
}

Eigen::VectorXcd ResolventPair::resolvent_diagonal(Complex z) const {
  if (z.imag() == 0.0) throw DomainError("resolvent evaluated on the real axis");
  const Index n = size();
  Eigen::VectorXcd d(n);
  for (Index i = 0; i < n; ++i) d(i) = 1.0 / (eig_.eigenvalues[static_cast<std::size_t>(i)] - z);
  return d;
}

Complex stieltjes_m(const ResolventPair& pair, Complex z) {
  return pair.resolvent_diagonal(z).mean();
}

Complex stieltjes_m(const HermitianMatrix& w1, Complex z) { return stieltjes_m(ResolventPair(w1), z); }

Complex m_prime(const ResolventPair& pair, Complex z) {
  return pair.resolvent_diagonal(z).array().square().mean();
}

Complex m_prime(const HermitianMatrix& w1, Complex z) { return m_prime(ResolventPair(w1), z); }

namespace {

void require_w2(const ResolventPair& pair) {
  if (!pair.has_w2()) throw InputError("resolvent pair was built without W2");
}

// tr((diag(a) X)^2) for real a and Hermitian X is sum_ij a_i a_j |X_ij|^2.
double weighted_square_trace(const Eigen::VectorXd& a, const DenseMatrix& x) {
  const Eigen::MatrixXd abs2 = x.cwiseAbs2();
  return a.dot(abs2 * a);
}

}  // namespace

AlphaBeta alpha_beta(const ResolventPair& pair, Complex z, double tau_n) {
  require_w2(pair);
  const Eigen::VectorXcd d = pair.resolvent_diagonal(z);
  const Eigen::VectorXd re = d.real();
  const Eigen::VectorXd im = d.imag();
  // N tau <X> = tau tr X
  return AlphaBeta{tau_n * weighted_square_trace(re, pair.w2_traceless_rotated()),
                   tau_n * weighted_square_trace(im, pair.w2_traceless_rotated())};
}

AlphaBeta alpha_beta(const HermitianMatrix& w1, const HermitianMatrix& w2, Complex z,
                     double tau_n) {
  return alpha_beta(ResolventPair(w1, w2), z, tau_n);
}

namespace {

// Row scaling diag(d) * X.
DenseMatrix scale_rows(const Eigen::VectorXcd& d, const DenseMatrix& x) { return d.asDiagonal() * x; }

// tr(X Y) in O(N^2).
Complex trace_of_product(const DenseMatrix& x, const DenseMatrix& y) {
  return (x.array() * y.transpose().array()).sum();
}

}  // namespace

Complex multi_resolvent_trace(const ResolventPair& pair, const std::vector<Complex>& z_list) {
  require_w2(pair);
  if (z_list.empty()) throw InputError("multi_resolvent_trace: empty list of spectral arguments");
  const DenseMatrix& w = pair.w2_traceless_rotated();
  const double n = static_cast<double>(pair.size());
  if (z_list.size() == 1) {
    return (pair.resolvent_diagonal(z_list[0]).array() * w.diagonal().array()).sum() / n;
  }
  DenseMatrix acc = scale_rows(pair.resolvent_diagonal(z_list[0]), w);
  for (std::size_t j = 1; j + 1 < z_list.size(); ++j) {
    acc = acc * scale_rows(pair.resolvent_diagonal(z_list[j]), w);
  }
  return trace_of_product(acc, scale_rows(pair.resolvent_diagonal(z_list.back()), w)) / n;
}

Complex multi_resolvent_trace(const HermitianMatrix& w1, const HermitianMatrix& w2_traceless,
                              const std::vector<Complex>& z_list) {
  return multi_resolvent_trace(ResolventPair(w1, w2_traceless), z_list);
}

SpectralDomainSpec SpectralDomainSpec::make(double epsilon, Index n) {
  if (!(epsilon > 0.0 && epsilon <= 0.5)) {
    std::ostringstream os;
    os << "epsilon must lie in (0, 1/2], got " << epsilon;
    throw InputError(os.str());
  }
  if (n < 2) throw InputError("spectral domain: N must be at least 2");
  SpectralDomainSpec s;
  s.epsilon = epsilon;
  s.n = n;
  s.n_epsilon = static_cast<int>(std::ceil(48.0 / epsilon));
  s.eta_min = std::pow(static_cast<double>(n), -1.0 + epsilon);
  return s;
}

bool SpectralDomainSpec::contains(Complex z) const {
  const double eta = std::abs(z.imag());
  // Relative slack absorbs the rounding of pow/exp in grid generation.
  return std::abs(z.real()) <= 10.0 && eta >= eta_min * (1.0 - 1e-12) && eta <= 10.0 * (1.0 + 1e-12);
}

std::vector<Complex> SpectralDomainSpec::grid(const SpectralGridSpec& spec) const {
  if (spec.re_points < 1 || spec.eta_levels < 1) throw InputError("grid: need at least one point per axis");
  if (!(spec.re_max >= 0.0 && spec.re_max <= 10.0)) throw InputError("grid: re_max must lie in [0, 10]");
  if (!(spec.eta_max >= eta_min && spec.eta_max <= 10.0)) {
    throw InputError("grid: eta_max must lie in [N^{-1+eps}, 10]");
  }
  std::vector<double> re;
  for (int i = 0; i < spec.re_points; ++i) {
    re.push_back(spec.re_points == 1 ? 0.0
                                     : -spec.re_max + 2.0 * spec.re_max * i / (spec.re_points - 1));
  }
  for (double x : spec.extra_re) {
    if (std::abs(x) > 10.0) throw InputError("grid: extra Re point outside S_eps");
    re.push_back(x);
  }
  std::vector<double> eta;
  for (int k = 0; k < spec.eta_levels; ++k) {
    eta.push_back(spec.eta_levels == 1
                      ? eta_min
                      : eta_min * std::pow(spec.eta_max / eta_min, static_cast<double>(k) / (spec.eta_levels - 1)));
  }
  std::vector<Complex> points;
  for (double y : eta) {
    for (double x : re) points.emplace_back(x, y);
  }
  return points;
}

const ConditionRecord& ClassReport::condition(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return c;
  }
  throw InputError("ClassReport: unknown condition " + name);
}

namespace {

// Tracks the worst margin of one condition over the grid.
struct Tracker {
  ConditionRecord rec;
  bool strict = false;

  explicit Tracker(std::string name, bool strict_inequality = false) : strict(strict_inequality) {
    rec.name = std::move(name);
    rec.margin = std::numeric_limits<double>::infinity();
  }

  void observe(double margin, Complex z) {
    if (margin < rec.margin) {
      rec.margin = margin;
      rec.witnesses = {z};
    }
  }

  ConditionRecord finish() {
    rec.pass = strict ? rec.margin > 0.0 : rec.margin >= 0.0;
    return rec;
  }
};

// R_j = F_1 F_2 F_1 ... (j factors) for j = 1..count, where the factors
// alternate between f_odd and f_even.
std::vector<DenseMatrix> alternating_products(const DenseMatrix& f_odd, const DenseMatrix& f_even,
                                              int count) {
  std::vector<DenseMatrix> r;
  r.reserve(static_cast<std::size_t>(count));
  r.push_back(f_odd);
  for (int j = 2; j <= count; ++j) {
    const DenseMatrix& next = (j % 2 == 1) ? f_odd : f_even;
    r.push_back(r.back() * next);
  }
  return r;
}

// tr of the length-m alternating product, split as R_a R_b with a even so
// that R_b again starts with the odd factor.
Complex alternating_trace(const std::vector<DenseMatrix>& r, int m) {
  const int count = static_cast<int>(r.size());
  for (int a = std::min(count, m) / 2 * 2; a >= 0; a -= 2) {
    const int b = m - a;
    if (b > count) break;
    if (a == 0) return r[static_cast<std::size_t>(b - 1)].trace();
    if (b == 0) return r[static_cast<std::size_t>(a - 1)].trace();
    return trace_of_product(r[static_cast<std::size_t>(a - 1)], r[static_cast<std::size_t>(b - 1)]);
  }
  throw InputError("alternating_trace: not enough precomputed products");
}

}  // namespace

ClassReport check_class_membership(const HermitianMatrix& w1, const HermitianMatrix& w2,
                                   double epsilon, double tau_n, const ClassCheckOptions& options) {
  const SpectralDomainSpec domain = SpectralDomainSpec::make(epsilon, w1.size());
  const ResolventPair pair(w1, w2);
  const ClassConstants& c = options.constants;
  const double n = static_cast<double>(w1.size());

  ClassReport report;
  report.epsilon = epsilon;
  report.n_epsilon = domain.n_epsilon;
  report.grid = domain.grid(options.grid);

  // C0
  {
    const auto& ev = pair.eigen().eigenvalues;
    const double norm1 = std::max(std::abs(ev.front()), std::abs(ev.back()));
    const double norm = std::max(norm1, operator_norm(w2));
    ConditionRecord rec;
    rec.name = "C0";
    rec.measured = norm;
    rec.margin = 1.0 - norm / c.c0;
    rec.pass = rec.margin >= 0.0;
    report.conditions.push_back(rec);
  }

  const int m_top = std::min(4 * domain.n_epsilon, options.m_max);
  std::vector<int> m_values;
  for (int m = 2; m <= m_top; ++m) m_values.push_back(m);
  // Smallest count c of precomputed products with (largest even <= c) + c >= m_top.
  int products = 1;
  while (products - products % 2 + products < m_top) ++products;
  std::vector<double> c3_measured(m_values.size(), 0.0);

  Tracker c11("C1.1"), c12("C1.2", true), c2("C2"), c31("C3.1"), c32("C3.2");
  double m_abs_max = 0.0, m_abs_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0, beta_max = 0.0, beta_min = std::numeric_limits<double>::infinity();
  double c31_ratio_max = 0.0;
  const DenseMatrix& wt = pair.w2_traceless_rotated();

  for (const Complex z : report.grid) {
    const double eta = std::abs(z.imag());
    const Eigen::VectorXcd d = pair.resolvent_diagonal(z);
    const Complex m = d.mean();
    const Complex mp = d.array().square().mean();

    const double am = std::abs(m);
    m_abs_max = std::max(m_abs_max, am);
    m_abs_min = std::min(m_abs_min, am);
    c11.observe(std::min(c.c_m * am - 1.0, 1.0 - am / c.c_m), z);

    const double ratio = eta * std::abs(mp) / std::abs(m.imag());
    ratio_max = std::max(ratio_max, ratio);
    c12.observe(1.0 - ratio / (1.0 - c.c_m_prime), z);

    const double beta = alpha_beta(pair, z, tau_n).beta;
    beta_max = std::max(beta_max, beta);
    beta_min = std::min(beta_min, beta);
    c2.observe(std::min(c.c_beta * beta - 1.0, 1.0 - beta / c.c_beta), z);

    const double single = std::abs((d.array() * wt.diagonal().array()).sum()) / n;
    const double bound31 = std::pow(n, epsilon / 2.0) / (n * std::sqrt(eta));
    c31_ratio_max = std::max(c31_ratio_max, single / bound31);
    c31.observe(1.0 - single / bound31, z);

    if (m_values.empty()) continue;
    double worst = 0.0;
    if (!pair.w2_traceless_is_zero()) {
      const DenseMatrix f = scale_rows(d, wt);
      const DenseMatrix f_bar = scale_rows(d.conjugate(), wt);
      const auto equal = alternating_products(f, f, products);
      const auto mixed = alternating_products(f, f_bar, products);
      for (std::size_t k = 0; k < m_values.size(); ++k) {
        const int mm = m_values[k];
        const double scale = std::pow(eta, mm / 2.0 - 1.0) / n;
        const double value = std::max(std::abs(alternating_trace(equal, mm)),
                                      std::abs(alternating_trace(mixed, mm))) * scale;
        c3_measured[k] = std::max(c3_measured[k], value);
        worst = std::max(worst, value);
      }
    }
    c32.observe(1.0 - worst / c.c3, z);
  }

  auto r11 = c11.finish();
  r11.measured = std::max(m_abs_max, 1.0 / m_abs_min);
  auto r12 = c12.finish();
  r12.measured = 1.0 - ratio_max;
  auto r2 = c2.finish();
  r2.measured = beta_min > 0.0 ? std::max(beta_max, 1.0 / beta_min) : std::numeric_limits<double>::infinity();
  auto r31 = c31.finish();
  r31.measured = c31_ratio_max;
  report.conditions.push_back(r11);
  report.conditions.push_back(r12);
  report.conditions.push_back(r2);
  report.conditions.push_back(r31);

  if (!m_values.empty()) {
    auto r32 = c32.finish();
    r32.measured = *std::max_element(c3_measured.begin(), c3_measured.end());
    report.conditions.push_back(r32);
    for (std::size_t k = 0; k < m_values.size(); ++k) {
      report.multi_trace.push_back({m_values[k], c3_measured[k], c3_measured[k] <= c.c3});
    }
    report.c3_growth = c3_measured.size() > 1 && c3_measured.back() > 2.0 * c3_measured.front();
  }

  report.pass = std::all_of(report.conditions.begin(), report.conditions.end(),
                            [](const ConditionRecord& r) { return r.pass; });
  return report;
}

}  // namespace wnh

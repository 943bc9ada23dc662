#include "wnh/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wnh/error.hpp"

namespace wnh {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string matrix_csv(const DenseMatrix& m) {
  std::string s = "i,j,re,im\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      s += std::to_string(i) + ',' + std::to_string(j) + ',' + format_double(m(i, j).real()) + ',' +
           format_double(m(i, j).imag()) + '\n';
    }
  }
  return s;
}

DenseMatrix parse_matrix_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("i,j,re,im", 0) != 0) {
    throw IoError("matrix CSV: missing 'i,j,re,im' header");
  }
  struct Entry {
    long long i, j;
    double re, im;
  };
  std::vector<Entry> entries;
  long long max_index = -1;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    Entry e{};
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream ls(line);
    if (!(ls >> e.i >> c1 >> e.j >> c2 >> e.re >> c3 >> e.im) || c1 != ',' || c2 != ',' || c3 != ',' ||
        e.i < 0 || e.j < 0) {
      throw IoError("matrix CSV: malformed line " + std::to_string(line_no));
    }
    max_index = std::max({max_index, e.i, e.j});
    entries.push_back(e);
  }
  const long long n = max_index + 1;
  if (n <= 0 || static_cast<long long>(entries.size()) != n * n) {
    throw IoError("matrix CSV: expected a complete square matrix");
  }
  DenseMatrix m = DenseMatrix::Constant(n, n, Complex(std::nan(""), 0.0));
  for (const auto& e : entries) m(e.i, e.j) = Complex(e.re, e.im);
  if (!m.allFinite()) throw IoError("matrix CSV: duplicate or missing entries");
  return m;
}

std::string eigenvalue_csv(const std::vector<TrialSpectrum>& spectra) {
  std::string s = "trial,index,re,im\n";
  for (const auto& ts : spectra) {
    for (std::size_t k = 0; k < ts.spectrum.values.size(); ++k) {
      const Complex z = ts.spectrum.values[k];
      s += std::to_string(ts.trial) + ',' + std::to_string(k) + ',' + format_double(z.real()) + ',' +
           format_double(z.imag()) + '\n';
    }
  }
  return s;
}

Json to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json to_json(const AtomDistribution& atom) {
  if (atom.kind() == AtomDistribution::Kind::Gaussian) return Json{{"kind", "gaussian"}};
  const auto& c = atom.coeffs();
  return Json{{"kind", "smoothed"}, {"coeffs", {c[0], c[1], c[2], c[3]}}, {"delta", atom.delta()}};
}

Json to_json(const EnsembleSpec& spec) {
  return Json{{"n", spec.n},
              {"tau_n", spec.tau_n},
              {"t", spec.t},
              {"atom", to_json(spec.atom)},
              {"seed", spec.seed}};
}

Json to_json(const ClassReport& report) {
  Json conditions = Json::object();
  for (const auto& c : report.conditions) {
    Json w = Json::array();
    for (const Complex z : c.witnesses) w.push_back(to_json(z));
    conditions[c.name] = Json{{"pass", c.pass}, {"margin", c.margin}, {"measured", c.measured}, {"witnesses", w}};
  }
  Json multi = Json::array();
  for (const auto& r : report.multi_trace) {
    multi.push_back(Json{{"m", r.m}, {"measured_constant", r.measured_constant}, {"pass", r.pass}});
  }
  return Json{{"pass", report.pass},
              {"conditions", conditions},
              {"multi_trace", multi},
              {"c3_growth", report.c3_growth},
              {"grid", {{"epsilon", report.epsilon}, {"n_epsilon", report.n_epsilon}, {"n_points", report.grid.size()}}}};
}

Json to_json(const SaddleResult& r) {
  Json j{{"energy", r.energy},
         {"t", r.t},
         {"lambda", to_json(r.lambda)},
         {"u", r.u},
         {"eta", r.eta},
         {"eta_over_t", r.eta / r.t},
         {"residual", r.residual},
         {"iterations", r.iterations},
         {"used_fallback", r.used_fallback},
         {"energy_outside_bulk", r.energy_outside_bulk}};
  j["tau_et"] = r.tau_et ? Json(*r.tau_et) : Json(nullptr);
  return j;
}

Json to_json(const KernelGrid& grid) {
  Json points = Json::array();
  for (const Complex z : grid.points) points.push_back(to_json(z));
  Json values = Json::array();
  for (Index i = 0; i < grid.values.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < grid.values.cols(); ++j) row.push_back(to_json(grid.values(i, j)));
    values.push_back(std::move(row));
  }
  return Json{{"tau", grid.params.tau}, {"order", grid.params.order}, {"points", points}, {"values", values}};
}

Json to_json(const Window& w) { return Json{{"x0", w.x0}, {"x1", w.x1}, {"y0", w.y0}, {"y1", w.y1}}; }

Json to_json(const BinnedDensity& d) {
  return Json{{"window", to_json(d.window)},
              {"nx", d.nx},
              {"ny", d.ny},
              {"trials", d.trials},
              {"total_points", d.total_points},
              {"normalization_area", d.normalization_area},
              {"density", d.density}};
}

Json to_json(const ComparisonReport& r) {
  return Json{{"rel_l1", r.rel_l1},
              {"rel_l2", r.rel_l2},
              {"sup_err", r.sup_err},
              {"chi2_stat", r.chi2_stat},
              {"n_bins_used", r.n_bins_used}};
}

Json to_json(const ScalingResult& r) {
  Json slopes = Json::object();
  for (const auto& [n, s] : r.slopes) slopes[std::to_string(n)] = s;
  Json points = Json::array();
  for (const auto& p : r.points) {
    points.push_back(Json{{"t", p.t}, {"n", p.n}, {"chi2", p.chi2}, {"negative_density", p.negative_density}});
  }
  return Json{{"slopes", slopes}, {"points", points}};
}

std::string kernel_rho1_csv(const KernelParams& params, const std::vector<Complex>& points) {
  std::string s = "x,y,rho1\n";
  for (const Complex z : points) {
    s += format_double(z.real()) + ',' + format_double(z.imag()) + ',' + format_double(rho_1(params, z)) + '\n';
  }
  return s;
}

std::string binned_density_csv(const BinnedDensity& d) {
  std::string s = "x,y,density\n";
  for (int iy = 0; iy < d.ny; ++iy) {
    for (int ix = 0; ix < d.nx; ++ix) {
      const Complex c = d.center(ix, iy);
      s += format_double(c.real()) + ',' + format_double(c.imag()) + ',' + format_double(d.at(ix, iy)) + '\n';
    }
  }
  return s;
}

std::string scaling_csv(const ScalingResult& r) {
  std::string s = "t,n,chi2\n";
  for (const auto& p : r.points) {
    s += format_double(p.t) + ',' + std::to_string(p.n) + ',' + format_double(p.chi2) + '\n';
  }
  return s;
}

}  // namespace wnh

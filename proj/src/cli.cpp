#include "wnh/cli.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>

#include "wnh/correlation.hpp"
#include "wnh/diagnostics.hpp"
#include "wnh/ensembles.hpp"
#include "wnh/error.hpp"
#include "wnh/heatflow.hpp"
#include "wnh/io.hpp"
#include "wnh/parallel.hpp"
#include "wnh/kernel.hpp"
#include "wnh/saddle.hpp"

namespace wnh {

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string out = ".";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

double parse_number(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(what + ": '" + s + "' is not a number");
  }
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> v;
  for (const auto& p : split(s, ',')) v.push_back(parse_number(p, what));
  if (v.empty()) throw InputError(what + ": empty list");
  return v;
}

// "a:b:step" -> a, a + step, ..., b
std::vector<double> parse_range(const std::string& s, const std::string& what) {
  const auto p = split(s, ':');
  if (p.size() != 3) throw InputError(what + ": expected a:b:step");
  const double a = parse_number(p[0], what), b = parse_number(p[1], what), step = parse_number(p[2], what);
  if (!(step > 0.0) || !(b >= a)) throw InputError(what + ": need b >= a and step > 0");
  const auto count = static_cast<long long>(std::floor((b - a) / step + 1e-9)) + 1;
  if (count > 100000) throw InputError(what + ": too many points");
  std::vector<double> v;
  for (long long k = 0; k < count; ++k) v.push_back(a + static_cast<double>(k) * step);
  return v;
}

Window parse_window(const std::string& s) {
  const auto p = split(s, ':');
  if (p.size() != 4) throw InputError("--window: expected x0:x1:y0:y1");
  Window w{parse_number(p[0], "--window"), parse_number(p[1], "--window"), parse_number(p[2], "--window"),
           parse_number(p[3], "--window")};
  w.validate();
  return w;
}

std::vector<Complex> parse_points(const std::string& s) {
  std::vector<Complex> pts;
  for (const auto& item : split(s, ';')) {
    const auto p = split(item, ',');
    if (p.size() != 2) throw InputError("--points: expected 're,im;re,im;...'");
    pts.emplace_back(parse_number(p[0], "--points"), parse_number(p[1], "--points"));
  }
  return pts;
}

// "gaussian" or "smoothed:a1,a2,a3,a4"
AtomDistribution parse_atom(const std::string& s) {
  if (s == "gaussian") return AtomDistribution::gaussian();
  if (s.rfind("smoothed:", 0) == 0) {
    const auto c = parse_list(s.substr(9), "--atom");
    if (c.size() != 4) throw InputError("--atom: smoothed needs four coefficients");
    return AtomDistribution::smoothed({c[0], c[1], c[2], c[3]});
  }
  throw InputError("--atom: expected 'gaussian' or 'smoothed:a1,a2,a3,a4'");
}

fs::path prepare_out(const Globals& g) {
  const fs::path dir(g.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + g.out + "'");
  return dir;
}

// Every option value of `sub` (explicit or default) plus the seed. The worker
// count and output directory are left out: they never change results.
Json config_sidecar(const CLI::App& sub, const Globals& g) {
  Json opts = Json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name.empty()) continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      std::string joined;
      for (std::size_t i = 0; i < r.size(); ++i) joined += (i ? "," : "") + r[i];
      opts[name] = joined;
    } else {
      opts[name] = opt->get_default_str();
    }
  }
  return Json{{"command", sub.get_name()}, {"seed", g.seed}, {"options", opts}};
}

void write_sidecar(const fs::path& dir, const CLI::App& sub, const Globals& g) {
  write_json_file(dir / (sub.get_name() + ".config.json"), config_sidecar(sub, g));
}

HermitianMatrix load_hermitian(const std::string& path) {
  return HermitianMatrix(parse_matrix_csv(read_text_file(path)));
}

// ---- sample ----------------------------------------------------------------

struct SampleArgs {
  std::string ensemble = "gue";
  Index n = 64;
  double tau_n = 0.0;
  double t = 0.0;
  std::string atom = "gaussian";
  std::int64_t trials = 1;
  bool write_matrix = false;
};

int cmd_sample(const SampleArgs& a, const CLI::App& sub, const Globals& g, std::ostream& out) {
  const AtomDistribution atom = parse_atom(a.atom);
  EnsembleSpec spec{a.n, a.tau_n, a.t, atom, g.seed};
  spec.validate();
  if (a.trials < 1) throw InputError("--trials must be >= 1");
  const std::vector<std::string> kinds{"gue", "wigner", "elliptic", "weak-elliptic", "gauss-divisible"};
  if (std::find(kinds.begin(), kinds.end(), a.ensemble) == kinds.end()) {
    throw InputError("--ensemble: unknown ensemble '" + a.ensemble + "'");
  }
  const fs::path dir = prepare_out(g);

  std::vector<TrialSpectrum> spectra(static_cast<std::size_t>(a.trials));
  std::optional<DenseMatrix> first;
  std::mutex first_mutex;
  run_trials<int>(a.trials, g.workers, [] { return 0; }, [&](int&, std::int64_t trial) {
    Engine eng = RngStream{g.seed, static_cast<std::uint64_t>(trial)}.engine();
    DenseMatrix m;
    Spectrum s;
    if (a.ensemble == "gue" || a.ensemble == "wigner") {
      const HermitianMatrix h = a.ensemble == "gue" ? sample_gue(a.n, eng) : sample_wigner(a.n, atom, eng);
      s = hermitian_eigen(h).spectrum();
      m = h.dense();
    } else if (a.ensemble == "elliptic") {
      const ComplexMatrix c = sample_elliptic(a.n, a.tau_n, eng);
      s = general_eigen(c);
      m = c.dense();
    } else {
      const WeakEllipticDraw d = sample_weak_elliptic(a.n, a.tau_n, atom, eng);
      const ComplexMatrix c =
          a.ensemble == "gauss-divisible" ? sample_gauss_divisible(d.a, a.t, a.tau_n, eng) : d.a;
      s = general_eigen(c);
      m = c.dense();
    }
    spectra[static_cast<std::size_t>(trial)] = TrialSpectrum{trial, std::move(s)};
    if (trial == 0) {
      std::lock_guard lock(first_mutex);
      first = std::move(m);
    }
  });

  write_text_file(dir / "eigenvalues.csv", eigenvalue_csv(spectra));
  if (a.write_matrix) write_text_file(dir / "matrix.csv", matrix_csv(*first));
  write_sidecar(dir, sub, g);
  out << "sample: wrote " << a.trials << " spectra of size " << a.n << " to " << (dir / "eigenvalues.csv").string()
      << "\n";
  return kExitOk;
}

// ---- spectrum --------------------------------------------------------------

int cmd_spectrum(const std::string& matrix_path, bool hermitian, const CLI::App& sub, const Globals& g,
                 std::ostream& out) {
  const DenseMatrix m = parse_matrix_csv(read_text_file(matrix_path));
  const fs::path dir = prepare_out(g);
  const Spectrum s = hermitian ? hermitian_eigen(HermitianMatrix(m)).spectrum() : general_eigen(ComplexMatrix(m));
  write_text_file(dir / "spectrum.csv", eigenvalue_csv({TrialSpectrum{0, s}}));
  write_sidecar(dir, sub, g);
  out << "spectrum: " << s.size() << " eigenvalues\n";
  return kExitOk;
}

// ---- check-class -----------------------------------------------------------

struct CheckArgs {
  Index n = 400;
  double epsilon = 0.5;
  double tau_n = 0.0;  // 0: use 1/N
  std::string w1 = "gue";
  std::string w2 = "gue";
  int m_max = 8;
};

int cmd_check_class(const CheckArgs& a, const CLI::App& sub, const Globals& g, std::ostream& out) {
  if (!(a.epsilon > 0.0 && a.epsilon <= 0.5)) throw InputError("--epsilon must lie in (0, 1/2]");
  const fs::path dir = prepare_out(g);
  Engine eng = RngStream{g.seed, 0}.engine();
  const auto make = [&](const std::string& what) {
    if (what == "gue") return sample_gue(a.n, eng);
    if (what == "identity") return HermitianMatrix::identity(a.n);
    if (what == "zero") return HermitianMatrix::zero(a.n);
    return load_hermitian(what);
  };
  const HermitianMatrix w1 = make(a.w1);
  const HermitianMatrix w2 = make(a.w2);
  if (w1.size() != w2.size()) throw InputError("check-class: W1 and W2 differ in size");
  const double tau_n = a.tau_n > 0.0 ? a.tau_n : 1.0 / static_cast<double>(w1.size());
  ClassCheckOptions opts;
  opts.m_max = a.m_max;
  const ClassReport report = check_class_membership(w1, w2, a.epsilon, tau_n, opts);
  write_json_file(dir / "class_report.json", to_json(report));
  write_sidecar(dir, sub, g);
  out << "check-class: " << (report.pass ? "pass" : "fail");
  for (const auto& c : report.conditions) out << " " << c.name << "=" << (c.pass ? "ok" : "FAIL");
  out << "\n";
  return report.pass ? kExitOk : kExitCheckFailed;
}

// ---- saddle ----------------------------------------------------------------

struct SaddleArgs {
  bool spectral = false;
  double energy = 0.0;
  double t = 0.01;
  Index n = 400;
  double tau_n = 0.0;
};

int cmd_saddle(const SaddleArgs& a, const CLI::App& sub, const Globals& g, std::ostream& out) {
  const fs::path dir = prepare_out(g);
  SaddleResult r;
  if (a.spectral) {
    const double tau_n = a.tau_n > 0.0 ? a.tau_n : 1.0 / static_cast<double>(a.n);
    Engine eng = RngStream{g.seed, 0}.engine();
    const WeakEllipticDraw d = sample_weak_elliptic(a.n, tau_n, AtomDistribution::gaussian(), eng);
    const ResolventPair pair(d.w1, d.w2);
    r = solve_lambda(StieltjesFunction::spectral(pair), a.energy, a.t);
    r.tau_et = tau_et(alpha_beta(pair, r.lambda, tau_n).beta, a.n, tau_n, r.eta, a.t);
  } else {
    r = solve_lambda(StieltjesFunction::semicircle(), a.energy, a.t);
  }
  const Json j = to_json(r);
  write_json_file(dir / "saddle.json", j);
  write_sidecar(dir, sub, g);
  out << j.dump(2) << "\n";
  return kExitOk;
}

// ---- kernel ----------------------------------------------------------------

struct KernelArgs {
  double tau = 1.0;
  int order = 64;
  std::string grid = "-3:3:0.1";
  std::string ygrid;
  std::string points;
};

int cmd_kernel(const KernelArgs& a, const CLI::App& sub, const Globals& g, std::ostream& out) {
  const KernelParams params{a.tau, a.order};
  params.validate();
  const auto xs = parse_range(a.grid, "--grid");
  const auto ys = a.ygrid.empty() ? xs : parse_range(a.ygrid, "--ygrid");
  const fs::path dir = prepare_out(g);
  std::vector<Complex> pts;
  for (const double y : ys) {
    for (const double x : xs) pts.emplace_back(x, y);
  }
  write_text_file(dir / "kernel_rho1.csv", kernel_rho1_csv(params, pts));
  if (!a.points.empty()) {
    write_json_file(dir / "kernel_matrix.json", to_json(evaluate_kernel_grid(params, parse_points(a.points))));
  }
  write_sidecar(dir, sub, g);
  out << "kernel: " << pts.size() << " points, tau = " << a.tau << "\n";
  return kExitOk;
}

// ---- correlate -------------------------------------------------------------

struct CorrelateArgs {
  std::string mode = "thm2";
  Index n = 256;
  double tau_n = -1.0;
  double tau_e = -1.0;
  double t = 0.0;
  double energy = 0.0;
  std::string atom = "gaussian";
  std::int64_t trials = 100;
  std::string window;
  int nx = 3;
  int ny = 16;
  int bins = 13;
  double half_width = 3.0;
};

int cmd_correlate(const CorrelateArgs& a, const CLI::App& sub, const Globals& g, std::ostream& out,
                  std::ostream& err) {
  if (a.mode != "thm1" && a.mode != "thm2") throw InputError("--mode must be thm1 or thm2");
  if (a.trials < 1) throw InputError("--trials must be >= 1");
  CorrelationConfig cfg;
  cfg.scaling = a.mode == "thm1" ? BulkScaling::GaussDivisible : BulkScaling::Wigner;
  double tau_n = a.tau_n;
  if (a.tau_e >= 0.0) {
    if (a.tau_n >= 0.0) throw InputError("give at most one of --tau-n and --tau-e");
    tau_n = tau_n_for_effective(a.tau_e, a.n, a.energy);
  }
  if (tau_n < 0.0) tau_n = 1.0 / static_cast<double>(a.n);
  cfg.ensemble = EnsembleSpec{a.n, tau_n, a.t, parse_atom(a.atom), g.seed};
  cfg.energy = a.energy;
  const double rho = semicircle_density(a.energy);
  cfg.window = a.window.empty()
                   ? default_bulk_window(std::max(static_cast<double>(a.n) * tau_n * std::numbers::pi * rho, 1e-12))
                   : parse_window(a.window);
  cfg.nx = a.nx;
  cfg.ny = a.ny;
  cfg.rho2_bins = DisplacementBins{a.half_width, a.bins};
  cfg.trials = a.trials;
  cfg.workers = g.workers;

  std::atomic<std::int64_t> done{0};
  std::mutex err_mutex;
  const std::int64_t every = std::max<std::int64_t>(1, a.trials / 10);
  cfg.on_trial_done = [&](std::int64_t) {
    const std::int64_t k = ++done;
    if (k % every == 0 || k == a.trials) {
      std::lock_guard lock(err_mutex);
      err << "correlate: " << k << "/" << a.trials << " trials\n";
    }
  };

  const fs::path dir = prepare_out(g);
  const CorrelationRun run = run_correlation(cfg);

  Json meta{{"mode", a.mode},
            {"energy", a.energy},
            {"ensemble", to_json(cfg.ensemble)},
            {"tau_theory", run.tau_theory},
            {"successful_trials", run.successful_trials},
            {"failed_trials", run.failed_trials}};
  Json rho1 = to_json(run.rho1);
  rho1["metadata"] = meta;
  Json rho2 = to_json(run.rho2);
  rho2["metadata"] = meta;
  write_text_file(dir / "rho1.csv", binned_density_csv(run.rho1));
  write_json_file(dir / "rho1.json", rho1);
  write_text_file(dir / "rho2.csv", binned_density_csv(run.rho2));
  write_json_file(dir / "rho2.json", rho2);
  write_sidecar(dir, sub, g);

  const auto failed = static_cast<double>(run.failed_trials.size());
  if (failed > 0.01 * static_cast<double>(a.trials)) {
    std::ostringstream msg;
    msg << "saddle did not converge on " << run.failed_trials.size() << " of " << a.trials
        << " trials (seed " << g.seed << ", trials";
    for (const auto t : run.failed_trials) msg << " " << t;
    msg << ")";
    throw NumericalError(msg.str());
  }

  const KernelParams params{run.tau_theory, 64};
  ComparisonReport report;
  try {
    report = compare(run.rho1, [&](Complex z) { return rho_1(params, z); });
  } catch (const NumericalError& e) {
    write_json_file(dir / "comparison.json", Json{{"error", e.what()}, {"tau_theory", run.tau_theory}});
    throw;
  }
  Json cj = to_json(report);
  cj["tau_theory"] = run.tau_theory;
  write_json_file(dir / "comparison.json", cj);
  out << "correlate: tau = " << format_double(run.tau_theory) << ", rel_L1 = " << format_double(report.rel_l1)
      << ", bins = " << report.n_bins_used << "\n";
  return kExitOk;
}

// ---- compare ---------------------------------------------------------------

BinnedDensity binned_density_from_json(const Json& j) {
  try {
    BinnedDensity d;
    const auto& w = j.at("window");
    d.window = Window{w.at("x0").get<double>(), w.at("x1").get<double>(), w.at("y0").get<double>(),
                      w.at("y1").get<double>()};
    d.window.validate();
    d.nx = j.at("nx").get<int>();
    d.ny = j.at("ny").get<int>();
    d.trials = j.at("trials").get<std::int64_t>();
    d.total_points = j.at("total_points").get<std::int64_t>();
    d.normalization_area = j.value("normalization_area", 1.0);
    d.density = j.at("density").get<std::vector<double>>();
    if (d.nx < 1 || d.ny < 1 || d.density.size() != static_cast<std::size_t>(d.nx) * static_cast<std::size_t>(d.ny)) {
      throw IoError("density JSON: bin counts do not match the data");
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("density JSON: ") + e.what());
  }
}

int cmd_compare(const std::string& path, double tau, const CLI::App& sub, const Globals& g, std::ostream& out) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError(std::string("cannot parse '") + path + "': " + e.what());
  }
  const BinnedDensity d = binned_density_from_json(j);
  if (tau <= 0.0) {
    if (!j.contains("metadata")) throw InputError("--tau is required when the estimate carries no metadata");
    tau = j["metadata"].at("tau_theory").get<double>();
  }
  const KernelParams params{tau, 64};
  params.validate();
  const ComparisonReport r = compare(d, [&](Complex z) { return rho_1(params, z); });
  const fs::path dir = prepare_out(g);
  Json cj = to_json(r);
  cj["tau_theory"] = tau;
  write_json_file(dir / "comparison.json", cj);
  write_sidecar(dir, sub, g);
  out << "compare: rel_L1 = " << format_double(r.rel_l1) << "\n";
  return kExitOk;
}

// ---- heatflow --------------------------------------------------------------

struct HeatflowArgs {
  std::string orders = "1,2";
  std::string times = "0.2,0.1,0.05";
  double half_width = 8.0;
  double h = 1.0 / 128.0;
  std::string density = "shift";
  double amplitude = 0.2;
};

int cmd_heatflow(const HeatflowArgs& a, const CLI::App& sub, const Globals& g, std::ostream& out) {
  std::vector<int> orders;
  for (const double v : parse_list(a.orders, "--n")) {
    if (v != std::floor(v) || v < 1) throw InputError("--n: orders must be positive integers");
    orders.push_back(static_cast<int>(v));
  }
  const auto times = parse_list(a.times, "--t");
  GridDensity f;
  if (a.density == "shift") {
    f = shifted_gaussian(a.amplitude, a.half_width, a.h);
  } else if (a.density == "sine") {
    f = sine_perturbed_gaussian(a.amplitude, a.half_width, a.h);
  } else {
    throw InputError("--density must be shift or sine");
  }
  const ScalingResult r = run_scaling_experiment(f, times, orders, g.workers);
  const fs::path dir = prepare_out(g);
  write_text_file(dir / "heatflow.csv", scaling_csv(r));
  write_json_file(dir / "heatflow_slopes.json", to_json(r));
  write_sidecar(dir, sub, g);
  for (const auto& [n, s] : r.slopes) out << "heatflow: n = " << n << " slope = " << format_double(s) << "\n";
  for (const auto& p : r.points) {
    if (p.negative_density) out << "heatflow: warning: negative density at t = " << p.t << ", n = " << p.n << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bulk statistics of weakly non-Hermitian random matrices"};
  app.set_config("--config", "", "TOML/INI file of option values; command-line flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory")->capture_default_str();

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "Draw matrices and write their spectra");
  sample->add_option("--ensemble", sa.ensemble, "gue, wigner, elliptic, weak-elliptic, gauss-divisible")
      ->capture_default_str();
  sample->add_option("--n", sa.n, "Matrix size")->capture_default_str();
  sample->add_option("--tau-n", sa.tau_n, "Non-Hermitian strength")->capture_default_str();
  sample->add_option("--t", sa.t, "Gaussian component time")->capture_default_str();
  sample->add_option("--atom", sa.atom, "gaussian or smoothed:a1,a2,a3,a4")->capture_default_str();
  sample->add_option("--trials", sa.trials, "Number of matrices")->capture_default_str();
  sample->add_flag("--write-matrix", sa.write_matrix, "Also write the first matrix");

  std::string spectrum_path;
  bool spectrum_hermitian = false;
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of a matrix CSV");
  spectrum->add_option("--matrix", spectrum_path, "Matrix CSV (i,j,re,im)")->required();
  spectrum->add_flag("--hermitian", spectrum_hermitian, "Require an exactly Hermitian matrix");

  CheckArgs ca;
  auto* check = app.add_subcommand("check-class", "Check the resolvent conditions on a pair (W1, W2)");
  check->add_option("--n", ca.n, "Matrix size for generated matrices")->capture_default_str();
  check->add_option("--epsilon", ca.epsilon, "Domain exponent in (0, 1/2]")->capture_default_str();
  check->add_option("--tau-n", ca.tau_n, "Non-Hermitian strength (default 1/N)")->capture_default_str();
  check->add_option("--w1", ca.w1, "gue, identity, zero or a matrix CSV")->capture_default_str();
  check->add_option("--w2", ca.w2, "gue, identity, zero or a matrix CSV")->capture_default_str();
  check->add_option("--m-max", ca.m_max, "Largest multi-resolvent length")->capture_default_str();

  SaddleArgs da;
  auto* saddle = app.add_subcommand("saddle", "Solve the self-consistent equation for lambda");
  saddle->add_flag("--semicircle", "Use the semicircle Stieltjes transform (default)");
  saddle->add_flag("--spectral", da.spectral, "Use the empirical transform of a sampled W1");
  saddle->add_option("--e", da.energy, "Energy E")->capture_default_str();
  saddle->add_option("--t", da.t, "Time t > 0")->capture_default_str();
  saddle->add_option("--n", da.n, "Matrix size for --spectral")->capture_default_str();
  saddle->add_option("--tau-n", da.tau_n, "Non-Hermitian strength for --spectral (default 1/N)")
      ->capture_default_str();

  KernelArgs ka;
  auto* kernel = app.add_subcommand("kernel", "Evaluate the bulk kernel");
  kernel->add_option("--tau", ka.tau, "Kernel parameter")->capture_default_str();
  kernel->add_option("--order", ka.order, "Gauss-Legendre order")->capture_default_str();
  kernel->add_option("--grid", ka.grid, "x range a:b:step (also y unless --ygrid)")->capture_default_str();
  kernel->add_option("--ygrid", ka.ygrid, "y range a:b:step");
  kernel->add_option("--points", ka.points, "Kernel matrix points 're,im;re,im;...'");

  CorrelateArgs ra;
  auto* correlate = app.add_subcommand("correlate", "Monte Carlo correlation functions in bulk scaling");
  correlate->add_option("--mode", ra.mode, "thm1 (Gauss-divisible, saddle scaling) or thm2 (semicircle scaling)")
      ->capture_default_str();
  correlate->add_option("--n", ra.n, "Matrix size")->capture_default_str();
  correlate->add_option("--tau-n", ra.tau_n, "Non-Hermitian strength (default 1/N)")->capture_default_str();
  correlate->add_option("--tau-e", ra.tau_e, "Target effective tau; sets tau_N")->capture_default_str();
  correlate->add_option("--t", ra.t, "Gaussian component time")->capture_default_str();
  correlate->add_option("--e", ra.energy, "Energy E")->capture_default_str();
  correlate->add_option("--atom", ra.atom, "gaussian or smoothed:a1,a2,a3,a4")->capture_default_str();
  correlate->add_option("--trials", ra.trials, "Number of matrices")->capture_default_str();
  correlate->add_option("--window", ra.window, "x0:x1:y0:y1 (default |Re| <= 3, |Im| <= 3 sqrt(tau) + 1)");
  correlate->add_option("--nx", ra.nx, "x bins")->capture_default_str();
  correlate->add_option("--ny", ra.ny, "y bins")->capture_default_str();
  correlate->add_option("--bins", ra.bins, "Displacement bins per axis")->capture_default_str();
  correlate->add_option("--half-width", ra.half_width, "Displacement half-width")->capture_default_str();

  std::string compare_path;
  double compare_tau = 0.0;
  auto* cmp = app.add_subcommand("compare", "Compare a one-point estimate with the kernel");
  cmp->add_option("--estimate", compare_path, "rho1.json from correlate")->required();
  cmp->add_option("--tau", compare_tau, "Kernel parameter (default: from the estimate)")->capture_default_str();

  HeatflowArgs ha;
  auto* heat = app.add_subcommand("heatflow", "Reverse heat flow error scaling");
  heat->add_option("--n", ha.orders, "Truncation orders, comma separated")->capture_default_str();
  heat->add_option("--t", ha.times, "Times, comma separated")->capture_default_str();
  heat->add_option("--half-width", ha.half_width, "Grid half-width")->capture_default_str();
  heat->add_option("--spacing", ha.h, "Grid spacing")->capture_default_str();
  heat->add_option("--density", ha.density, "shift: e^{-(x-a)^2}; sine: e^{-x^2}(1 + a sin x)")
      ->capture_default_str();
  heat->add_option("--amplitude", ha.amplitude, "Perturbation size a")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(sa, *sample, g, out);
    if (*spectrum) return cmd_spectrum(spectrum_path, spectrum_hermitian, *spectrum, g, out);
    if (*check) return cmd_check_class(ca, *check, g, out);
    if (*saddle) return cmd_saddle(da, *saddle, g, out);
    if (*kernel) return cmd_kernel(ka, *kernel, g, out);
    if (*correlate) return cmd_correlate(ra, *correlate, g, out, err);
    if (*cmp) return cmd_compare(compare_path, compare_tau, *cmp, g, out);
    if (*heat) return cmd_heatflow(ha, *heat, g, out);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::bad_alloc&) {
    err << "numerical error: out of memory\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace wnh

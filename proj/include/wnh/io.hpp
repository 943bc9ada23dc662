#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "wnh/correlation.hpp"
#include "wnh/diagnostics.hpp"
#include "wnh/ensembles.hpp"
#include "wnh/heatflow.hpp"
#include "wnh/kernel.hpp"
#include "wnh/linalg.hpp"
#include "wnh/saddle.hpp"

namespace wnh {

using Json = nlohmann::ordered_json;

// 17 significant digits, round-trip exact.
std::string format_double(double v);

// Writes `content` verbatim; throws IoError if the file cannot be written.
void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

// CSV `i,j,re,im`, one row per entry in row-major order.
std::string matrix_csv(const DenseMatrix& m);
// Inverse of matrix_csv; throws IoError on malformed input.
DenseMatrix parse_matrix_csv(const std::string& text);

struct TrialSpectrum {
  std::int64_t trial = 0;
  Spectrum spectrum;
};
// CSV `trial,index,re,im`.
std::string eigenvalue_csv(const std::vector<TrialSpectrum>& spectra);

Json to_json(Complex z);
Json to_json(const AtomDistribution& atom);
Json to_json(const EnsembleSpec& spec);
Json to_json(const ClassReport& report);
Json to_json(const SaddleResult& result);
Json to_json(const KernelGrid& grid);
Json to_json(const Window& window);
Json to_json(const BinnedDensity& density);
Json to_json(const ComparisonReport& report);
Json to_json(const ScalingResult& result);

// CSV `x,y,rho1` over the given points.
std::string kernel_rho1_csv(const KernelParams& params, const std::vector<Complex>& points);
// CSV `x,y,density` at bin centers.
std::string binned_density_csv(const BinnedDensity& density);
// CSV `t,n,chi2`.
std::string scaling_csv(const ScalingResult& result);

}  // namespace wnh

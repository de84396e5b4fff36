#include "uqpde/samples.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace uqpde {

Samples::Samples(Matrix values, GeometryPtr geometry, SamplesMeta meta)
    : values_(std::move(values)), geometry_(std::move(geometry)), meta_(std::move(meta)) {
  require(values_.cols() >= 1, "Samples: need at least one sample");
  if (geometry_) {
    require_dim(geometry_->par_dim(), values_.rows(), "Samples dimension vs geometry");
  }
}

Samples Samples::select(const std::vector<Index>& columns) const {
  Matrix out(values_.rows(), static_cast<Index>(columns.size()));
  for (std::size_t i = 0; i < columns.size(); ++i) {
    require(columns[i] >= 0 && columns[i] < count(), "Samples::select: column out of range");
    out.col(static_cast<Index>(i)) = values_.col(columns[i]);
  }
  return Samples(std::move(out), geometry_, meta_);
}

Samples Samples::thin(Index stride) const {
  require(stride >= 1, "Samples::thin: stride must be >= 1");
  std::vector<Index> cols;
  for (Index c = 0; c < count(); c += stride) cols.push_back(c);
  return select(cols);
}

Vector mean(const Samples& samples) { return samples.values().rowwise().mean(); }

Vector variance(const Samples& samples) {
  const Index n = samples.count();
  require(n >= 2, "variance: need at least 2 samples");
  const Vector m = mean(samples);
  Vector out = Vector::Zero(samples.dim());
  for (Index c = 0; c < n; ++c) {
    out += (samples.values().col(c) - m).cwiseAbs2();
  }
  return out / static_cast<double>(n - 1);
}

namespace {

double interpolated_quantile(std::vector<double>& sorted_buffer, double q) {
  std::sort(sorted_buffer.begin(), sorted_buffer.end());
  const auto n = static_cast<Index>(sorted_buffer.size());
  if (n == 1) return sorted_buffer[0];
  const double pos = q * static_cast<double>(n - 1);
  const auto lo = static_cast<Index>(std::floor(pos));
  const auto hi = std::min(lo + 1, n - 1);
  const double t = pos - static_cast<double>(lo);
  return (1.0 - t) * sorted_buffer[lo] + t * sorted_buffer[hi];
}

}  // namespace

CiBands ci(const Samples& samples, double percent) {
  require(percent > 0.0 && percent <= 100.0, "ci: percent must be in (0, 100]");
  const double q_lo = (1.0 - percent / 100.0) / 2.0;
  CiBands bands;
  bands.percent = percent;
  bands.lower.resize(samples.dim());
  bands.upper.resize(samples.dim());
  bands.mean = mean(samples);
  std::vector<double> buffer(samples.count());
  for (Index d = 0; d < samples.dim(); ++d) {
    for (Index c = 0; c < samples.count(); ++c) buffer[c] = samples.values()(d, c);
    bands.lower[d] = interpolated_quantile(buffer, q_lo);
    bands.upper[d] = interpolated_quantile(buffer, 1.0 - q_lo);
  }
  return bands;
}

Samples funvals(const Samples& samples) {
  require(samples.geometry() != nullptr, "funvals: samples carry no geometry");
  const Geometry& geom = *samples.geometry();
  Matrix mapped(geom.fun_dim(), samples.count());
  for (Index c = 0; c < samples.count(); ++c) {
    mapped.col(c) = geom.par2fun(samples.values().col(c));
  }
  return Samples(std::move(mapped), geom.function_geometry(), samples.meta());
}

namespace {

// autocorrelation via FFT of the centered, zero-padded series
Vector autocorrelation(const Vector& series) {
  const Index n = series.size();
  Index padded = 1;
  while (padded < 2 * n) padded *= 2;
  std::vector<double> buffer(static_cast<std::size_t>(padded), 0.0);
  const double m = series.mean();
  for (Index i = 0; i < n; ++i) buffer[static_cast<std::size_t>(i)] = series[i] - m;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, buffer);
  for (auto& f : freq) f = f * std::conj(f);
  std::vector<double> corr;
  fft.inv(corr, freq);
  Vector rho(n);
  const double c0 = corr[0];
  if (c0 <= 0.0) return Vector::Zero(n);
  for (Index t = 0; t < n; ++t) rho[t] = corr[static_cast<std::size_t>(t)] / c0;
  return rho;
}

}  // namespace

Vector ess(const Samples& samples) {
  const Index n = samples.count();
  require(n >= 10, "ess: need at least 10 samples");
  Vector out(samples.dim());
  for (Index d = 0; d < samples.dim(); ++d) {
    const Vector series = samples.values().row(d).transpose();
    const double centered_norm = (series.array() - series.mean()).abs().maxCoeff();
    if (centered_norm == 0.0) {
      out[d] = 1.0;  // degenerate floor for constant chains
      continue;
    }
    const Vector rho = autocorrelation(series);
    // Sum of paired autocorrelations until the first non-positive pair.
    double tau = 0.0;
    for (Index k = 0; 2 * k + 1 < n; ++k) {
      const double pair = rho[2 * k] + rho[2 * k + 1];
      if (pair <= 0.0) break;
      tau += pair;
    }
    tau = 2.0 * tau - 1.0;
    tau = std::max(tau, 1.0);
    out[d] = std::min(static_cast<double>(n), static_cast<double>(n) / tau);
    out[d] = std::max(out[d], 1.0);
  }
  return out;
}

namespace {

nlohmann::json meta_to_json(const Samples& samples) {
  nlohmann::json j;
  j["sampler"] = samples.meta().sampler;
  j["seed"] = samples.meta().seed;
  j["rng"] = samples.meta().rng;
  if (std::isfinite(samples.meta().acceptance_rate)) {
    j["acceptance_rate"] = samples.meta().acceptance_rate;
  }
  if (std::isfinite(samples.meta().target_acceptance)) {
    j["target_acceptance"] = samples.meta().target_acceptance;
  }
  j["n_samples"] = samples.count();
  j["n_dim"] = samples.dim();
  if (samples.geometry()) j["geometry"] = samples.geometry()->describe();
  return j;
}

}  // namespace

void export_samples(const Samples& samples, const std::string& dir, double ci_percent) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, "export_samples: cannot create directory " + dir + ": " + ec.message());

  {
    std::ofstream out(dir + "/samples.csv");
    require(out.good(), "export_samples: cannot open " + dir + "/samples.csv");
    out.precision(17);
    for (Index d = 0; d < samples.dim(); ++d) out << (d ? "," : "") << "x_" << (d + 1);
    out << "\n";
    for (Index c = 0; c < samples.count(); ++c) {
      for (Index d = 0; d < samples.dim(); ++d) {
        out << (d ? "," : "") << samples.values()(d, c);
      }
      out << "\n";
    }
    require(out.good(), "export_samples: write failed for " + dir + "/samples.csv");
  }
  {
    std::ofstream out(dir + "/stats.csv");
    require(out.good(), "export_samples: cannot open " + dir + "/stats.csv");
    out.precision(17);
    out << "index,mean,variance,ci_lower,ci_upper\n";
    const Vector m = mean(samples);
    const Vector v = samples.count() >= 2 ? variance(samples)
                                          : Vector::Zero(samples.dim());
    const CiBands bands = ci(samples, ci_percent);
    for (Index d = 0; d < samples.dim(); ++d) {
      out << (d + 1) << "," << m[d] << "," << v[d] << "," << bands.lower[d] << ","
          << bands.upper[d] << "\n";
    }
    require(out.good(), "export_samples: write failed for " + dir + "/stats.csv");
  }
  {
    std::ofstream out(dir + "/meta.json");
    require(out.good(), "export_samples: cannot open " + dir + "/meta.json");
    out << meta_to_json(samples).dump(2) << "\n";
    require(out.good(), "export_samples: write failed for " + dir + "/meta.json");
  }
}

Samples import_samples(const std::string& dir, GeometryPtr geometry) {
  std::ifstream in(dir + "/samples.csv");
  require(in.good(), "import_samples: cannot open " + dir + "/samples.csv");
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), "import_samples: empty samples.csv");
  const Index n_dim = std::count(header.begin(), header.end(), ',') + 1;
  std::vector<double> flat;
  std::string line;
  Index n_rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    Index d = 0;
    while (std::getline(ls, cell, ',')) {
      flat.push_back(std::stod(cell));
      ++d;
    }
    require_dim(n_dim, d, "import_samples row width");
    ++n_rows;
  }
  Matrix values(n_dim, n_rows);
  for (Index c = 0; c < n_rows; ++c) {
    for (Index d = 0; d < n_dim; ++d) values(d, c) = flat[static_cast<std::size_t>(c * n_dim + d)];
  }

  SamplesMeta meta;
  std::ifstream meta_in(dir + "/meta.json");
  if (meta_in.good()) {
    nlohmann::json j = nlohmann::json::parse(meta_in);
    meta.sampler = j.value("sampler", "");
    meta.seed = j.value("seed", 0ull);
    meta.rng = j.value("rng", "");
    meta.acceptance_rate = j.value("acceptance_rate",
                                   std::numeric_limits<double>::quiet_NaN());
    meta.target_acceptance = j.value("target_acceptance",
                                     std::numeric_limits<double>::quiet_NaN());
  }
  return Samples(std::move(values), std::move(geometry), std::move(meta));
}

}  // namespace uqpde

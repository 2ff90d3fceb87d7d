#include "tspec/io.hpp"

#include <unistd.h>

#include <atomic>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace tspec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("expected [re, im] pair");
  return cplx(j[0].get<double>(), j[1].get<double>());
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

}  // namespace

void atomic_write(const fs::path& path, const std::string& content) {
  static std::atomic<unsigned long> sequence{0};
  const fs::path dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  fs::create_directories(dir);
  fs::path tmp = dir / (path.filename().string() + ".tmp-" +
                        std::to_string(static_cast<unsigned long>(::getpid())) + "-" +
                        std::to_string(sequence.fetch_add(1)));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) os << ',';
    os << header[i];
  }
  os << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size())
      throw std::invalid_argument("CSV row width does not match the header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ',';
      os << format_double(row[i]);
    }
    os << '\n';
  }
  return os.str();
}

void save_csv(const fs::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
  atomic_write(path, to_csv(header, rows));
}

void save_matrix_csv(const fs::path& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& rows) {
  if (static_cast<Eigen::Index>(header.size()) != rows.cols())
    throw std::invalid_argument("CSV header width does not match the matrix");
  std::vector<std::vector<double>> table(static_cast<size_t>(rows.rows()));
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    table[static_cast<size_t>(i)].resize(static_cast<size_t>(rows.cols()));
    for (Eigen::Index j = 0; j < rows.cols(); ++j)
      table[static_cast<size_t>(i)][static_cast<size_t>(j)] = rows(i, j);
  }
  save_csv(path, header, table);
}

void save_trajectory(const fs::path& csv_path, const TrajectoryDataset& ds) {
  std::vector<std::string> header{"t"};
  for (Eigen::Index j = 0; j < ds.points.cols(); ++j)
    header.push_back("x" + std::to_string(j + 1));
  std::ostringstream os;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) os << ',';
    os << header[i];
  }
  os << '\n';
  for (Eigen::Index i = 0; i < ds.points.rows(); ++i) {
    os << format_double(static_cast<double>(i) * ds.dt);
    for (Eigen::Index j = 0; j < ds.points.cols(); ++j)
      os << ',' << format_double(ds.points(i, j));
    os << '\n';
  }
  atomic_write(csv_path, os.str());

  const json meta{{"system", ds.system},     {"dt", ds.dt},
                  {"seed", ds.seed},         {"noise_sigma", ds.noise_sigma},
                  {"burn_in", ds.burn_in},   {"samples", ds.points.rows()},
                  {"dim", ds.points.cols()}};
  atomic_write(csv_path.string() + ".meta.json", meta.dump(2) + "\n");
}

TrajectoryDataset load_trajectory(const fs::path& csv_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty trajectory file");
  // header t,x1,...,xd
  size_t cols = 1;
  for (char c : line)
    if (c == ',') ++cols;
  if (cols < 2) throw std::runtime_error("trajectory CSV needs a time and a state column");

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(cols);
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != cols) throw std::runtime_error("ragged trajectory CSV row");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw std::runtime_error("trajectory needs at least two samples");

  TrajectoryDataset ds;
  ds.points.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 1; j < cols; ++j)
      ds.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j - 1)) = rows[i][j];
  ds.dt = rows[1][0] - rows[0][0];

  const fs::path meta_path = csv_path.string() + ".meta.json";
  if (fs::exists(meta_path)) {
    std::ifstream min(meta_path);
    json meta = json::parse(min);
    ds.system = meta.value("system", std::string());
    ds.dt = meta.value("dt", ds.dt);
    ds.seed = meta.value("seed", std::uint64_t{0});
    ds.noise_sigma = meta.value("noise_sigma", 0.0);
    ds.burn_in = meta.value("burn_in", 0.0);
  }
  if (!(ds.dt > 0.0)) throw std::runtime_error("trajectory time column is not increasing");
  return ds;
}

json symbol_to_json(const ToeplitzSymbol& s) {
  json coeffs = json::array();
  for (const cplx& c : s.coeffs()) coeffs.push_back(complex_to_json(c));
  json params = json::object();
  const SymbolParams& p = s.params();
  if (p.mu) params["mu"] = complex_to_json(*p.mu);
  if (p.dt) params["dt"] = *p.dt;
  if (p.omega_min) params["omega_min"] = *p.omega_min;
  if (p.omega_max) params["omega_max"] = *p.omega_max;
  params["jackson"] = p.jackson;
  return json{{"kind", to_string(s.kind())}, {"coeffs", std::move(coeffs)},
              {"params", std::move(params)}};
}

ToeplitzSymbol symbol_from_json(const json& j) {
  const auto kind = symbol_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown symbol kind in JSON");
  std::vector<cplx> coeffs;
  for (const auto& c : j.at("coeffs")) coeffs.push_back(complex_from_json(c));
  SymbolParams params;
  if (j.contains("params")) {
    const json& p = j["params"];
    if (p.contains("mu")) params.mu = complex_from_json(p["mu"]);
    if (p.contains("dt")) params.dt = p["dt"].get<double>();
    if (p.contains("omega_min")) params.omega_min = p["omega_min"].get<double>();
    if (p.contains("omega_max")) params.omega_max = p["omega_max"].get<double>();
    params.jackson = p.value("jackson", false);
  }
  return ToeplitzSymbol(*kind, std::move(coeffs), std::move(params));
}

json decomposition_to_json(const SpectralDecomposition& dec) {
  json eigenvalues = json::array();
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i)
    eigenvalues.push_back(complex_to_json(dec.eigenvalues[i]));
  json singular = json::array();
  for (Eigen::Index i = 0; i < dec.singular_values.size(); ++i)
    singular.push_back(dec.singular_values[i]);
  json usable = json::array();
  for (bool u : dec.usable) usable.push_back(u);
  return json{{"mode", dec.mode == FitMode::primal ? "primal" : "dual"},
              {"symbol", symbol_to_json(dec.symbol)},
              {"eigenvalues", std::move(eigenvalues)},
              {"singular_values", std::move(singular)},
              {"left_coeffs", complex_matrix_to_json(dec.left_coeffs)},
              {"right_coeffs", complex_matrix_to_json(dec.right_coeffs)},
              {"usable", std::move(usable)},
              {"n", dec.n},
              {"m", dec.m},
              {"gamma", dec.gamma},
              {"rank", dec.requested_rank},
              {"effective_rank", dec.effective_rank}};
}

void save_spectrum_csv(const fs::path& path, const Eigen::VectorXcd& eigenvalues,
                       const Eigen::VectorXd& singular_values) {
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    const double sigma = i < singular_values.size() ? singular_values[i] : 0.0;
    rows.push_back({eigenvalues[i].real(), eigenvalues[i].imag(), sigma});
  }
  save_csv(path, {"re", "im", "sigma"}, rows);
}

void save_response_csv(const fs::path& path, const ResponseCurve& curve) {
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < curve.theta.size(); ++i)
    rows.push_back({curve.theta[i], curve.values[i], curve.sigma[i]});
  save_csv(path, {"theta", "value", "sigma"}, rows);
}

void save_forecast_csv(const fs::path& path, const Eigen::VectorXd& times,
                       const Eigen::MatrixXd& predicted,
                       const std::optional<Eigen::MatrixXd>& truth) {
  if (times.size() != predicted.rows())
    throw std::invalid_argument("forecast times and predictions disagree in length");
  if (truth && (truth->rows() != predicted.rows() || truth->cols() != predicted.cols()))
    throw std::invalid_argument("forecast truth shape does not match predictions");
  std::vector<std::string> header{"t"};
  for (Eigen::Index j = 0; j < predicted.cols(); ++j)
    header.push_back("pred_" + std::to_string(j + 1));
  if (truth)
    for (Eigen::Index j = 0; j < predicted.cols(); ++j)
      header.push_back("true_" + std::to_string(j + 1));
  std::vector<std::vector<double>> rows;
  for (Eigen::Index i = 0; i < times.size(); ++i) {
    std::vector<double> row{times[i]};
    for (Eigen::Index j = 0; j < predicted.cols(); ++j) row.push_back(predicted(i, j));
    if (truth)
      for (Eigen::Index j = 0; j < predicted.cols(); ++j) row.push_back((*truth)(i, j));
    rows.push_back(std::move(row));
  }
  save_csv(path, header, rows);
}

std::uint64_t fnv1a_hash(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace tspec

#pragma once
// Artifact formats: CSV tables for anything numeric, JSON for metadata, and
// atomic file writes so partially written artifacts are never observable.

#include <json.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tspec/analysis.hpp"
#include "tspec/dynamics.hpp"
#include "tspec/estimators.hpp"

namespace tspec {

// Write-temp-then-rename in the target directory; creates parent directories.
void atomic_write(const std::filesystem::path& path, const std::string& content);

// Round-trip-exact CSV: doubles printed with up to 17 significant digits.
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);
void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows);
// Header row plus one CSV row per matrix row.
void save_matrix_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                     const Eigen::MatrixXd& rows);

// Trajectory CSV: header t,x1,...,xd; sample times are i*dt. A metadata
// sidecar (same path plus ".meta.json") records system, dt, seed, noise, and
// burn-in; load reads it back when present and infers dt from the time column
// otherwise.
void save_trajectory(const std::filesystem::path& csv_path, const TrajectoryDataset& ds);
TrajectoryDataset load_trajectory(const std::filesystem::path& csv_path);

nlohmann::json symbol_to_json(const ToeplitzSymbol& s);
ToeplitzSymbol symbol_from_json(const nlohmann::json& j);

// Inspection-oriented dump (coefficients included); not a runnable reload.
nlohmann::json decomposition_to_json(const SpectralDecomposition& dec);

// Spectrum CSV re,im,sigma: one row per eigenvalue; the sigma column pairs
// index-wise with the subspace energies (both run over the effective rank).
void save_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXcd& eigenvalues,
                       const Eigen::VectorXd& singular_values);

void save_response_csv(const std::filesystem::path& path, const ResponseCurve& curve);

// Forecast trace t,pred_1..pred_d[,true_1..true_d].
void save_forecast_csv(const std::filesystem::path& path, const Eigen::VectorXd& times,
                       const Eigen::MatrixXd& predicted,
                       const std::optional<Eigen::MatrixXd>& truth);

std::uint64_t fnv1a_hash(std::string_view s);

}  // namespace tspec

#include "tspec/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <iostream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "tspec/analysis.hpp"
#include "tspec/dynamics.hpp"
#include "tspec/features.hpp"
#include "tspec/io.hpp"
#include "tspec/parallel.hpp"
#include "tspec/rng.hpp"

namespace tspec {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// ---------------------------------------------------------------------------
// Config schema

struct SystemSpec {
  std::string kind;  // duffing | ou | langevin | file
  json params;
  double dt = 0.1;
  Index n = 0;
  double burn_in = 0.0;
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  fs::path file;
};

struct FeatureSpec {
  bool kernel = false;  // false: dictionary/primal data, true: gaussian Gram
  Dictionary dict;
  double lengthscale = 1.0;
  int window = 1;  // delay-embedding width (duplicated into dict.window)
};

struct EstimatorSpec {
  FitMode mode = FitMode::primal;
  json symbol;  // catalogue spec, resolved per-trial once dt is known
  double gamma = 1e-6;
  int rank = 5;
  ApplyPath path = ApplyPath::automatic;
  std::optional<SpectralBranch> branch;
};

struct ResolvedConfig {
  json raw;
  std::string task_kind;
  json task;
  SystemSpec system;
  FeatureSpec features;
  EstimatorSpec estimator;
  fs::path output;
  int trials = 1;
  bool has_system = false;
  bool has_features = false;
  bool has_estimator = false;
};

void require(std::vector<std::string>& errors, bool ok, const std::string& msg) {
  if (!ok) errors.push_back(msg);
}

SpectralBranch branch_from_string(const std::string& s, std::vector<std::string>& errors) {
  if (s == "real" || s == "real_axis") return SpectralBranch::real_axis;
  if (s == "imaginary" || s == "imaginary_axis") return SpectralBranch::imaginary_axis;
  errors.push_back("estimator.branch must be real_axis, imaginary_axis, or auto");
  return SpectralBranch::real_axis;
}

ResolvedConfig parse_config(const json& cfg, const RunOptions& opts) {
  std::vector<std::string> errors;
  ResolvedConfig out;
  out.raw = cfg;

  if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");

  // task
  if (opts.task_override) {
    out.task_kind = *opts.task_override;
    out.task = cfg.value("task", json::object());
    if (out.task.is_object()) out.task["kind"] = out.task_kind;
  } else {
    const json task = cfg.value("task", json::object());
    require(errors, task.is_object() && task.contains("kind"),
            "task.kind is required (simulate|fit|spectrum|forecast|response|kreiss|bench)");
    if (task.is_object() && task.contains("kind")) {
      out.task_kind = task["kind"].get<std::string>();
      out.task = task;
    }
  }
  static const std::vector<std::string> kKinds{"simulate", "fit",    "spectrum", "forecast",
                                              "response", "kreiss", "bench"};
  require(errors, std::count(kKinds.begin(), kKinds.end(), out.task_kind) > 0,
          "unknown task kind '" + out.task_kind + "'");

  out.trials = cfg.value("trials", 1);
  require(errors, out.trials >= 1, "trials must be >= 1");

  std::string outdir = cfg.value("output", std::string("out"));
  out.output = opts.output_override.value_or(fs::path(outdir));

  // system
  if (cfg.contains("system")) {
    out.has_system = true;
    const json& s = cfg["system"];
    out.system.kind = s.value("kind", std::string());
    require(errors,
            out.system.kind == "duffing" || out.system.kind == "ou" ||
                out.system.kind == "langevin" || out.system.kind == "file",
            "system.kind must be duffing|ou|langevin|file");
    out.system.params = s.value("params", json::object());
    out.system.dt = s.value("dt", 0.1);
    out.system.n = s.value("n", 0);
    out.system.burn_in = s.value("burn_in", 0.0);
    out.system.seed = s.value("seed", std::uint64_t{0});
    out.system.noise_sigma = s.value("noise_sigma", 0.0);
    if (s.contains("path")) out.system.file = s["path"].get<std::string>();
    if (out.system.kind != "file") {
      require(errors, out.system.dt > 0.0, "system.dt must be positive");
      require(errors, out.system.n >= 2, "system.n must be >= 2");
    } else {
      require(errors, !out.system.file.empty(), "system.path required for kind=file");
    }
    require(errors, out.system.noise_sigma >= 0.0, "system.noise_sigma must be >= 0");
  }

  // features
  if (cfg.contains("features")) {
    out.has_features = true;
    const json& f = cfg["features"];
    const std::string fkind = f.value("kind", std::string("dictionary"));
    require(errors, fkind == "dictionary" || fkind == "gaussian_kernel",
            "features.kind must be dictionary|gaussian_kernel");
    out.features.kernel = fkind == "gaussian_kernel";
    out.features.window = f.value("window", 1);
    require(errors, out.features.window >= 1, "features.window must be >= 1");
    if (!out.features.kernel) {
      const json d = f.value("dictionary", json::object());
      out.features.dict.base_dim = d.value("base_dim", 1);
      out.features.dict.window = out.features.window;
      out.features.dict.max_degree = d.value("max_degree", 1);
      out.features.dict.include_cross = d.value("include_cross", false);
      const std::string basis = d.value("basis", std::string("monomial"));
      require(errors, basis == "monomial" || basis == "hermite",
              "dictionary.basis must be monomial|hermite");
      out.features.dict.basis =
          basis == "hermite" ? DictionaryBasis::hermite : DictionaryBasis::monomial;
      require(errors, out.features.dict.base_dim >= 1, "dictionary.base_dim must be >= 1");
      require(errors, out.features.dict.max_degree >= 1, "dictionary.max_degree must be >= 1");
    } else {
      out.features.lengthscale = f.value("lengthscale", 1.0);
      require(errors, out.features.lengthscale > 0.0, "features.lengthscale must be positive");
    }
  }

  // estimator
  if (cfg.contains("estimator")) {
    out.has_estimator = true;
    const json& e = cfg["estimator"];
    const std::string mode = e.value("mode", std::string("primal"));
    require(errors, mode == "primal" || mode == "dual", "estimator.mode must be primal|dual");
    out.estimator.mode = mode == "dual" ? FitMode::dual : FitMode::primal;
    out.estimator.symbol = e.value("symbol", json::object());
    out.estimator.gamma = e.value("gamma", 1e-6);
    out.estimator.rank = e.value("rank", 5);
    require(errors, out.estimator.gamma > 0.0, "estimator.gamma must be positive");
    require(errors, out.estimator.rank >= 1, "estimator.rank must be >= 1");
    const std::string path = e.value("path", std::string("auto"));
    if (path == "auto")
      out.estimator.path = ApplyPath::automatic;
    else if (path == "band")
      out.estimator.path = ApplyPath::band;
    else if (path == "fft")
      out.estimator.path = ApplyPath::fft;
    else
      errors.push_back("estimator.path must be auto|band|fft");
    if (e.contains("branch") && e["branch"].get<std::string>() != "auto")
      out.estimator.branch = branch_from_string(e["branch"].get<std::string>(), errors);
  }

  // feature/estimator consistency
  if (out.has_features && out.has_estimator) {
    if (out.features.kernel && out.estimator.mode == FitMode::primal)
      errors.push_back("gaussian_kernel features require estimator.mode=dual");
    if (!out.features.kernel && out.estimator.mode == FitMode::dual)
      errors.push_back("dictionary features require estimator.mode=primal");
  }

  // per-task block requirements
  const bool needs_system = out.task_kind != "bench";
  const bool needs_model = out.task_kind != "bench" && out.task_kind != "simulate";
  if (needs_system) require(errors, out.has_system, "task '" + out.task_kind + "' needs a system block");
  if (needs_model) {
    require(errors, out.has_features, "task '" + out.task_kind + "' needs a features block");
    require(errors, out.has_estimator, "task '" + out.task_kind + "' needs an estimator block");
  }
  if (out.task_kind == "fit" || out.task_kind == "spectrum" || out.task_kind == "forecast")
    require(errors, out.has_estimator && out.estimator.symbol.is_object() &&
                        out.estimator.symbol.contains("kind"),
            "task '" + out.task_kind + "' needs estimator.symbol.kind");
  if (out.task_kind == "forecast")
    require(errors, out.task.contains("horizon"), "forecast task needs horizon (seconds)");
  if (out.task_kind == "response") {
    require(errors, out.task.contains("mu"), "response task needs mu > 0");
    require(errors, out.task.contains("ell"), "response task needs ell (symbol bandwidth)");
    require(errors, out.task.contains("theta"), "response task needs a theta grid block");
  }
  if (out.task_kind == "kreiss") {
    require(errors, out.task.contains("ell"), "kreiss task needs ell (symbol bandwidth)");
    require(errors, out.task.contains("grid") || out.task.contains("re_min"),
            "kreiss task needs grid=[[re,im],...] or re_min/re_max/count");
  }
  if (out.task_kind == "bench")
    require(errors, out.task.contains("n_list") && out.task.contains("ell_list"),
            "bench task needs n_list and ell_list");

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Symbol resolution

ToeplitzSymbol symbol_from_config(const json& s, double dt) {
  if (!s.is_object() || !s.contains("kind"))
    throw ConfigError("estimator.symbol needs a kind");
  const std::string kind = s["kind"].get<std::string>();
  const auto get_mu = [&s]() {
    const json& m = s.at("mu");
    if (m.is_number()) return cplx(m.get<double>(), 0.0);
    return cplx(m.at(0).get<double>(), m.at(1).get<double>());
  };
  ToeplitzSymbol sym = [&]() -> ToeplitzSymbol {
    if (kind == "identity" || kind == "cosh" || kind == "sinh") {
      const auto k = symbol_kind_from_string(kind);
      return builtin_symbol(*k);
    }
    if (kind == "transfer_resolvent")
      return transfer_resolvent_symbol(get_mu(), s.at("ell").get<int>());
    if (kind == "generator_resolvent")
      return generator_resolvent_symbol(get_mu(), dt, s.at("ell").get<int>());
    if (kind == "bandpass_inverse")
      return bandpass_inverse_symbol(s.at("omega_min").get<double>(),
                                     s.at("omega_max").get<double>(), s.at("ell").get<int>(),
                                     s.value("jackson", true));
    if (kind == "trig")
      return trig_symbol(s.value("alpha", std::vector<double>{}),
                         s.value("beta", std::vector<double>{}));
    if (kind == "chebyshev")
      return chebyshev_symbol(s.value("b", std::vector<double>{}),
                              s.value("c", std::vector<double>{}));
    if (kind == "custom") {
      std::vector<cplx> coeffs;
      for (const auto& c : s.at("coeffs"))
        coeffs.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      return ToeplitzSymbol(SymbolKind::custom, std::move(coeffs));
    }
    throw ConfigError("unknown symbol kind '" + kind + "'");
  }();
  if (s.value("symmetrize", false)) sym = symmetrize(sym);
  return sym.with_dt(dt);
}

// ---------------------------------------------------------------------------
// Per-trial data pipeline

struct TrialData {
  TrajectoryDataset clean;  // training span plus any forecast extension
  TrajectoryDataset noisy;  // training span only
  MatrixXd embedded;        // q x D delay-embedded noisy states
  MatrixXd data;            // primal: m x q features; dual: q x q Gram
};

TrajectoryDataset simulate_clean(const SystemSpec& sys, std::uint64_t seed, Index extra) {
  const Index total = sys.n + extra;
  if (sys.kind == "duffing") {
    const json& p = sys.params;
    DuffingParams dp;
    dp.alpha = p.value("alpha", dp.alpha);
    dp.beta = p.value("beta", dp.beta);
    dp.gamma = p.value("gamma", dp.gamma);
    dp.delta = p.value("delta", dp.delta);
    dp.omega = p.value("omega", dp.omega);
    Eigen::Vector2d x0(1.0, 0.0);
    if (p.contains("x0")) x0 << p["x0"].at(0).get<double>(), p["x0"].at(1).get<double>();
    return simulate_duffing(dp, x0, sys.dt, total, sys.burn_in, p.value("substeps", 10));
  }
  if (sys.kind == "ou") {
    const json& p = sys.params;
    const auto mat = [](const json& rows) {
      MatrixXd m(rows.size(), rows.at(0).size());
      for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows.at(i).at(j).get<double>();
      return m;
    };
    const MatrixXd a = mat(p.at("A"));
    const MatrixXd b = mat(p.at("B"));
    VectorXd x0 = VectorXd::Zero(a.rows());
    if (p.contains("x0"))
      for (Index i = 0; i < x0.size(); ++i) x0[i] = p["x0"].at(i).get<double>();
    return simulate_ou(a, b, x0, sys.dt, total, sys.burn_in, seed, p.value("substeps", 10));
  }
  if (sys.kind == "langevin") {
    const json& p = sys.params;
    const std::string pot = p.value("potential", std::string("quadratic"));
    std::function<VectorXd(const VectorXd&)> grad;
    if (pot == "quadratic") {
      grad = [](const VectorXd& x) { return x; };
    } else if (pot == "double_well") {
      grad = [](const VectorXd& x) {
        return VectorXd(x.array() * (x.array().square() - 1.0));
      };
    } else {
      throw ConfigError("langevin potential must be quadratic|double_well");
    }
    const int d = p.value("dim", 1);
    VectorXd x0 = VectorXd::Zero(d);
    if (p.contains("x0"))
      for (Index i = 0; i < x0.size(); ++i) x0[i] = p["x0"].at(i).get<double>();
    return simulate_langevin(grad, p.value("friction", 1.0), p.value("kT", 1.0), x0, sys.dt,
                             total, sys.burn_in, seed, p.value("substeps", 10));
  }
  if (sys.kind == "file") {
    TrajectoryDataset ds = load_trajectory(sys.file);
    if (sys.n > 0 && ds.points.rows() < total)
      throw std::runtime_error("trajectory file holds fewer samples than the task needs");
    return ds;
  }
  throw ConfigError("unknown system kind '" + sys.kind + "'");
}

TrialData build_trial(const ResolvedConfig& cfg, int trial, Index extra_steps) {
  const std::uint64_t seed =
      cfg.system.seed + static_cast<std::uint64_t>(trial);
  TrialData td;
  td.clean = simulate_clean(cfg.system, seed, extra_steps);
  const Index n = cfg.system.n > 0 ? cfg.system.n : td.clean.points.rows();

  TrajectoryDataset train = td.clean;
  train.points = td.clean.points.topRows(n);
  td.noisy = cfg.system.noise_sigma > 0.0
                 ? add_observation_noise(train, cfg.system.noise_sigma, seed)
                 : train;

  if (!cfg.has_features) return td;
  td.embedded = delay_embed(td.noisy.points, cfg.features.window);
  if (cfg.features.kernel) {
    if (td.embedded.rows() > 6000)
      throw std::runtime_error(
          "dual (kernel) mode is limited to 6000 samples; use dictionary features for "
          "longer trajectories");
    KernelSpec ks;
    ks.kind = KernelSpec::Kind::gaussian;
    ks.lengthscale = cfg.features.lengthscale;
    td.data = gram(ks, td.embedded);
  } else {
    td.data = evaluate_dictionary(cfg.features.dict, td.embedded);
  }
  return td;
}

SpectralDecomposition fit_trial(const ResolvedConfig& cfg, const TrialData& td,
                                const ToeplitzSymbol& sym) {
  EstimatorConfig ec;
  ec.mode = cfg.estimator.mode;
  ec.symbol = sym;
  ec.gamma = cfg.estimator.gamma;
  ec.rank = cfg.estimator.rank;
  ec.path = cfg.estimator.path;
  return cfg.estimator.mode == FitMode::primal ? fit_primal(td.data, ec) : fit_dual(td.data, ec);
}

// Coordinate observable: primal as a unit coefficient on the current-time
// linear feature, dual as the coordinate's sample values.
Observable coordinate_observable(const ResolvedConfig& cfg, const TrialData& td, int coord) {
  const int w = cfg.features.window;
  if (!cfg.features.kernel) {
    const int idx = cfg.features.dict.linear_feature_index(w - 1, coord);
    VectorXcd c = VectorXcd::Zero(td.data.rows());
    c[idx] = cplx(1.0, 0.0);
    return Observable::from_coefficients(std::move(c));
  }
  const Index q = td.embedded.rows();
  VectorXcd v(q);
  for (Index i = 0; i < q; ++i) v[i] = td.noisy.points(i + w - 1, coord);
  return Observable::from_values(std::move(v));
}

int parse_observable_coordinate(const json& task, int base_dim) {
  const json obs = task.value("observable", json("position"));
  if (obs.is_string()) {
    const std::string s = obs.get<std::string>();
    if (s == "position") return 0;
    if (s == "velocity") {
      if (base_dim < 2) throw ConfigError("velocity observable needs a 2D state");
      return 1;
    }
    throw ConfigError("observable must be position|velocity|{\"coordinate\": k}");
  }
  if (obs.is_object() && obs.contains("coordinate")) {
    const int k = obs["coordinate"].get<int>();
    if (k < 0 || k >= base_dim) throw ConfigError("observable coordinate out of range");
    return k;
  }
  throw ConfigError("observable must be position|velocity|{\"coordinate\": k}");
}

// Probe (feature embedding) for a single embedded window.
VectorXcd probe_for_window(const ResolvedConfig& cfg, const TrialData& td,
                           const Eigen::RowVectorXd& window_row) {
  if (!cfg.features.kernel) {
    const MatrixXd z = evaluate_dictionary(cfg.features.dict, window_row);
    return z.col(0).cast<cplx>();
  }
  KernelSpec ks;
  ks.kind = KernelSpec::Kind::gaussian;
  ks.lengthscale = cfg.features.lengthscale;
  const MatrixXd kx = gram(ks, td.embedded, window_row);  // q x 1
  return kx.col(0).cast<cplx>();
}

double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = p / 100.0 * (static_cast<double>(v.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = static_cast<size_t>(std::ceil(pos));
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

json stats_json(const std::vector<double>& values) {
  json out;
  out["values"] = values;
  if (!values.empty()) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    out["mean"] = mean;
    out["p2_5"] = percentile(values, 2.5);
    out["p97_5"] = percentile(values, 97.5);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Task runners. Each returns per-trial artifact paths and a per-trial scalar
// summary (when meaningful) collected into the manifest.

struct TrialOutput {
  std::vector<std::string> artifacts;
  json summary;
};

fs::path trial_dir(const ResolvedConfig& cfg, int trial) {
  if (cfg.trials == 1) return cfg.output;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "trial_%03d", trial);
  return cfg.output / buf;
}

std::string relative_to_output(const ResolvedConfig& cfg, const fs::path& p) {
  return fs::relative(p, cfg.output).string();
}

TrialOutput run_simulate_trial(const ResolvedConfig& cfg, int trial) {
  const TrialData td = build_trial(cfg, trial, 0);
  const fs::path dir = trial_dir(cfg, trial);
  TrialOutput out;
  save_trajectory(dir / "trajectory.csv", td.noisy);
  out.artifacts.push_back(relative_to_output(cfg, dir / "trajectory.csv"));
  if (cfg.system.noise_sigma > 0.0) {
    save_trajectory(dir / "trajectory_clean.csv", td.clean);
    out.artifacts.push_back(relative_to_output(cfg, dir / "trajectory_clean.csv"));
  }
  return out;
}

TrialOutput run_fit_trial(const ResolvedConfig& cfg, int trial) {
  const TrialData td = build_trial(cfg, trial, 0);
  const ToeplitzSymbol sym = symbol_from_config(cfg.estimator.symbol, cfg.system.dt);
  const SpectralDecomposition dec = fit_trial(cfg, td, sym);
  const fs::path dir = trial_dir(cfg, trial);
  TrialOutput out;
  atomic_write(dir / "decomposition.json", decomposition_to_json(dec).dump(2) + "\n");
  out.artifacts.push_back(relative_to_output(cfg, dir / "decomposition.json"));
  out.summary["effective_rank"] = dec.effective_rank;
  return out;
}

TrialOutput run_spectrum_trial(const ResolvedConfig& cfg, int trial) {
  const TrialData td = build_trial(cfg, trial, 0);
  const ToeplitzSymbol sym = symbol_from_config(cfg.estimator.symbol, cfg.system.dt);
  const SpectralDecomposition dec = fit_trial(cfg, td, sym);
  const fs::path dir = trial_dir(cfg, trial);
  TrialOutput out;
  save_spectrum_csv(dir / "spectrum.csv", dec.eigenvalues, dec.singular_values);
  out.artifacts.push_back(relative_to_output(cfg, dir / "spectrum.csv"));

  std::vector<std::vector<double>> mapped;
  int unmappable = 0;
  double smallest_pos_freq = std::numeric_limits<double>::quiet_NaN();
  for (Index i = 0; i < dec.eigenvalues.size(); ++i) {
    if (!dec.usable[static_cast<size_t>(i)]) continue;
    const auto lam = cfg.estimator.branch
                         ? inverse_spectral_map(sym, dec.eigenvalues[i], *cfg.estimator.branch)
                         : inverse_spectral_map(sym, dec.eigenvalues[i]);
    if (!lam) {
      ++unmappable;
      continue;
    }
    mapped.push_back({lam->real(), lam->imag()});
    const double freq = lam->imag() / (2.0 * M_PI);
    if (freq > 1e-9 && (std::isnan(smallest_pos_freq) || freq < smallest_pos_freq))
      smallest_pos_freq = freq;
  }
  save_csv(dir / "generator_spectrum.csv", {"lambda_re", "lambda_im"}, mapped);
  out.artifacts.push_back(relative_to_output(cfg, dir / "generator_spectrum.csv"));
  out.summary["unmappable"] = unmappable;
  out.summary["effective_rank"] = dec.effective_rank;
  if (!std::isnan(smallest_pos_freq)) out.summary["smallest_positive_frequency"] = smallest_pos_freq;
  return out;
}

TrialOutput run_forecast_trial(const ResolvedConfig& cfg, int trial) {
  const double horizon = cfg.task["horizon"].get<double>();
  const Index steps = static_cast<Index>(std::llround(horizon / cfg.system.dt));
  if (steps < 1) throw ConfigError("forecast horizon shorter than one step");
  const TrialData td = build_trial(cfg, trial, steps);
  const ToeplitzSymbol sym = symbol_from_config(cfg.estimator.symbol, cfg.system.dt);
  const SpectralDecomposition dec = fit_trial(cfg, td, sym);

  const Index n = cfg.system.n;
  const int w = cfg.features.window;
  const int d = static_cast<int>(td.clean.points.cols());

  // Initial condition: the clean embedded window whose current time is the
  // last training sample.
  Eigen::RowVectorXd window_row(w * d);
  for (int lag = 0; lag < w; ++lag)
    window_row.segment(lag * d, d) = td.clean.points.row(n - w + lag);
  const VectorXcd probe = probe_for_window(cfg, td, window_row);

  VectorXd times(steps + 1);
  for (Index k = 0; k <= steps; ++k) times[k] = static_cast<double>(k) * cfg.system.dt;

  MatrixXd pred(steps + 1, d), truth(steps + 1, d);
  int dropped_total = 0;
  for (int j = 0; j < d; ++j) {
    const Observable h = coordinate_observable(cfg, td, j);
    // The fitted operator acts on centered fluctuations; restore the
    // training mean of the observable.
    double mean = 0.0;
    if (!cfg.features.kernel) {
      for (Index i = 0; i < td.embedded.rows(); ++i) mean += td.noisy.points(i + w - 1, j);
      mean /= static_cast<double>(td.embedded.rows());
    } else {
      mean = h.vec.real().mean();
    }
    int dropped = 0;
    const VectorXcd series =
        predict_series(dec, h, probe, times, cfg.estimator.branch, &dropped);
    dropped_total += dropped;
    for (Index k = 0; k <= steps; ++k) {
      pred(k, j) = series[k].real() + mean;
      truth(k, j) = td.clean.points(n - 1 + k, j);
    }
  }

  const fs::path dir = trial_dir(cfg, trial);
  TrialOutput out;
  save_forecast_csv(dir / "forecast.csv", times, pred, truth);
  out.artifacts.push_back(relative_to_output(cfg, dir / "forecast.csv"));
  const double rmse = std::sqrt((pred - truth).squaredNorm() /
                                static_cast<double>(pred.rows() * pred.cols()));
  out.summary["rmse"] = rmse;
  out.summary["dropped_modes"] = dropped_total;
  return out;
}

VectorXd theta_grid_from_config(const json& t) {
  const double lo = t.value("min", 0.0);
  const double hi = t.at("max").get<double>();
  if (t.contains("step")) {
    const double step = t["step"].get<double>();
    if (!(step > 0.0)) throw ConfigError("theta.step must be positive");
    const Index count = static_cast<Index>(std::floor((hi - lo) / step + 1e-12)) + 1;
    VectorXd g(count);
    for (Index i = 0; i < count; ++i) g[i] = lo + static_cast<double>(i) * step;
    return g;
  }
  const Index count = t.value("count", 64);
  if (count < 2) throw ConfigError("theta.count must be >= 2");
  VectorXd g(count);
  for (Index i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

TrialOutput run_response_trial(const ResolvedConfig& cfg, int trial, int inner_jobs) {
  const TrialData td = build_trial(cfg, trial, 0);
  const double mu = cfg.task["mu"].get<double>();
  const int ell = cfg.task["ell"].get<int>();
  const std::string family = cfg.task.value("family", std::string("generator"));
  const VectorXd grid = theta_grid_from_config(cfg.task["theta"]);
  const int coord =
      parse_observable_coordinate(cfg.task, static_cast<int>(td.clean.points.cols()));

  EstimatorConfig tmpl;
  tmpl.mode = cfg.estimator.mode;
  tmpl.gamma = cfg.estimator.gamma;
  tmpl.rank = cfg.estimator.rank;
  tmpl.path = cfg.estimator.path;
  if (family == "generator")
    tmpl.symbol = generator_resolvent_symbol(cplx(mu, 0.0), cfg.system.dt, ell);
  else if (family == "transfer")
    tmpl.symbol = transfer_resolvent_symbol(cplx(mu * cfg.system.dt, 0.0), ell)
                      .with_dt(cfg.system.dt);
  else
    throw ConfigError("response family must be generator|transfer");

  const Observable f = coordinate_observable(cfg, td, coord);
  ResponseCurve curve;
  if (cfg.estimator.mode == FitMode::primal) {
    const PrimalFactor factor(td.data, cfg.estimator.gamma);
    curve = resolvent_response(factor, tmpl, f, mu, grid, inner_jobs);
  } else {
    const DualFactor factor(td.data, cfg.estimator.gamma);
    curve = resolvent_response(factor, tmpl, f, mu, grid, inner_jobs);
  }
  curve.observable = cfg.task.value("observable", json("position")).dump();

  const fs::path dir = trial_dir(cfg, trial);
  TrialOutput out;
  save_response_csv(dir / "response.csv", curve);
  out.artifacts.push_back(relative_to_output(cfg, dir / "response.csv"));
  json values = json::array();
  for (Index i = 0; i < curve.values.size(); ++i) values.push_back(curve.values[i]);
  out.summary["curve"] = std::move(values);
  return out;
}

TrialOutput run_kreiss_trial(const ResolvedConfig& cfg, int trial, int inner_jobs) {
  const TrialData td = build_trial(cfg, trial, 0);
  const int ell = cfg.task["ell"].get<int>();
  std::vector<cplx> grid;
  if (cfg.task.contains("grid")) {
    for (const auto& g : cfg.task["grid"])
      grid.emplace_back(g.at(0).get<double>(), g.at(1).get<double>());
  } else {
    const double lo = cfg.task["re_min"].get<double>();
    const double hi = cfg.task["re_max"].get<double>();
    const int count = cfg.task.value("count", 20);
    const double im = cfg.task.value("im", 0.0);
    if (count < 1) throw ConfigError("kreiss count must be >= 1");
    for (int i = 0; i < count; ++i)
      grid.emplace_back(lo + (hi - lo) * (count == 1 ? 0.0
                                                     : static_cast<double>(i) /
                                                           static_cast<double>(count - 1)),
                        im);
  }
  const double est = kreiss_estimate(td.data, cfg.estimator.mode, cfg.estimator.gamma, ell,
                                     grid, cfg.estimator.path, inner_jobs);
  const fs::path dir = trial_dir(cfg, trial);
  TrialOutput out;
  json payload{{"estimate", est}, {"ell", ell}, {"grid_size", grid.size()}};
  atomic_write(dir / "kreiss.json", payload.dump(2) + "\n");
  out.artifacts.push_back(relative_to_output(cfg, dir / "kreiss.json"));
  out.summary["estimate"] = est;
  return out;
}

TrialOutput run_bench(const ResolvedConfig& cfg, int jobs) {
  (void)jobs;
  std::vector<Index> n_list, ell_list;
  for (const auto& v : cfg.task["n_list"]) n_list.push_back(v.get<Index>());
  for (const auto& v : cfg.task["ell_list"]) ell_list.push_back(v.get<Index>());
  const int rows = cfg.task.value("rows", 8);

  std::vector<std::vector<double>> table;
  CounterRng rng(12345);
  for (const Index n : n_list) {
    MatrixXd m(rows, n);
    for (int i = 0; i < rows; ++i)
      for (Index j = 0; j < n; ++j) m(i, j) = rng.normal();
    for (const Index ell : ell_list) {
      if (ell >= n - 2) continue;
      const ToeplitzSymbol sym = transfer_resolvent_symbol(cplx(1.0, 0.0), static_cast<int>(ell));
      const BandedToeplitz t(sym, static_cast<int>(n));
      const Eigen::MatrixXcd band = apply_right(m, t, ApplyPath::band);
      const Eigen::MatrixXcd fft = apply_right(m, t, ApplyPath::fft);
      const double rel = (band - fft).norm() / std::max(band.norm(), 1e-300);
      if (rel > 1e-10)
        throw std::runtime_error("band and FFT products disagree before timing");
      for (const char* path : {"band", "fft"}) {
        const ApplyPath ap = path[0] == 'b' ? ApplyPath::band : ApplyPath::fft;
        const double t0 = now_seconds();
        volatile double sink = apply_right(m, t, ap).norm();
        (void)sink;
        const double t1 = now_seconds();
        table.push_back({static_cast<double>(n), static_cast<double>(ell),
                         path[0] == 'b' ? 0.0 : 1.0, t1 - t0});
      }
    }
  }
  // The path column is textual in the artifact; rebuild rows as strings.
  std::ostringstream os;
  os << "n,ell,path,seconds\n";
  for (const auto& row : table) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", row[3]);
    os << static_cast<long long>(row[0]) << ',' << static_cast<long long>(row[1]) << ','
       << (row[2] == 0.0 ? "band" : "fft") << ',' << buf << '\n';
  }
  atomic_write(cfg.output / "bench.csv", os.str());

  // End-to-end fit timing on synthetic features, reported not asserted.
  const Index n_fit = *std::max_element(n_list.begin(), n_list.end());
  MatrixXd z(20, n_fit);
  for (Index i = 0; i < z.rows(); ++i)
    for (Index j = 0; j < n_fit; ++j) z(i, j) = rng.normal();
  EstimatorConfig ec;
  ec.mode = FitMode::primal;
  ec.symbol = builtin_symbol(SymbolKind::cosh).with_dt(1.0);
  ec.gamma = 1e-6;
  ec.rank = 5;
  const double f0 = now_seconds();
  const SpectralDecomposition dec = fit_primal(z, ec);
  const double f1 = now_seconds();
  std::cout << "fit_primal end-to-end: n=" << n_fit << " m=20 rank=" << dec.effective_rank
            << " seconds=" << (f1 - f0) << "\n";

  TrialOutput out;
  out.artifacts.push_back("bench.csv");
  out.summary["fit_seconds"] = f1 - f0;
  out.summary["fit_n"] = n_fit;
  return out;
}

// ---------------------------------------------------------------------------

json summarize_trials(const ResolvedConfig& cfg, const std::vector<TrialOutput>& outs) {
  json summary;
  const auto collect = [&](const char* key) {
    std::vector<double> vals;
    for (const auto& o : outs)
      if (o.summary.contains(key)) vals.push_back(o.summary[key].get<double>());
    return vals;
  };

  if (cfg.task_kind == "forecast") summary["rmse"] = stats_json(collect("rmse"));
  if (cfg.task_kind == "kreiss") summary["estimate"] = stats_json(collect("estimate"));
  if (cfg.task_kind == "spectrum") {
    summary["smallest_positive_frequency"] =
        stats_json(collect("smallest_positive_frequency"));
  }
  if (cfg.task_kind == "response" && !outs.empty() && outs[0].summary.contains("curve")) {
    // Pointwise mean and 2.5/97.5 percentile band over trials.
    const size_t len = outs[0].summary["curve"].size();
    std::vector<double> mean(len), lo(len), hi(len);
    for (size_t k = 0; k < len; ++k) {
      std::vector<double> col;
      for (const auto& o : outs) col.push_back(o.summary["curve"].at(k).get<double>());
      double m = 0.0;
      for (double v : col) m += v;
      mean[k] = m / static_cast<double>(col.size());
      lo[k] = percentile(col, 2.5);
      hi[k] = percentile(col, 97.5);
    }
    summary["curve_mean"] = mean;
    summary["curve_p2_5"] = lo;
    summary["curve_p97_5"] = hi;
  }
  return summary;
}

void write_response_summary_csv(const ResolvedConfig& cfg, const json& summary) {
  if (!summary.contains("curve_mean")) return;
  const VectorXd grid = theta_grid_from_config(cfg.task["theta"]);
  std::vector<std::vector<double>> rows;
  const auto& mean = summary["curve_mean"];
  const auto& lo = summary["curve_p2_5"];
  const auto& hi = summary["curve_p97_5"];
  for (Index i = 0; i < grid.size() && i < static_cast<Index>(mean.size()); ++i)
    rows.push_back({grid[i], mean.at(i).get<double>(), lo.at(i).get<double>(),
                    hi.at(i).get<double>()});
  save_csv(cfg.output / "response_summary.csv", {"theta", "mean", "p2_5", "p97_5"}, rows);
}

}  // namespace

int run_experiment(const fs::path& config_path, const RunOptions& opts) {
  json raw;
  ResolvedConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file " + config_path.string());
    raw = json::parse(in);
    cfg = parse_config(raw, opts);
    if (opts.seed_override) {
      cfg.system.seed = *opts.seed_override;
      if (cfg.raw.contains("system")) cfg.raw["system"]["seed"] = *opts.seed_override;
    }
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const std::uint64_t config_hash = fnv1a_hash(cfg.raw.dump());
  if (opts.dry_run) {
    json plan{{"task", cfg.task_kind},
              {"trials", cfg.trials},
              {"output", cfg.output.string()},
              {"seed", cfg.system.seed},
              {"config_hash", config_hash},
              {"config", cfg.raw}};
    std::cout << plan.dump(2) << "\n";
    return 0;
  }

  json manifest{{"version", "0.1.0"},
                {"config_hash", config_hash},
                {"config_path", config_path.string()},
                {"task", cfg.task_kind},
                {"trials", cfg.trials},
                {"seed", cfg.system.seed},
                {"status", "ok"}};
  const double t_start = now_seconds();
  int exit_code = 0;
  std::vector<TrialOutput> outs(static_cast<size_t>(cfg.trials));
  try {
    if (cfg.task_kind == "bench") {
      outs.resize(1);
      outs[0] = run_bench(cfg, opts.jobs);
    } else {
      const int inner_jobs = cfg.trials > 1 ? 1 : opts.jobs;
      parallel_for(static_cast<size_t>(cfg.trials), opts.jobs, [&](size_t trial) {
        const int t = static_cast<int>(trial);
        if (cfg.task_kind == "simulate")
          outs[trial] = run_simulate_trial(cfg, t);
        else if (cfg.task_kind == "fit")
          outs[trial] = run_fit_trial(cfg, t);
        else if (cfg.task_kind == "spectrum")
          outs[trial] = run_spectrum_trial(cfg, t);
        else if (cfg.task_kind == "forecast")
          outs[trial] = run_forecast_trial(cfg, t);
        else if (cfg.task_kind == "response")
          outs[trial] = run_response_trial(cfg, t, inner_jobs);
        else if (cfg.task_kind == "kreiss")
          outs[trial] = run_kreiss_trial(cfg, t, inner_jobs);
      });
    }
    const json summary = summarize_trials(cfg, outs);
    if (!summary.empty()) {
      atomic_write(cfg.output / "summary.json", summary.dump(2) + "\n");
      if (cfg.task_kind == "response") write_response_summary_csv(cfg, summary);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    manifest["status"] = "error";
    manifest["error"] = e.what();
    exit_code = 2;
  } catch (const std::exception& e) {
    std::cerr << "task failed: " << e.what() << "\n";
    manifest["status"] = "error";
    manifest["error"] = e.what();
    exit_code = 3;
  }

  json artifacts = json::array();
  for (int t = 0; t < static_cast<int>(outs.size()); ++t) {
    for (const auto& a : outs[static_cast<size_t>(t)].artifacts) artifacts.push_back(a);
    if (!outs[static_cast<size_t>(t)].summary.empty())
      manifest["trial_summaries"][std::to_string(t)] = outs[static_cast<size_t>(t)].summary;
  }
  manifest["artifacts"] = std::move(artifacts);
  manifest["wall_seconds"] = now_seconds() - t_start;
  try {
    atomic_write(cfg.output / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    std::cerr << "manifest write failed: " << e.what() << "\n";
    if (exit_code == 0) exit_code = 3;
  }
  return exit_code;
}

}  // namespace tspec

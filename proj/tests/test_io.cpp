// Serialization and batch-runner tests: atomic writes, round-trip-exact CSV,
// symbol/decomposition JSON, trajectory sidecars, and end-to-end experiment
// runs exercising the manifest and exit-code contract.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <Eigen/Dense>

#include <unistd.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "tspec/dynamics.hpp"
#include "tspec/estimators.hpp"
#include "tspec/experiment.hpp"
#include "tspec/io.hpp"
#include "tspec/rng.hpp"
#include "tspec/symbols.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tspec;

namespace {

fs::path scratch_root() {
  static const fs::path root =
      fs::temp_directory_path() / ("tspec_io_" + std::to_string(::getpid()));
  return root;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = scratch_root() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << p.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) out.push_back(line);
  return out;
}

std::vector<double> parse_csv_row(const std::string& line) {
  std::vector<double> out;
  std::istringstream is(line);
  std::string cell;
  while (std::getline(is, cell, ',')) out.push_back(std::strtod(cell.c_str(), nullptr));
  return out;
}

fs::path write_config(const fs::path& dir, const json& cfg, const std::string& name = "config.json") {
  const fs::path p = dir / name;
  atomic_write(p, cfg.dump(2) + "\n");
  return p;
}

json matrix1x1(double v) { return json::array({json::array({v})}); }

// Minimal single-trial scalar OU simulation config writing into `outdir`.
json ou_simulate_config(const fs::path& outdir) {
  json cfg;
  cfg["task"] = json{{"kind", "simulate"}};
  cfg["output"] = outdir.string();
  cfg["system"] = json{{"kind", "ou"},
                       {"dt", 0.1},
                       {"n", 50},
                       {"seed", 3},
                       {"params", json{{"A", matrix1x1(-1.0)},
                                       {"B", matrix1x1(1.0)},
                                       {"substeps", 2}}}};
  return cfg;
}

RunOptions serial_opts() {
  RunOptions opts;
  opts.jobs = 1;
  return opts;
}

std::vector<std::string> artifact_list(const json& manifest) {
  std::vector<std::string> out;
  for (const auto& a : manifest.at("artifacts")) out.push_back(a.get<std::string>());
  return out;
}

ToeplitzSymbol json_round_trip(const ToeplitzSymbol& s) {
  const json reparsed = json::parse(symbol_to_json(s).dump());
  return symbol_from_json(reparsed);
}

void check_symbol_round_trip(const ToeplitzSymbol& s) {
  const ToeplitzSymbol r = json_round_trip(s);
  CHECK(r.kind() == s.kind());
  CHECK(r.bandwidth() == s.bandwidth());
  CHECK(r.symmetry() == s.symmetry());
  for (int j = -s.bandwidth(); j <= s.bandwidth(); ++j) {
    CHECK(r.coeff(j).real() == s.coeff(j).real());
    CHECK(r.coeff(j).imag() == s.coeff(j).imag());
  }
  CHECK(r.params().mu.has_value() == s.params().mu.has_value());
  if (s.params().mu) CHECK(*r.params().mu == *s.params().mu);
  CHECK(r.params().dt.has_value() == s.params().dt.has_value());
  if (s.params().dt) CHECK(*r.params().dt == *s.params().dt);
  CHECK(r.params().omega_min.has_value() == s.params().omega_min.has_value());
  if (s.params().omega_min) CHECK(*r.params().omega_min == *s.params().omega_min);
  CHECK(r.params().omega_max.has_value() == s.params().omega_max.has_value());
  if (s.params().omega_max) CHECK(*r.params().omega_max == *s.params().omega_max);
  CHECK(r.params().jackson == s.params().jackson);
}

}  // namespace

TEST_CASE("atomic_write creates parents, replaces content, and leaves no temp files") {
  const fs::path dir = fresh_dir("atomic");
  const fs::path target = dir / "a" / "b" / "out.txt";

  atomic_write(target, "first\ncontents\n");
  CHECK(read_file(target) == "first\ncontents\n");

  atomic_write(target, "second");
  CHECK(read_file(target) == "second");

  // Only the final file remains: no .tmp- residue from either write.
  int entries = 0;
  for (const auto& e : fs::directory_iterator(target.parent_path())) {
    ++entries;
    CHECK(e.path().filename() == "out.txt");
  }
  CHECK(entries == 1);
}

TEST_CASE("csv text round-trips doubles exactly") {
  const std::vector<std::string> header{"a", "b"};
  const std::vector<std::vector<double>> rows{{1.0 / 3.0, 1e-17},
                                             {-2.5, 6.02214076e23},
                                             {0.1, -0.0}};
  const std::string text = to_csv(header, rows);
  const auto lines = lines_of(text);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "a,b");
  // 17 significant digits are enough to reproduce every double bit-exactly.
  CHECK(text.find("0.33333333333333331") != std::string::npos);
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto parsed = parse_csv_row(lines[i + 1]);
    REQUIRE(parsed.size() == rows[i].size());
    for (size_t j = 0; j < parsed.size(); ++j) CHECK(parsed[j] == rows[i][j]);
  }

  CHECK_THROWS(to_csv(header, {{1.0, 2.0}, {3.0}}));

  const fs::path dir = fresh_dir("csv");
  save_csv(dir / "t.csv", header, rows);
  CHECK(read_file(dir / "t.csv") == text);

  Eigen::MatrixXd m(2, 3);
  m << 1, 2, 3, 4, 5, 6;
  CHECK_THROWS(save_matrix_csv(dir / "m.csv", {"x", "y"}, m));
  save_matrix_csv(dir / "m.csv", {"x", "y", "z"}, m);
  CHECK(lines_of(read_file(dir / "m.csv")).size() == 3);
}

TEST_CASE("trajectory files round-trip samples and metadata") {
  const fs::path dir = fresh_dir("traj");
  TrajectoryDataset ds;
  CounterRng rng(7);
  ds.points = Eigen::MatrixXd::NullaryExpr(7, 2, [&](Eigen::Index, Eigen::Index) {
    return rng.normal();
  });
  ds.dt = 0.25;
  ds.system = "ou";
  ds.seed = 42;
  ds.noise_sigma = 0.5;
  ds.burn_in = 1.5;

  const fs::path csv = dir / "traj.csv";
  save_trajectory(csv, ds);

  const auto lines = lines_of(read_file(csv));
  REQUIRE(lines.size() == 8);
  CHECK(lines[0] == "t,x1,x2");
  CHECK(parse_csv_row(lines[4])[0] == 3 * 0.25);  // time column is i*dt

  const TrajectoryDataset back = load_trajectory(csv);
  CHECK(back.points.rows() == 7);
  CHECK(back.points.cols() == 2);
  CHECK((back.points - ds.points).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.dt == 0.25);
  CHECK(back.system == "ou");
  CHECK(back.seed == 42);
  CHECK(back.noise_sigma == 0.5);
  CHECK(back.burn_in == 1.5);

  // Without the sidecar the spacing is inferred from the time column and the
  // provenance fields fall back to defaults.
  REQUIRE(fs::exists(dir / "traj.csv.meta.json"));
  fs::remove(dir / "traj.csv.meta.json");
  const TrajectoryDataset bare = load_trajectory(csv);
  CHECK(bare.dt == 0.25);
  CHECK(bare.system.empty());
  CHECK(bare.seed == 0);
  CHECK((bare.points - ds.points).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS(load_trajectory(dir / "nope.csv"));
  atomic_write(dir / "one.csv", "t,x1\n0,1\n");
  CHECK_THROWS(load_trajectory(dir / "one.csv"));
  atomic_write(dir / "narrow.csv", "t\n0\n0.25\n");
  CHECK_THROWS(load_trajectory(dir / "narrow.csv"));
  atomic_write(dir / "empty.csv", "");
  CHECK_THROWS(load_trajectory(dir / "empty.csv"));
}

TEST_CASE("symbol json round-trips every kind") {
  check_symbol_round_trip(builtin_symbol(SymbolKind::identity));
  check_symbol_round_trip(builtin_symbol(SymbolKind::cosh));
  check_symbol_round_trip(builtin_symbol(SymbolKind::sinh));
  check_symbol_round_trip(builtin_symbol(SymbolKind::identity).with_dt(0.125));
  check_symbol_round_trip(transfer_resolvent_symbol(cplx(0.7, -0.3), 4));
  check_symbol_round_trip(generator_resolvent_symbol(cplx(1.1, 0.4), 0.05, 6));
  check_symbol_round_trip(symmetrize(generator_resolvent_symbol(cplx(0.9, 0.0), 0.1, 5)));
  check_symbol_round_trip(bandpass_inverse_symbol(0.4, 2.1, 7, true));
  check_symbol_round_trip(bandpass_inverse_symbol(0.4, 2.1, 7, false));
  check_symbol_round_trip(trig_symbol(std::vector<cplx>{cplx(0.3, 0.1), cplx(-0.2, 0.4)},
                                      std::vector<cplx>{cplx(0.05, -0.15)}));
  check_symbol_round_trip(trig_symbol(std::vector<double>{0.25, 1.5, -0.5}, {2.0, 0.75}));
  check_symbol_round_trip(chebyshev_symbol({0.5, 0.0, 0.25}, {0.125}));
  check_symbol_round_trip(
      ToeplitzSymbol(SymbolKind::custom, {cplx(0.25, -1.0), cplx(2.0, 0.0), cplx(0.0, 3.0)}));

  json j = symbol_to_json(builtin_symbol(SymbolKind::identity));
  j["kind"] = "frobnicate";
  CHECK_THROWS(symbol_from_json(j));
}

TEST_CASE("decomposition json records spectra, coefficients, and shapes") {
  CounterRng rng(17);
  Eigen::MatrixXd z = Eigen::MatrixXd::NullaryExpr(
      3, 60, [&](Eigen::Index, Eigen::Index) { return rng.normal(); });
  EstimatorConfig cfg;
  cfg.mode = FitMode::primal;
  cfg.symbol = builtin_symbol(SymbolKind::cosh);
  cfg.gamma = 1e-4;
  cfg.rank = 2;
  const SpectralDecomposition dec = fit_primal(z, cfg);

  const json j = json::parse(decomposition_to_json(dec).dump());
  CHECK(j.at("mode").get<std::string>() == "primal");
  CHECK(j.at("n").get<int>() == 60);
  CHECK(j.at("m").get<int>() == 3);
  CHECK(j.at("gamma").get<double>() == 1e-4);
  CHECK(j.at("rank").get<int>() == 2);
  CHECK(j.at("effective_rank").get<int>() == dec.effective_rank);
  CHECK(j.at("eigenvalues").size() == static_cast<size_t>(dec.eigenvalues.size()));
  CHECK(j.at("singular_values").size() == static_cast<size_t>(dec.singular_values.size()));
  CHECK(j.at("usable").size() == dec.usable.size());
  CHECK(j.at("left_coeffs").at("rows").get<int>() == 3);
  CHECK(j.at("right_coeffs").at("rows").get<int>() == 3);
  CHECK(j.at("right_coeffs").at("cols").get<int>() ==
        static_cast<int>(dec.eigenvalues.size()));
  for (size_t i = 0; i < j.at("eigenvalues").size(); ++i) {
    const auto& e = j.at("eigenvalues").at(i);
    CHECK(e.at(0).get<double>() == dec.eigenvalues[static_cast<Eigen::Index>(i)].real());
    CHECK(e.at(1).get<double>() == dec.eigenvalues[static_cast<Eigen::Index>(i)].imag());
  }
  CHECK(symbol_from_json(j.at("symbol")).kind() == SymbolKind::cosh);
}

TEST_CASE("spectrum, response, and forecast writers emit well-formed tables") {
  const fs::path dir = fresh_dir("writers");

  Eigen::VectorXcd eig(3);
  eig << cplx(0.9, 0.1), cplx(0.5, -0.5), cplx(0.25, 0.0);
  Eigen::VectorXd sv(2);
  sv << 2.0, 1.0;
  save_spectrum_csv(dir / "spec.csv", eig, sv);
  auto lines = lines_of(read_file(dir / "spec.csv"));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "re,im,sigma");
  CHECK(parse_csv_row(lines[1]) == std::vector<double>{0.9, 0.1, 2.0});
  // The sigma column pads with zero when there are fewer energies than modes.
  CHECK(parse_csv_row(lines[3]) == std::vector<double>{0.25, 0.0, 0.0});

  ResponseCurve curve;
  curve.theta = Eigen::VectorXd::LinSpaced(3, 0.0, 0.2);
  curve.values = Eigen::VectorXd::Constant(3, 1.5);
  curve.sigma = Eigen::VectorXd::Constant(3, 0.75);
  save_response_csv(dir / "resp.csv", curve);
  lines = lines_of(read_file(dir / "resp.csv"));
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "theta,value,sigma");
  CHECK(parse_csv_row(lines[2])[0] == 0.1);

  Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(4, 0.0, 3.0);
  Eigen::MatrixXd pred(4, 2);
  pred << 1, 2, 3, 4, 5, 6, 7, 8;
  save_forecast_csv(dir / "fc.csv", times, pred, pred * 2.0);
  lines = lines_of(read_file(dir / "fc.csv"));
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "t,pred_1,pred_2,true_1,true_2");
  CHECK(parse_csv_row(lines[1]) == std::vector<double>{0.0, 1.0, 2.0, 2.0, 4.0});

  save_forecast_csv(dir / "fc2.csv", times, pred, std::nullopt);
  CHECK(lines_of(read_file(dir / "fc2.csv"))[0] == "t,pred_1,pred_2");

  CHECK_THROWS(save_forecast_csv(dir / "bad.csv", times, pred,
                                 Eigen::MatrixXd::Zero(3, 2)));
  CHECK_THROWS(save_forecast_csv(dir / "bad2.csv", times.head(3), pred, std::nullopt));
}

TEST_CASE("fnv1a hash is deterministic and input-sensitive") {
  CHECK(fnv1a_hash("") == 14695981039346656037ull);
  CHECK(fnv1a_hash("a") == 12638187200555641996ull);
  CHECK(fnv1a_hash("config") == fnv1a_hash("config"));
  CHECK(fnv1a_hash("ab") != fnv1a_hash("ba"));
  CHECK(fnv1a_hash("x") != fnv1a_hash("x "));
}

TEST_CASE("experiment dry run reports a plan and writes nothing") {
  const fs::path dir = fresh_dir("dry");
  const fs::path outdir = dir / "out";
  const fs::path cfg = write_config(dir, ou_simulate_config(outdir));

  RunOptions opts = serial_opts();
  opts.dry_run = true;
  CHECK(run_experiment(cfg, opts) == 0);
  CHECK(!fs::exists(outdir));
}

TEST_CASE("experiment simulate run writes trajectory plus manifest and reproduces bytes") {
  const fs::path dir = fresh_dir("sim");
  const fs::path out1 = dir / "out1";
  json cfg = ou_simulate_config(out1);
  cfg["system"]["noise_sigma"] = 0.4;
  const fs::path cfg_path = write_config(dir, cfg);

  REQUIRE(run_experiment(cfg_path, serial_opts()) == 0);
  CHECK(fs::exists(out1 / "trajectory.csv"));
  CHECK(fs::exists(out1 / "trajectory_clean.csv"));

  const json manifest = json::parse(read_file(out1 / "manifest.json"));
  CHECK(manifest.at("version").get<std::string>() == "0.1.0");
  CHECK(manifest.at("status").get<std::string>() == "ok");
  CHECK(manifest.at("task").get<std::string>() == "simulate");
  CHECK(manifest.at("trials").get<int>() == 1);
  CHECK(manifest.at("seed").get<std::uint64_t>() == 3);
  CHECK(manifest.at("wall_seconds").get<double>() >= 0.0);
  const json raw = json::parse(read_file(cfg_path));
  CHECK(manifest.at("config_hash").get<std::uint64_t>() == fnv1a_hash(raw.dump()));
  const auto artifacts = artifact_list(manifest);
  CHECK(std::count(artifacts.begin(), artifacts.end(), "trajectory.csv") == 1);
  CHECK(std::count(artifacts.begin(), artifacts.end(), "trajectory_clean.csv") == 1);

  // Same config, fresh output directory: byte-identical data.
  const fs::path out2 = dir / "out2";
  RunOptions redirect = serial_opts();
  redirect.output_override = out2;
  REQUIRE(run_experiment(cfg_path, redirect) == 0);
  CHECK(read_file(out2 / "trajectory.csv") == read_file(out1 / "trajectory.csv"));

  // A seed override changes both the manifest seed and the samples.
  const fs::path out3 = dir / "out3";
  RunOptions reseed = serial_opts();
  reseed.output_override = out3;
  reseed.seed_override = 11;
  REQUIRE(run_experiment(cfg_path, reseed) == 0);
  const json manifest3 = json::parse(read_file(out3 / "manifest.json"));
  CHECK(manifest3.at("seed").get<std::uint64_t>() == 11);
  CHECK(read_file(out3 / "trajectory.csv") != read_file(out1 / "trajectory.csv"));
}

TEST_CASE("experiment trials get per-trial directories and distinct seeds") {
  const fs::path dir = fresh_dir("trials");
  const fs::path outdir = dir / "out";
  json cfg = ou_simulate_config(outdir);
  cfg["trials"] = 3;
  cfg["system"]["n"] = 30;
  const fs::path cfg_path = write_config(dir, cfg);

  REQUIRE(run_experiment(cfg_path, serial_opts()) == 0);
  for (const char* sub : {"trial_000", "trial_001", "trial_002"})
    CHECK(fs::exists(outdir / sub / "trajectory.csv"));

  const json manifest = json::parse(read_file(outdir / "manifest.json"));
  const auto artifacts = artifact_list(manifest);
  CHECK(std::count(artifacts.begin(), artifacts.end(), "trial_000/trajectory.csv") == 1);
  CHECK(std::count(artifacts.begin(), artifacts.end(), "trial_002/trajectory.csv") == 1);

  // Trials perturb the base seed, so the sampled paths differ.
  CHECK(read_file(outdir / "trial_000" / "trajectory.csv") !=
        read_file(outdir / "trial_001" / "trajectory.csv"));
}

TEST_CASE("experiment config errors exit 2 without writing a manifest") {
  const fs::path dir = fresh_dir("badcfg");
  const fs::path outdir = dir / "out";

  {  // task.kind missing
    json cfg = ou_simulate_config(outdir);
    cfg.erase("task");
    CHECK(run_experiment(write_config(dir, cfg, "c1.json"), serial_opts()) == 2);
  }
  {  // unknown task kind
    json cfg = ou_simulate_config(outdir);
    cfg["task"]["kind"] = "telepathy";
    CHECK(run_experiment(write_config(dir, cfg, "c2.json"), serial_opts()) == 2);
  }
  {  // simulate needs a system block
    json cfg = ou_simulate_config(outdir);
    cfg.erase("system");
    CHECK(run_experiment(write_config(dir, cfg, "c3.json"), serial_opts()) == 2);
  }
  {  // trials must be positive
    json cfg = ou_simulate_config(outdir);
    cfg["trials"] = 0;
    CHECK(run_experiment(write_config(dir, cfg, "c4.json"), serial_opts()) == 2);
  }
  {  // unparseable file
    const fs::path p = dir / "c5.json";
    atomic_write(p, "{ this is not json");
    CHECK(run_experiment(p, serial_opts()) == 2);
  }
  CHECK(!fs::exists(outdir / "manifest.json"));

  CHECK(run_experiment(dir / "missing.json", serial_opts()) == 2);
}

TEST_CASE("experiment task failures exit 3 and record the error in the manifest") {
  const fs::path dir = fresh_dir("taskfail");
  const fs::path outdir = dir / "out";
  json cfg;
  cfg["task"] = json{{"kind", "fit"}};
  cfg["output"] = outdir.string();
  cfg["system"] = json{{"kind", "file"}, {"path", (dir / "does_not_exist.csv").string()}};
  cfg["features"] = json{{"kind", "dictionary"},
                         {"window", 1},
                         {"dictionary", json{{"base_dim", 1}, {"max_degree", 2}}}};
  cfg["estimator"] = json{{"mode", "primal"},
                          {"symbol", json{{"kind", "identity"}}},
                          {"gamma", 1e-6},
                          {"rank", 2}};
  const fs::path cfg_path = write_config(dir, cfg);

  CHECK(run_experiment(cfg_path, serial_opts()) == 3);
  const json manifest = json::parse(read_file(outdir / "manifest.json"));
  CHECK(manifest.at("status").get<std::string>() == "error");
  CHECK(!manifest.at("error").get<std::string>().empty());
}

TEST_CASE("experiment fit and spectrum tasks write their artifacts") {
  const fs::path dir = fresh_dir("fitrun");
  const fs::path outdir = dir / "out";
  json cfg;
  cfg["task"] = json{{"kind", "fit"}};
  cfg["output"] = outdir.string();
  cfg["system"] = json{{"kind", "ou"},
                       {"dt", 0.1},
                       {"n", 120},
                       {"seed", 5},
                       {"params", json{{"A", matrix1x1(-1.0)},
                                       {"B", matrix1x1(1.0)},
                                       {"substeps", 2}}}};
  cfg["features"] = json{{"kind", "dictionary"},
                         {"window", 1},
                         {"dictionary", json{{"base_dim", 1}, {"max_degree", 3}}}};
  // Identity filter: its log back-map covers every decaying mode, so the
  // spectrum task below is guaranteed a non-empty rate table.
  cfg["estimator"] = json{{"mode", "primal"},
                          {"symbol", json{{"kind", "identity"}}},
                          {"gamma", 1e-6},
                          {"rank", 2}};
  const fs::path cfg_path = write_config(dir, cfg);

  REQUIRE(run_experiment(cfg_path, serial_opts()) == 0);
  const json dec = json::parse(read_file(outdir / "decomposition.json"));
  CHECK(dec.at("mode").get<std::string>() == "primal");
  CHECK(dec.at("m").get<int>() == 3);  // x, x^2, x^3
  CHECK(dec.at("n").get<int>() == 120);
  CHECK(dec.at("rank").get<int>() == 2);
  // The runner stamps the sample spacing onto the symbol before fitting.
  CHECK(symbol_from_json(dec.at("symbol")).params().dt.has_value());
  CHECK(*symbol_from_json(dec.at("symbol")).params().dt == 0.1);

  // The spectrum task reuses the same pipeline and adds the eigenvalue tables.
  const fs::path out2 = dir / "out2";
  json scfg = cfg;
  scfg["task"]["kind"] = "spectrum";
  scfg["output"] = out2.string();
  REQUIRE(run_experiment(write_config(dir, scfg, "spectrum.json"), serial_opts()) == 0);
  const auto spec_lines = lines_of(read_file(out2 / "spectrum.csv"));
  CHECK(spec_lines.size() >= 3);  // header plus at least the requested rank
  CHECK(spec_lines[0] == "re,im,sigma");
  const auto gen_lines = lines_of(read_file(out2 / "generator_spectrum.csv"));
  REQUIRE(gen_lines.size() >= 2);
  CHECK(gen_lines[0] == "lambda_re,lambda_im");
  // Filtered eigenvalues of a decaying flow map back to negative rates.
  CHECK(parse_csv_row(gen_lines[1])[0] < 0.0);

  const json manifest = json::parse(read_file(out2 / "manifest.json"));
  CHECK(manifest.at("status").get<std::string>() == "ok");
  const auto artifacts = artifact_list(manifest);
  CHECK(std::count(artifacts.begin(), artifacts.end(), "spectrum.csv") == 1);
  CHECK(std::count(artifacts.begin(), artifacts.end(), "generator_spectrum.csv") == 1);
}

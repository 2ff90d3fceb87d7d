#include "tspec/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <iostream>

#include "tspec/rng.hpp"

namespace tspec {

namespace {

bool finite(const Eigen::VectorXd& v) { return v.allFinite(); }

[[noreturn]] void blow_up(const char* system, Eigen::Index recorded) {
  throw SimulationBlowUp(std::string(system) + " integration produced a non-finite state after " +
                             std::to_string(recorded) + " recorded samples",
                         recorded);
}

void check_dt(double dt, int substeps) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (substeps < 1) throw std::invalid_argument("substeps must be >= 1");
}

}  // namespace

bool is_hurwitz(const Eigen::MatrixXd& A) {
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::MatrixXd>(A, false).eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i].real() >= 0.0) return false;
  return true;
}

TrajectoryDataset simulate_duffing(const DuffingParams& p, const Eigen::Vector2d& x0,
                                   double dt, Eigen::Index n, double burn_in, int substeps) {
  check_dt(dt, substeps);
  if (n < 2) throw std::invalid_argument("need at least two samples");
  const double h = dt / substeps;
  // Autonomous extended state (x, y, phase); the forcing reads the phase so
  // burn-in advances it consistently.
  Eigen::Vector3d s(x0[0], x0[1], 0.0);
  const auto deriv = [&p](const Eigen::Vector3d& u) {
    return Eigen::Vector3d(u[1],
                           -p.delta * u[1] - p.alpha * u[0] - p.beta * u[0] * u[0] * u[0] +
                               p.gamma * std::cos(u[2]),
                           p.omega);
  };
  const auto rk4_step = [&](Eigen::Vector3d& u) {
    const Eigen::Vector3d k1 = deriv(u);
    const Eigen::Vector3d k2 = deriv(u + 0.5 * h * k1);
    const Eigen::Vector3d k3 = deriv(u + 0.5 * h * k2);
    const Eigen::Vector3d k4 = deriv(u + h * k3);
    u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  const auto burn_steps = static_cast<Eigen::Index>(std::llround(burn_in / dt));
  TrajectoryDataset ds;
  ds.points.resize(n, 2);
  ds.dt = dt;
  ds.system = "duffing";
  ds.burn_in = burn_steps * dt;
  Eigen::Index recorded = 0;
  for (Eigen::Index step = 0; step < burn_steps + n - 1; ++step) {
    if (step >= burn_steps) {
      ds.points.row(recorded) << s[0], s[1];
      ++recorded;
    }
    for (int sub = 0; sub < substeps; ++sub) rk4_step(s);
    if (!s.allFinite()) blow_up("duffing", recorded);
  }
  ds.points.row(recorded) << s[0], s[1];
  return ds;
}

TrajectoryDataset simulate_ou(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                              const Eigen::VectorXd& x0, double dt, Eigen::Index n,
                              double burn_in, std::uint64_t seed, int substeps) {
  check_dt(dt, substeps);
  if (A.rows() != A.cols() || A.rows() != x0.size() || B.rows() != A.rows())
    throw std::invalid_argument("drift/diffusion/initial-state dimensions disagree");
  if (n < 2) throw std::invalid_argument("need at least two samples");
  if (!is_hurwitz(A))
    std::cerr << "warning: drift matrix is not Hurwitz; the process has no stationary law\n";

  const double h = dt / substeps;
  const double sqh = std::sqrt(h);
  const Eigen::Index d = A.rows();
  const Eigen::Index p = B.cols();
  CounterRng rng(seed);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd xi(p);

  const auto burn_steps = static_cast<Eigen::Index>(std::llround(burn_in / dt));
  TrajectoryDataset ds;
  ds.points.resize(n, d);
  ds.dt = dt;
  ds.system = "ou";
  ds.seed = seed;
  ds.burn_in = burn_steps * dt;
  Eigen::Index recorded = 0;
  for (Eigen::Index step = 0; step < burn_steps + n - 1; ++step) {
    if (step >= burn_steps) ds.points.row(recorded++) = x.transpose();
    for (int sub = 0; sub < substeps; ++sub) {
      for (Eigen::Index k = 0; k < p; ++k) xi[k] = rng.normal();
      x += h * (A * x) + sqh * (B * xi);
    }
    if (!finite(x)) blow_up("ou", recorded);
  }
  ds.points.row(recorded) = x.transpose();
  return ds;
}

TrajectoryDataset simulate_langevin(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad_potential,
    double friction, double kT, const Eigen::VectorXd& x0, double dt, Eigen::Index n,
    double burn_in, std::uint64_t seed, int substeps) {
  check_dt(dt, substeps);
  if (!(friction > 0.0)) throw std::invalid_argument("friction must be positive");
  if (kT < 0.0) throw std::invalid_argument("temperature must be non-negative");
  if (n < 2) throw std::invalid_argument("need at least two samples");

  const double h = dt / substeps;
  const double drift_scale = 1.0 / friction;
  const double noise_scale = std::sqrt(2.0 * kT / friction) * std::sqrt(h);
  const Eigen::Index d = x0.size();
  CounterRng rng(seed);
  Eigen::VectorXd x = x0;
  Eigen::VectorXd xi(d);

  const auto burn_steps = static_cast<Eigen::Index>(std::llround(burn_in / dt));
  TrajectoryDataset ds;
  ds.points.resize(n, d);
  ds.dt = dt;
  ds.system = "langevin";
  ds.seed = seed;
  ds.burn_in = burn_steps * dt;
  Eigen::Index recorded = 0;
  for (Eigen::Index step = 0; step < burn_steps + n - 1; ++step) {
    if (step >= burn_steps) ds.points.row(recorded++) = x.transpose();
    for (int sub = 0; sub < substeps; ++sub) {
      for (Eigen::Index k = 0; k < d; ++k) xi[k] = rng.normal();
      x += -h * drift_scale * grad_potential(x) + noise_scale * xi;
    }
    if (!finite(x)) blow_up("langevin", recorded);
  }
  ds.points.row(recorded) = x.transpose();
  return ds;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  if (A.rows() != A.cols() || B.rows() != A.rows())
    throw std::invalid_argument("dimension mismatch in covariance solve");
  const Eigen::Index d = A.rows();
  const Eigen::MatrixXd Q = B * B.transpose();
  // vec(A S + S A^T) = (I (x) A + A (x) I) vec(S)
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d * d, d * d);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) {
      M.block(i * d, j * d, d, d) += I(i, j) * A;  // I (x) A
      M.block(i * d, j * d, d, d) += A(i, j) * I;  // A (x) I
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  if (!lu.isInvertible())
    throw std::runtime_error(
        "stationary covariance system is singular; the drift matrix is not Hurwitz");
  const Eigen::VectorXd q = Eigen::Map<const Eigen::VectorXd>(Q.data(), d * d);
  const Eigen::VectorXd s = lu.solve(-q);
  Eigen::MatrixXd S = Eigen::Map<const Eigen::MatrixXd>(s.data(), d, d);
  S = 0.5 * (S + S.transpose()).eval();
  const double resid = (A * S + S * A.transpose() + Q).norm();
  if (resid > 1e-10 * std::max(1.0, Q.norm()))
    throw std::runtime_error("stationary covariance solve failed its residual check");
  return S;
}

TrajectoryDataset add_observation_noise(const TrajectoryDataset& ds, double sigma,
                                        std::uint64_t seed) {
  if (sigma < 0.0) throw std::invalid_argument("noise level must be non-negative");
  TrajectoryDataset out = ds;
  if (sigma == 0.0) return out;
  CounterRng rng(seed, /*stream=*/1);
  for (Eigen::Index i = 0; i < out.points.rows(); ++i)
    for (Eigen::Index j = 0; j < out.points.cols(); ++j)
      out.points(i, j) += sigma * rng.normal();
  out.noise_sigma = std::hypot(out.noise_sigma, sigma);
  return out;
}

}  // namespace tspec

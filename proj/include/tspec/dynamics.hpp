#pragma once
// Synthetic trajectory generators: forced Duffing oscillator (deterministic
// RK4), linear SDEs and overdamped Langevin dynamics (Euler–Maruyama), plus
// observation noise and the stationary-covariance Lyapunov solve.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace tspec {

struct TrajectoryDataset {
  Eigen::MatrixXd points;  // n x d, equally spaced by dt
  double dt = 0.0;
  std::string system;  // provenance tag, e.g. "duffing"
  std::uint64_t seed = 0;
  double noise_sigma = 0.0;
  double burn_in = 0.0;  // seconds discarded before the first sample
};

// Thrown when an integrator produces a non-finite state; `last_valid_index`
// is the number of samples that were completed before the blow-up.
struct SimulationBlowUp : std::runtime_error {
  SimulationBlowUp(const std::string& what, Eigen::Index idx)
      : std::runtime_error(what), last_valid_index(idx) {}
  Eigen::Index last_valid_index;
};

struct DuffingParams {
  double alpha = 0.5;
  double beta = 0.625;
  double gamma = 2.0;
  double delta = 1.5;
  double omega = 1.0;
};

// x'' + delta x' + alpha x + beta x^3 = gamma cos(omega t), integrated as the
// autonomous (x, y, phase) system with classical fourth-order steps of size
// dt/substeps; records (x, y) every dt after burn_in seconds.
TrajectoryDataset simulate_duffing(const DuffingParams& p, const Eigen::Vector2d& x0,
                                   double dt, Eigen::Index n, double burn_in = 0.0,
                                   int substeps = 10);

// dX = A X dt + B dW by Euler–Maruyama with substeps; warns if A is not
// Hurwitz. Deterministic given seed.
TrajectoryDataset simulate_ou(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                              const Eigen::VectorXd& x0, double dt, Eigen::Index n,
                              double burn_in, std::uint64_t seed, int substeps = 10);

// dX = -grad_potential(X)/friction dt + sqrt(2 kT / friction) dW.
TrajectoryDataset simulate_langevin(
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad_potential,
    double friction, double kT, const Eigen::VectorXd& x0, double dt, Eigen::Index n,
    double burn_in, std::uint64_t seed, int substeps = 10);

// Stationary covariance of dX = A X dt + B dW: solves A S + S A^T = -B B^T by
// a dense vectorized linear system. Requires A Hurwitz.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// Adds i.i.d. N(0, sigma^2) perturbations to every coordinate of every sample.
TrajectoryDataset add_observation_noise(const TrajectoryDataset& ds, double sigma,
                                        std::uint64_t seed);

bool is_hurwitz(const Eigen::MatrixXd& A);

}  // namespace tspec

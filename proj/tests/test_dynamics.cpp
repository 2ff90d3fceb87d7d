#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

#include "oracles.hpp"
#include "tspec/dynamics.hpp"

using namespace tspec;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

TEST_CASE("unforced undamped oscillator conserves energy") {
  DuffingParams p;
  p.alpha = 1.0;
  p.beta = 0.0;
  p.gamma = 0.0;
  p.delta = 0.0;
  const TrajectoryDataset ds = simulate_duffing(p, Vector2d(1.0, 0.0), 0.01, 1000, 0.0, 10);
  const double e0 = 0.5;
  for (Eigen::Index i = 0; i < ds.points.rows(); ++i) {
    const double e = 0.5 * (ds.points(i, 0) * ds.points(i, 0) + ds.points(i, 1) * ds.points(i, 1));
    CHECK(std::abs(e - e0) < 1e-8);
  }
  // And it tracks the closed-form cosine.
  const double t_last = 0.01 * 999;
  CHECK(ds.points(999, 0) == doctest::Approx(std::cos(t_last)).epsilon(1e-7));
  CHECK(ds.points(999, 1) == doctest::Approx(-std::sin(t_last)).epsilon(1e-7));
}

TEST_CASE("halving the internal step shrinks the error like a fourth-order method") {
  DuffingParams p;
  p.alpha = 1.0;
  p.beta = 0.0;
  p.gamma = 0.0;
  p.delta = 0.0;
  const double dt = 0.2;
  const Eigen::Index n = 26;  // T = 5
  const auto error_with = [&](int substeps) {
    const TrajectoryDataset ds = simulate_duffing(p, Vector2d(1.0, 0.0), dt, n, 0.0, substeps);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = dt * static_cast<double>(i);
      worst = std::max(worst, std::abs(ds.points(i, 0) - std::cos(t)));
    }
    return worst;
  };
  const double e1 = error_with(1);
  const double e2 = error_with(2);
  CHECK(e1 > 1e-9);  // coarse run has measurable error
  CHECK(e2 < e1 / 10.0);  // ~16x for a 4th-order scheme; allow slack
}

TEST_CASE("burn-in continues the same deterministic orbit") {
  DuffingParams p;  // defaults: forced, damped
  const TrajectoryDataset burned = simulate_duffing(p, Vector2d(1.0, 0.0), 0.05, 40, 2.0, 8);
  const TrajectoryDataset whole = simulate_duffing(p, Vector2d(1.0, 0.0), 0.05, 80, 0.0, 8);
  CHECK(burned.burn_in == doctest::Approx(2.0));
  CHECK((burned.points - whole.points.bottomRows(40)).norm() == doctest::Approx(0.0));
}

TEST_CASE("runaway cubic reports how far it got") {
  DuffingParams p;
  p.alpha = 0.5;
  p.beta = -50.0;  // destabilizing cubic: finite-time escape
  p.gamma = 0.0;
  p.delta = 0.0;
  bool threw = false;
  try {
    simulate_duffing(p, Vector2d(2.0, 0.0), 0.1, 500, 0.0, 1);
  } catch (const SimulationBlowUp& e) {
    threw = true;
    CHECK(e.last_valid_index >= 0);
    CHECK(e.last_valid_index < 500);
  }
  CHECK(threw);
}

TEST_CASE("linear SDE with zero noise follows the matrix exponential") {
  MatrixXd a(2, 2);
  a << -0.5, 1.0, -1.0, -0.5;
  const MatrixXd b = MatrixXd::Zero(2, 1);
  const VectorXd x0 = Vector2d(1.0, -0.5);
  const double dt = 0.1;
  const Eigen::Index n = 11;  // T = 1
  const TrajectoryDataset ds = simulate_ou(a, b, x0, dt, n, 0.0, 7, 1000);
  const Eigen::MatrixXd prop = (a * 1.0).exp();
  const VectorXd want = prop * x0;
  CHECK((ds.points.row(10).transpose() - want).norm() < 1e-3);
}

TEST_CASE("scalar OU reaches its stationary variance") {
  MatrixXd a(1, 1), b(1, 1);
  a << -1.0;
  b << std::sqrt(2.0);
  const TrajectoryDataset ds =
      simulate_ou(a, b, VectorXd::Zero(1), 0.1, 100000, 10.0, 42, 10);
  const double mean = ds.points.col(0).mean();
  const double var = (ds.points.col(0).array() - mean).square().mean();
  CHECK(std::abs(var - 1.0) < 0.05);  // stationary variance sigma^2/(2 theta) = 1
  CHECK(std::abs(mean) < 0.05);
}

TEST_CASE("OU burn-in consumes the same random stream") {
  MatrixXd a(2, 2);
  a << -1.0, 0.3, 0.0, -0.7;
  MatrixXd b = MatrixXd::Identity(2, 2);
  const VectorXd x0 = Vector2d(0.2, -0.1);
  const TrajectoryDataset burned = simulate_ou(a, b, x0, 0.05, 50, 1.0, 99, 4);
  const TrajectoryDataset whole = simulate_ou(a, b, x0, 0.05, 70, 0.0, 99, 4);
  CHECK((burned.points - whole.points.bottomRows(50)).norm() == doctest::Approx(0.0));
}

TEST_CASE("simulations are reproducible by seed") {
  MatrixXd a(1, 1), b(1, 1);
  a << -1.0;
  b << 1.0;
  const TrajectoryDataset r1 = simulate_ou(a, b, VectorXd::Zero(1), 0.1, 200, 0.0, 5, 2);
  const TrajectoryDataset r2 = simulate_ou(a, b, VectorXd::Zero(1), 0.1, 200, 0.0, 5, 2);
  const TrajectoryDataset r3 = simulate_ou(a, b, VectorXd::Zero(1), 0.1, 200, 0.0, 6, 2);
  CHECK((r1.points - r2.points).norm() == doctest::Approx(0.0));
  CHECK((r1.points - r3.points).norm() > 1e-6);
  CHECK(r1.seed == 5);

  const auto grad = [](const VectorXd& x) { return VectorXd(x); };
  const TrajectoryDataset l1 = simulate_langevin(grad, 1.0, 0.5, VectorXd::Ones(1), 0.1, 100, 0.0, 8, 2);
  const TrajectoryDataset l2 = simulate_langevin(grad, 1.0, 0.5, VectorXd::Ones(1), 0.1, 100, 0.0, 8, 2);
  CHECK((l1.points - l2.points).norm() == doctest::Approx(0.0));
}

TEST_CASE("overdamped dynamics in a quadratic well is an OU process") {
  const auto grad = [](const VectorXd& x) { return VectorXd(x); };  // V = x^2/2
  const double kT = 0.7;
  const TrajectoryDataset ds =
      simulate_langevin(grad, 1.0, kT, VectorXd::Zero(1), 0.05, 100000, 10.0, 31, 4);
  const double mean = ds.points.col(0).mean();
  const double var = (ds.points.col(0).array() - mean).square().mean();
  CHECK(std::abs(var - kT) < 0.05 * kT + 0.02);
}

TEST_CASE("zero temperature reduces to deterministic gradient descent") {
  const auto grad = [](const VectorXd& x) { return VectorXd(x); };
  const TrajectoryDataset d1 =
      simulate_langevin(grad, 2.0, 0.0, 3.0 * VectorXd::Ones(1), 0.1, 51, 0.0, 1, 100);
  const TrajectoryDataset d2 =
      simulate_langevin(grad, 2.0, 0.0, 3.0 * VectorXd::Ones(1), 0.1, 51, 0.0, 999, 100);
  CHECK((d1.points - d2.points).norm() == doctest::Approx(0.0));  // seed is irrelevant
  // x' = -x/friction, so x(5) = 3 exp(-2.5)
  CHECK(d1.points(50, 0) == doctest::Approx(3.0 * std::exp(-2.5)).epsilon(1e-3));
  for (Eigen::Index i = 1; i < 51; ++i) CHECK(d1.points(i, 0) < d1.points(i - 1, 0));
}

TEST_CASE("stationary covariance solve") {
  // A = -I, B = sqrt(2) I  =>  S = I.
  const MatrixXd s1 = solve_lyapunov(-MatrixXd::Identity(2, 2),
                                     std::sqrt(2.0) * MatrixXd::Identity(2, 2));
  CHECK((s1 - MatrixXd::Identity(2, 2)).norm() < 1e-12);

  // Scalar: sigma^2 / (2 theta).
  MatrixXd a(1, 1), b(1, 1);
  a << -2.5;
  b << 3.0;
  CHECK(solve_lyapunov(a, b)(0, 0) == doctest::Approx(9.0 / 5.0));

  // Random Hurwitz drift: the defining equation holds.
  MatrixXd ar(3, 3);
  ar << -2.0, 0.4, -0.1, 0.3, -1.5, 0.2, 0.0, 0.6, -3.0;
  MatrixXd br(3, 2);
  br << 1.0, 0.0, 0.5, 1.0, -0.3, 0.2;
  const MatrixXd s = solve_lyapunov(ar, br);
  CHECK((s - s.transpose()).norm() < 1e-12);
  CHECK((ar * s + s * ar.transpose() + br * br.transpose()).norm() < 1e-10);

  CHECK_THROWS(solve_lyapunov(MatrixXd::Zero(2, 2), MatrixXd::Identity(2, 2)));
}

TEST_CASE("observation noise is additive, seeded, and recorded in quadrature") {
  MatrixXd a(1, 1), b(1, 1);
  a << -1.0;
  b << 1.0;
  TrajectoryDataset clean = simulate_ou(a, b, VectorXd::Zero(1), 0.1, 20000, 0.0, 3, 2);

  const TrajectoryDataset same = add_observation_noise(clean, 0.0, 17);
  CHECK((same.points - clean.points).norm() == doctest::Approx(0.0));
  CHECK(same.noise_sigma == doctest::Approx(clean.noise_sigma));

  const TrajectoryDataset noisy = add_observation_noise(clean, 0.5, 17);
  const VectorXd delta = noisy.points.col(0) - clean.points.col(0);
  const double var = (delta.array() - delta.mean()).square().mean();
  CHECK(std::abs(var - 0.25) < 0.02);
  CHECK(noisy.noise_sigma == doctest::Approx(0.5));

  const TrajectoryDataset again = add_observation_noise(clean, 0.5, 17);
  CHECK((again.points - noisy.points).norm() == doctest::Approx(0.0));

  // Stacked noise adds in quadrature.
  const TrajectoryDataset twice = add_observation_noise(noisy, 1.2, 18);
  CHECK(twice.noise_sigma == doctest::Approx(1.3));
  CHECK_THROWS(add_observation_noise(clean, -0.1, 0));
}

TEST_CASE("stability predicate looks at real parts") {
  CHECK(is_hurwitz(-MatrixXd::Identity(3, 3)));
  MatrixXd rot(2, 2);
  rot << 0.0, 1.0, -1.0, 0.0;
  CHECK_FALSE(is_hurwitz(rot));  // purely imaginary spectrum
  MatrixXd damped(2, 2);
  damped << -0.1, 1.0, -1.0, -0.1;
  CHECK(is_hurwitz(damped));
}

TEST_CASE("bad integration parameters are rejected") {
  DuffingParams p;
  CHECK_THROWS(simulate_duffing(p, Vector2d(0, 0), -0.1, 10, 0.0, 1));
  CHECK_THROWS(simulate_duffing(p, Vector2d(0, 0), 0.1, 1, 0.0, 1));
  CHECK_THROWS(simulate_duffing(p, Vector2d(0, 0), 0.1, 10, 0.0, 0));
  MatrixXd a(1, 1), b(2, 1);
  a << -1.0;
  b << 1.0, 1.0;
  CHECK_THROWS(simulate_ou(a, b, VectorXd::Zero(1), 0.1, 10, 0.0, 0, 1));
  const auto grad = [](const VectorXd& x) { return VectorXd(x); };
  CHECK_THROWS(simulate_langevin(grad, 0.0, 1.0, VectorXd::Zero(1), 0.1, 10, 0.0, 0, 1));
  CHECK_THROWS(simulate_langevin(grad, 1.0, -1.0, VectorXd::Zero(1), 0.1, 10, 0.0, 0, 1));
}

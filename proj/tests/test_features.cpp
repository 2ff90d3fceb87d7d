#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "oracles.hpp"
#include "tspec/features.hpp"
#include "tspec/rng.hpp"
#include "tspec/toeplitz.hpp"

using namespace tspec;
using Eigen::MatrixXd;

namespace {

MatrixXd random_points(int rows, int cols, std::uint64_t seed) {
  CounterRng rng(seed);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("delay embedding concatenates consecutive rows") {
  MatrixXd traj(5, 1);
  traj << 1, 2, 3, 4, 5;
  const MatrixXd emb = delay_embed(traj, 2);
  REQUIRE(emb.rows() == 4);
  REQUIRE(emb.cols() == 2);
  for (int i = 0; i < 4; ++i) {
    CHECK(emb(i, 0) == doctest::Approx(i + 1.0));
    CHECK(emb(i, 1) == doctest::Approx(i + 2.0));
  }

  // window 1 is the identity; window n is a single row; window > n rejects.
  const MatrixXd t2 = random_points(6, 2, 1);
  CHECK((delay_embed(t2, 1) - t2).norm() == doctest::Approx(0.0));
  const MatrixXd full = delay_embed(t2, 6);
  REQUIRE(full.rows() == 1);
  REQUIRE(full.cols() == 12);
  CHECK(full(0, 0) == doctest::Approx(t2(0, 0)));
  CHECK(full(0, 11) == doctest::Approx(t2(5, 1)));
  CHECK_THROWS(delay_embed(t2, 7));
}

TEST_CASE("delay embedding is shift equivariant") {
  const MatrixXd traj = random_points(20, 2, 7);
  const int w = 4;
  const MatrixXd whole = delay_embed(traj, w);
  const MatrixXd tail = delay_embed(traj.bottomRows(19), w);
  CHECK((whole.bottomRows(16) - tail).norm() < 1e-15);
}

TEST_CASE("dictionary enumerates graded monomials") {
  Dictionary d;
  d.base_dim = 2;
  d.max_degree = 2;
  d.include_cross = true;
  REQUIRE(d.feature_count() == 5);  // x, y, x^2, xy, y^2
  const auto e = d.exponents();
  REQUIRE(e.size() == 5);
  CHECK(e[0] == std::vector<int>{1, 0});
  CHECK(e[1] == std::vector<int>{0, 1});
  CHECK(e[2] == std::vector<int>{2, 0});
  CHECK(e[3] == std::vector<int>{1, 1});
  CHECK(e[4] == std::vector<int>{0, 2});

  MatrixXd pts(2, 2);
  pts << 2.0, 3.0, -1.0, 0.5;
  const MatrixXd z = evaluate_dictionary(d, pts);
  REQUIRE(z.rows() == 5);
  REQUIRE(z.cols() == 2);
  CHECK(z(0, 0) == doctest::Approx(2.0));
  CHECK(z(1, 0) == doctest::Approx(3.0));
  CHECK(z(2, 0) == doctest::Approx(4.0));
  CHECK(z(3, 0) == doctest::Approx(6.0));
  CHECK(z(4, 0) == doctest::Approx(9.0));
  CHECK(z(3, 1) == doctest::Approx(-0.5));
}

TEST_CASE("degree-1 dictionary transposes the points") {
  Dictionary d;
  d.base_dim = 3;
  d.max_degree = 1;
  const MatrixXd pts = random_points(7, 3, 3);
  const MatrixXd z = evaluate_dictionary(d, pts);
  CHECK((z - pts.transpose()).norm() < 1e-15);
}

TEST_CASE("feature counts for cross and per-lag dictionaries") {
  Dictionary cross;
  cross.base_dim = 5;
  cross.max_degree = 2;
  cross.include_cross = true;
  CHECK(cross.feature_count() == 20);  // C(7,2) - 1

  Dictionary lagged;
  lagged.base_dim = 2;
  lagged.window = 10;
  lagged.max_degree = 4;
  lagged.include_cross = false;
  CHECK(lagged.feature_count() == 140);  // (2+3+4+5) per lag, 10 lags
  CHECK(static_cast<int>(lagged.exponents().size()) == lagged.feature_count());
  // Every per-lag exponent vector touches exactly one lag.
  for (const auto& e : lagged.exponents()) {
    int lags_used = 0;
    for (int lag = 0; lag < 10; ++lag) {
      if (e[2 * lag] != 0 || e[2 * lag + 1] != 0) ++lags_used;
    }
    CHECK(lags_used == 1);
  }
}

TEST_CASE("linear feature index finds the plain coordinate") {
  Dictionary d;
  d.base_dim = 2;
  d.window = 3;
  d.max_degree = 3;
  const auto expos = d.exponents();
  for (int lag = 0; lag < 3; ++lag) {
    for (int coord = 0; coord < 2; ++coord) {
      const int k = d.linear_feature_index(lag, coord);
      int deg = 0;
      for (int v : expos[static_cast<size_t>(k)]) deg += v;
      CHECK(deg == 1);
      CHECK(expos[static_cast<size_t>(k)][2 * lag + coord] == 1);
    }
  }
  CHECK_THROWS(d.linear_feature_index(3, 0));
  CHECK_THROWS(d.linear_feature_index(0, 2));
}

TEST_CASE("hermite basis evaluates probabilists' polynomials") {
  Dictionary d;
  d.base_dim = 1;
  d.max_degree = 5;
  d.basis = DictionaryBasis::hermite;
  REQUIRE(d.feature_count() == 5);
  MatrixXd pts(1, 1);
  const double x = 1.3;
  pts(0, 0) = x;
  const MatrixXd z = evaluate_dictionary(d, pts);
  CHECK(z(0, 0) == doctest::Approx(x));
  CHECK(z(1, 0) == doctest::Approx(x * x - 1.0));
  CHECK(z(2, 0) == doctest::Approx(x * x * x - 3.0 * x));
  CHECK(z(3, 0) == doctest::Approx(std::pow(x, 4) - 6.0 * x * x + 3.0));
  CHECK(z(4, 0) == doctest::Approx(std::pow(x, 5) - 10.0 * std::pow(x, 3) + 15.0 * x));
  CHECK(d.feature_names()[1] == "He2(x0)");

  Dictionary mono;
  mono.base_dim = 1;
  mono.max_degree = 3;
  const auto names = mono.feature_names();
  REQUIRE(names.size() == 3);
  CHECK(names[0] == "x0");
  CHECK(names[1] == "x0^2");
  CHECK(names[2] == "x0^3");
}

TEST_CASE("gaussian gram is a unit-diagonal PSD kernel matrix") {
  KernelSpec kern;
  kern.kind = KernelSpec::Kind::gaussian;
  kern.lengthscale = 0.8;
  const MatrixXd pts = random_points(30, 3, 11);
  const MatrixXd k = gram(kern, pts);
  REQUIRE(k.rows() == 30);
  REQUIRE(k.cols() == 30);
  for (int i = 0; i < 30; ++i) CHECK(k(i, i) == doctest::Approx(1.0));
  CHECK((k - k.transpose()).norm() < 1e-14);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> es(k);
  CHECK(es.eigenvalues().minCoeff() > -1e-10);

  // One entry against the closed form.
  const double d2 = (pts.row(2) - pts.row(5)).squaredNorm();
  CHECK(k(2, 5) == doctest::Approx(std::exp(-d2 / (2.0 * 0.8 * 0.8))));

  // Rectangular evaluation agrees with the square one.
  const MatrixXd kr = gram(kern, pts.topRows(4), pts);
  CHECK((kr - k.topRows(4)).norm() < 1e-14);
}

TEST_CASE("linear-dictionary kernel reproduces the feature inner product") {
  auto dict = std::make_shared<Dictionary>();
  dict->base_dim = 2;
  dict->max_degree = 3;
  dict->include_cross = true;
  KernelSpec kern;
  kern.kind = KernelSpec::Kind::linear_dictionary;
  kern.dictionary = dict;
  const MatrixXd pts = random_points(12, 2, 13);
  const MatrixXd z = evaluate_dictionary(*dict, pts);
  const MatrixXd k = gram(kern, pts);
  CHECK((k - z.transpose() * z).norm() < 1e-12);

  KernelSpec bad;
  bad.kind = KernelSpec::Kind::linear_dictionary;
  CHECK_THROWS(gram(bad, pts));
}

TEST_CASE("centered gram equals the centered-feature inner product") {
  // The two estimator routes share one geometry: centering the Gram matrix of
  // a linear-dictionary kernel matches centering the feature matrix directly.
  auto dict = std::make_shared<Dictionary>();
  dict->base_dim = 2;
  dict->max_degree = 2;
  dict->include_cross = true;
  const int n = 25;
  const MatrixXd pts = random_points(n, 2, 17);
  const MatrixXd z = evaluate_dictionary(*dict, pts);
  KernelSpec kern;
  kern.kind = KernelSpec::Kind::linear_dictionary;
  kern.dictionary = dict;
  const MatrixXd kbar = center(gram(kern, pts), CenterMode::gram);
  const MatrixXd zc = center(z, CenterMode::columns);
  CHECK((kbar - zc.transpose() * zc / static_cast<double>(n)).norm() < 1e-10);
}

TEST_CASE("invalid dictionary parameters are rejected") {
  Dictionary d;
  d.base_dim = 0;
  CHECK_THROWS(d.feature_count());
  d.base_dim = 1;
  d.max_degree = 0;
  CHECK_THROWS(d.exponents());
  d.max_degree = 2;
  const MatrixXd pts = random_points(3, 2, 5);
  CHECK_THROWS(evaluate_dictionary(d, pts));  // dimension mismatch
}

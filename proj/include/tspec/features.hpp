#pragma once
// Turning raw trajectories into feature matrices and Gram matrices: delay
// embedding, polynomial dictionaries over embedded windows, and kernels.

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace tspec {

enum class DictionaryBasis { monomial, hermite };

struct Dictionary {
  int base_dim = 1;    // coordinates per time step
  int window = 1;      // delay-embedding width, in steps
  int max_degree = 1;  // polynomial degree cap, constant excluded
  bool include_cross = false;  // couple coordinates across lags
  DictionaryBasis basis = DictionaryBasis::monomial;

  int embedded_dim() const { return base_dim * window; }
  int feature_count() const;
  // One exponent vector (length embedded_dim) per feature, in evaluation order:
  // lag-major when include_cross is false, graded lexicographic within a block.
  std::vector<std::vector<int>> exponents() const;
  std::vector<std::string> feature_names() const;
  // Index of the degree-1 feature for a single embedded coordinate.
  int linear_feature_index(int lag, int coord) const;
};

// Hankel/delay embedding: row i of the result concatenates rows i .. i+w-1 of
// the trajectory. Output is (n - w + 1) x (d * w).
Eigen::MatrixXd delay_embed(const Eigen::MatrixXd& traj, int window);

// Feature matrix: column k holds the dictionary evaluated at row k of points.
// points is q x embedded_dim; result is m x q.
Eigen::MatrixXd evaluate_dictionary(const Dictionary& dict, const Eigen::MatrixXd& points);

struct KernelSpec {
  enum class Kind { gaussian, linear_dictionary };
  Kind kind = Kind::gaussian;
  double lengthscale = 1.0;  // gaussian: k(a,b) = exp(-|a-b|^2 / (2 ls^2))
  std::shared_ptr<const Dictionary> dictionary;  // linear_dictionary only
};

Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& a,
                     const Eigen::MatrixXd& b);
Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& points);

}  // namespace tspec

#include "tspec/features.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace tspec {

namespace {

// All exponent vectors of length dim with 1 <= total degree <= max_degree,
// graded: degree ascending, and within a degree descending lexicographic
// (so for dim=2, degree 2: x^2, x*y, y^2).
void enumerate_graded(int dim, int max_degree, std::vector<std::vector<int>>& out) {
  std::vector<int> expo(dim, 0);
  for (int deg = 1; deg <= max_degree; ++deg) {
    std::fill(expo.begin(), expo.end(), 0);
    expo[0] = deg;
    while (true) {
      out.push_back(expo);
      // Next composition of deg in descending lexicographic order: move one
      // unit from the rightmost nonzero entry left of the end, collecting
      // whatever sits at the end. Entries between are zero by construction.
      int i = dim - 2;
      while (i >= 0 && expo[i] == 0) --i;
      if (i < 0) break;
      const int tail = expo[dim - 1];
      expo[dim - 1] = 0;
      --expo[i];
      expo[i + 1] = tail + 1;
    }
  }
}

void validate(const Dictionary& d) {
  if (d.base_dim < 1) throw std::invalid_argument("dictionary base_dim must be >= 1");
  if (d.window < 1) throw std::invalid_argument("dictionary window must be >= 1");
  if (d.max_degree < 1) throw std::invalid_argument("dictionary max_degree must be >= 1");
}

// Probabilists' Hermite polynomial He_k(x).
double hermite_he(int k, double x) {
  if (k == 0) return 1.0;
  double hm = 1.0, h = x;
  for (int j = 1; j < k; ++j) {
    const double hp = x * h - static_cast<double>(j) * hm;
    hm = h;
    h = hp;
  }
  return h;
}

double basis_term(DictionaryBasis basis, double x, int k) {
  if (k == 0) return 1.0;
  if (basis == DictionaryBasis::monomial) return std::pow(x, k);
  return hermite_he(k, x);
}

}  // namespace

std::vector<std::vector<int>> Dictionary::exponents() const {
  validate(*this);
  const int ed = embedded_dim();
  std::vector<std::vector<int>> out;
  if (include_cross) {
    enumerate_graded(ed, max_degree, out);
  } else {
    // One block of base_dim-variate features per lag, embedded into length-ed
    // exponent vectors; lag 0 first (the oldest step in the window).
    std::vector<std::vector<int>> block;
    enumerate_graded(base_dim, max_degree, block);
    out.reserve(static_cast<size_t>(window) * block.size());
    for (int lag = 0; lag < window; ++lag) {
      for (const auto& e : block) {
        std::vector<int> full(ed, 0);
        for (int c = 0; c < base_dim; ++c) full[lag * base_dim + c] = e[c];
        out.push_back(std::move(full));
      }
    }
  }
  return out;
}

int Dictionary::feature_count() const { return static_cast<int>(exponents().size()); }

std::vector<std::string> Dictionary::feature_names() const {
  const auto expos = exponents();
  std::vector<std::string> names;
  names.reserve(expos.size());
  const char* prefix = basis == DictionaryBasis::hermite ? "He" : "";
  for (const auto& e : expos) {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!first) os << "*";
      first = false;
      const int lag = static_cast<int>(i) / base_dim;
      const int coord = static_cast<int>(i) % base_dim;
      if (*prefix) os << prefix << e[i] << "(";
      os << "x" << coord;
      if (window > 1) os << "[t-" << (window - 1 - lag) << "]";
      if (*prefix)
        os << ")";
      else if (e[i] > 1)
        os << "^" << e[i];
    }
    names.push_back(os.str());
  }
  return names;
}

int Dictionary::linear_feature_index(int lag, int coord) const {
  validate(*this);
  if (lag < 0 || lag >= window) throw std::out_of_range("lag outside window");
  if (coord < 0 || coord >= base_dim) throw std::out_of_range("coord outside base_dim");
  const auto expos = exponents();
  const int target = lag * base_dim + coord;
  for (size_t k = 0; k < expos.size(); ++k) {
    const auto& e = expos[k];
    int deg = 0;
    for (int v : e) deg += v;
    if (deg == 1 && e[target] == 1) return static_cast<int>(k);
  }
  throw std::logic_error("linear feature not present in dictionary");
}

Eigen::MatrixXd delay_embed(const Eigen::MatrixXd& traj, int window) {
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  const Eigen::Index n = traj.rows();
  const Eigen::Index d = traj.cols();
  if (n < window) throw std::invalid_argument("trajectory shorter than window");
  const Eigen::Index q = n - window + 1;
  Eigen::MatrixXd out(q, d * window);
  for (Eigen::Index i = 0; i < q; ++i)
    for (int w = 0; w < window; ++w) out.block(i, w * d, 1, d) = traj.row(i + w);
  return out;
}

Eigen::MatrixXd evaluate_dictionary(const Dictionary& dict, const Eigen::MatrixXd& points) {
  const auto expos = dict.exponents();
  const int ed = dict.embedded_dim();
  if (points.cols() != ed)
    throw std::invalid_argument("points have wrong dimension for dictionary");
  const Eigen::Index m = static_cast<Eigen::Index>(expos.size());
  const Eigen::Index q = points.rows();
  // Precompute per-coordinate basis values up to max_degree once per point.
  Eigen::MatrixXd out(m, q);
  std::vector<double> table(static_cast<size_t>(ed) * (dict.max_degree + 1));
  for (Eigen::Index p = 0; p < q; ++p) {
    for (int c = 0; c < ed; ++c)
      for (int k = 0; k <= dict.max_degree; ++k)
        table[static_cast<size_t>(c) * (dict.max_degree + 1) + k] =
            basis_term(dict.basis, points(p, c), k);
    for (Eigen::Index f = 0; f < m; ++f) {
      double v = 1.0;
      const auto& e = expos[static_cast<size_t>(f)];
      for (int c = 0; c < ed; ++c) {
        const int k = e[static_cast<size_t>(c)];
        if (k != 0) v *= table[static_cast<size_t>(c) * (dict.max_degree + 1) + k];
      }
      out(f, p) = v;
    }
  }
  return out;
}

Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& a,
                     const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("kernel inputs disagree in dimension");
  switch (kernel.kind) {
    case KernelSpec::Kind::gaussian: {
      const double inv = 1.0 / (2.0 * kernel.lengthscale * kernel.lengthscale);
      Eigen::MatrixXd out(a.rows(), b.rows());
      for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < b.rows(); ++j)
          out(i, j) = std::exp(-(a.row(i) - b.row(j)).squaredNorm() * inv);
      return out;
    }
    case KernelSpec::Kind::linear_dictionary: {
      if (!kernel.dictionary)
        throw std::invalid_argument("linear_dictionary kernel needs a dictionary");
      const Eigen::MatrixXd za = evaluate_dictionary(*kernel.dictionary, a);
      const Eigen::MatrixXd zb = evaluate_dictionary(*kernel.dictionary, b);
      return za.transpose() * zb;
    }
  }
  throw std::logic_error("unknown kernel kind");
}

Eigen::MatrixXd gram(const KernelSpec& kernel, const Eigen::MatrixXd& points) {
  return gram(kernel, points, points);
}

}  // namespace tspec

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace posyid {

using Index = Eigen::Index;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Closed interval [min, max] discretized with a fixed step.
struct GridRange {
  double min = 0.0;
  double max = 0.0;
  double step = 1.0;
};

/**
 * Per-variable sets of admissible exponents.
 *
 * Each set is finite, nonempty and strictly increasing. The monomial
 * dictionary is the Cartesian product of the sets.
 */
class ExponentGrid {
 public:
  explicit ExponentGrid(std::vector<std::vector<double>> grids);

  /// Expands [min, max] with the given step. The step must divide the
  /// interval up to 1e-9 slack; values are snapped to 12 significant digits
  /// so that e.g. -2 + 35 * 0.1 is exactly the double nearest to 1.5.
  static std::vector<double> expand(const GridRange& range);

  std::size_t num_variables() const { return grids_.size(); }
  const std::vector<double>& values(std::size_t variable) const { return grids_.at(variable); }
  const std::vector<std::vector<double>>& grids() const { return grids_; }

  /// Product of the per-variable cardinalities.
  std::size_t cardinality() const;

 private:
  std::vector<std::vector<double>> grids_;
};

/// Dictionary of exponent vectors; row i is alpha_i.
class MonomialBasis {
 public:
  explicit MonomialBasis(RowMatrix exponents);

  Index size() const { return exponents_.rows(); }
  Index num_variables() const { return exponents_.cols(); }
  const RowMatrix& exponents() const { return exponents_; }
  std::span<const double> exponent(Index i) const {
    return {exponents_.row(i).data(), static_cast<std::size_t>(exponents_.cols())};
  }

 private:
  RowMatrix exponents_;
};

/// All products of the grid values, lexicographic with the last variable
/// varying fastest.
MonomialBasis build_basis(const ExponentGrid& grid);

/// prod_j w_j^alpha_j. Throws DomainError unless every w_j > 0.
double eval_monomial(std::span<const double> alpha, std::span<const double> w);

/// Input samples (one row per measurement, strictly positive) and responses.
class Dataset {
 public:
  Dataset(RowMatrix samples, Eigen::VectorXd responses);

  Index size() const { return samples_.rows(); }
  Index num_variables() const { return samples_.cols(); }
  const RowMatrix& samples() const { return samples_; }
  const Eigen::VectorXd& responses() const { return responses_; }
  std::span<const double> sample(Index k) const {
    return {samples_.row(k).data(), static_cast<std::size_t>(samples_.cols())};
  }

  /// Copy restricted to the given rows, in the given order.
  Dataset subset(std::span<const Index> rows) const;
  /// Copy with row k removed.
  Dataset without(Index k) const;

 private:
  RowMatrix samples_;
  Eigen::VectorXd responses_;
};

/// Phi(k, i) = w(k)^alpha_i together with the squared column norms.
class DesignMatrix {
 public:
  explicit DesignMatrix(Eigen::MatrixXd columns);

  Index rows() const { return columns_.rows(); }
  Index cols() const { return columns_.cols(); }
  const Eigen::MatrixXd& columns() const { return columns_; }
  const Eigen::VectorXd& column_sq_norms() const { return column_sq_norms_; }

 private:
  Eigen::MatrixXd columns_;
  Eigen::VectorXd column_sq_norms_;
};

DesignMatrix build_design_matrix(const MonomialBasis& basis, const Dataset& data);

}  // namespace posyid

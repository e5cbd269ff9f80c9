#include "posyid/basis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

#include "posyid/errors.hpp"

namespace posyid {
namespace {

// Above this magnitude of alpha * log(w) the product form risks overflow in
// intermediate factors, so the exponent is accumulated in log space.
constexpr double kLogSpaceThreshold = 500.0;

double snap_decimal(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  double out = std::strtod(buf, nullptr);
  return out == 0.0 ? 0.0 : out;  // drop negative zero
}

}  // namespace

ExponentGrid::ExponentGrid(std::vector<std::vector<double>> grids) : grids_(std::move(grids)) {
  if (grids_.empty()) throw ConfigError("exponent grid needs at least one variable");
  for (std::size_t j = 0; j < grids_.size(); ++j) {
    const auto& q = grids_[j];
    if (q.empty()) {
      std::ostringstream msg;
      msg << "exponent grid for variable " << j + 1 << " is empty";
      throw ConfigError(msg.str());
    }
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (!std::isfinite(q[k])) {
        std::ostringstream msg;
        msg << "exponent grid for variable " << j + 1 << " has a non-finite value";
        throw ConfigError(msg.str());
      }
      if (k > 0 && !(q[k] > q[k - 1])) {
        std::ostringstream msg;
        msg << "exponent grid for variable " << j + 1
            << " must be strictly increasing without duplicates (position " << k + 1 << ")";
        throw ConfigError(msg.str());
      }
    }
  }
}

std::vector<double> ExponentGrid::expand(const GridRange& range) {
  if (!std::isfinite(range.min) || !std::isfinite(range.max) || !std::isfinite(range.step)) {
    throw ConfigError("grid range values must be finite");
  }
  if (range.step <= 0.0) throw ConfigError("grid range step must be positive");
  if (range.max < range.min) throw ConfigError("grid range has max < min");
  const double steps = (range.max - range.min) / range.step;
  const double whole = std::round(steps);
  if (std::abs(steps - whole) > 1e-9 * std::max(1.0, whole)) {
    std::ostringstream msg;
    msg << "grid step " << range.step << " does not divide [" << range.min << ", " << range.max
        << "]";
    throw ConfigError(msg.str());
  }
  const auto count = static_cast<std::size_t>(whole) + 1;
  std::vector<double> values(count);
  for (std::size_t k = 0; k < count; ++k) {
    values[k] = snap_decimal(range.min + static_cast<double>(k) * range.step);
  }
  values.back() = snap_decimal(range.max);
  return values;
}

std::size_t ExponentGrid::cardinality() const {
  return std::accumulate(grids_.begin(), grids_.end(), std::size_t{1},
                         [](std::size_t acc, const auto& q) { return acc * q.size(); });
}

MonomialBasis::MonomialBasis(RowMatrix exponents) : exponents_(std::move(exponents)) {
  if (exponents_.cols() < 1) throw ConfigError("monomial basis needs at least one variable");
  if (!exponents_.allFinite()) throw ConfigError("monomial basis has non-finite exponents");
  std::set<std::vector<double>> seen;
  for (Index i = 0; i < exponents_.rows(); ++i) {
    auto row = exponent(i);
    if (!seen.emplace(row.begin(), row.end()).second) {
      std::ostringstream msg;
      msg << "monomial basis row " << i << " duplicates an earlier exponent vector";
      throw ConfigError(msg.str());
    }
  }
}

MonomialBasis build_basis(const ExponentGrid& grid) {
  const auto n_vars = grid.num_variables();
  const auto n = grid.cardinality();
  RowMatrix exponents(static_cast<Index>(n), static_cast<Index>(n_vars));

  // Mixed-radix counter, last digit fastest.
  std::vector<std::size_t> digit(n_vars, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n_vars; ++j) {
      exponents(static_cast<Index>(i), static_cast<Index>(j)) = grid.values(j)[digit[j]];
    }
    for (std::size_t j = n_vars; j-- > 0;) {
      if (++digit[j] < grid.values(j).size()) break;
      digit[j] = 0;
    }
  }
  return MonomialBasis(std::move(exponents));
}

double eval_monomial(std::span<const double> alpha, std::span<const double> w) {
  if (alpha.size() != w.size()) {
    throw DataError("eval_monomial: exponent and input dimensions differ");
  }
  bool log_space = false;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (!(w[j] > 0.0)) {
      std::ostringstream msg;
      msg << "monomial input w_" << j + 1 << " = " << w[j] << " is not strictly positive";
      throw DomainError(msg.str());
    }
    if (std::abs(alpha[j]) * std::abs(std::log(w[j])) > kLogSpaceThreshold) log_space = true;
  }
  if (log_space) {
    double log_value = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) log_value += alpha[j] * std::log(w[j]);
    return std::exp(log_value);
  }
  double value = 1.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    if (alpha[j] != 0.0) value *= std::pow(w[j], alpha[j]);
  }
  return value;
}

Dataset::Dataset(RowMatrix samples, Eigen::VectorXd responses)
    : samples_(std::move(samples)), responses_(std::move(responses)) {
  if (samples_.rows() < 1) throw DataError("dataset has no samples");
  if (samples_.cols() < 1) throw DataError("dataset has no input variables");
  if (samples_.rows() != responses_.size()) {
    std::ostringstream msg;
    msg << "dataset has " << samples_.rows() << " samples but " << responses_.size()
        << " responses";
    throw DataError(msg.str());
  }
  for (Index k = 0; k < samples_.rows(); ++k) {
    for (Index j = 0; j < samples_.cols(); ++j) {
      const double v = samples_(k, j);
      if (!std::isfinite(v) || !(v > 0.0)) {
        std::ostringstream msg;
        msg << "sample " << k + 1 << ": w_" << j + 1 << " = " << v
            << " is not a finite positive value";
        throw DataError(msg.str());
      }
    }
    if (!std::isfinite(responses_[k])) {
      std::ostringstream msg;
      msg << "sample " << k + 1 << ": response is not finite";
      throw DataError(msg.str());
    }
  }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  RowMatrix samples(static_cast<Index>(rows.size()), samples_.cols());
  Eigen::VectorXd responses(static_cast<Index>(rows.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Index k = rows[r];
    if (k < 0 || k >= size()) throw DataError("dataset subset index out of range");
    samples.row(static_cast<Index>(r)) = samples_.row(k);
    responses[static_cast<Index>(r)] = responses_[k];
  }
  return Dataset(std::move(samples), std::move(responses));
}

Dataset Dataset::without(Index k) const {
  if (k < 0 || k >= size()) throw DataError("dataset row index out of range");
  std::vector<Index> rows;
  rows.reserve(static_cast<std::size_t>(size() - 1));
  for (Index r = 0; r < size(); ++r) {
    if (r != k) rows.push_back(r);
  }
  return subset(rows);
}

DesignMatrix::DesignMatrix(Eigen::MatrixXd columns) : columns_(std::move(columns)) {
  if (!columns_.allFinite()) throw NumericalError("design matrix has non-finite entries");
  column_sq_norms_ = columns_.colwise().squaredNorm().transpose();
}

DesignMatrix build_design_matrix(const MonomialBasis& basis, const Dataset& data) {
  if (basis.num_variables() != data.num_variables()) {
    std::ostringstream msg;
    msg << "basis has " << basis.num_variables() << " variables but data has "
        << data.num_variables();
    throw DataError(msg.str());
  }
  const Index m = data.size();
  const Index n = basis.size();
  Eigen::MatrixXd phi(m, n);
  for (Index i = 0; i < n; ++i) {
    const auto alpha = basis.exponent(i);
    for (Index k = 0; k < m; ++k) {
      const double v = eval_monomial(alpha, data.sample(k));
      if (!std::isfinite(v) || !(v > 0.0)) {
        std::ostringstream msg;
        msg << "design entry (sample " << k + 1 << ", monomial " << i << ") is "
            << (std::isfinite(v) ? "zero after underflow" : "not finite");
        throw NumericalError(msg.str());
      }
      phi(k, i) = v;
    }
  }
  return DesignMatrix(std::move(phi));
}

}  // namespace posyid

#include <cmath>
#include <memory>
#include <sstream>

#include "posyid/errors.hpp"
#include "posyid/pipeline.hpp"

namespace posyid {

std::vector<Index> interior_points(const Dataset& data, double boundary_margin) {
  if (!(boundary_margin >= 0.0 && boundary_margin < 0.5)) {
    throw ConfigError("boundary margin must lie in [0, 0.5)");
  }
  const auto& w = data.samples();
  const Eigen::RowVectorXd lo = w.colwise().minCoeff();
  const Eigen::RowVectorXd hi = w.colwise().maxCoeff();
  const Eigen::RowVectorXd pad = boundary_margin * (hi - lo);
  std::vector<Index> inside;
  for (Index k = 0; k < data.size(); ++k) {
    bool ok = true;
    for (Index j = 0; j < data.num_variables() && ok; ++j) {
      ok = w(k, j) >= lo[j] + pad[j] && w(k, j) <= hi[j] - pad[j];
    }
    if (ok) inside.push_back(k);
  }
  return inside;
}

LooResult loo_validate(const Dataset& data, const MonomialBasis& basis, const WeightScheme& scheme,
                       Constraint constraint, double boundary_margin, const SolverConfig& config) {
  if (data.size() < 2) throw DataError("leave-one-out needs at least two data points");
  LooResult result;
  result.validation = interior_points(data, boundary_margin);
  if (result.validation.empty()) return result;

  double y_loo_sq = 0.0;
  for (const Index j : result.validation) y_loo_sq += data.responses()[j] * data.responses()[j];
  const double y_loo = std::sqrt(y_loo_sq);
  if (y_loo == 0.0) throw DataError("leave-one-out responses are all zero");

  double ae_sq = 0.0;
  for (const Index j : result.validation) {
    const Dataset train = data.without(j);
    auto design = std::make_shared<const DesignMatrix>(build_design_matrix(basis, train));
    const ProblemData problem = make_problem(design, train.responses(), scheme, constraint);
    const Solution sol = solve(problem, config);

    double yhat = 0.0;
    const auto w = data.sample(j);
    for (Index i = 0; i < basis.size(); ++i) {
      if (sol.x[i] != 0.0) yhat += sol.x[i] * eval_monomial(basis.exponent(i), w);
    }
    const double nu = std::abs(data.responses()[j] - yhat) / y_loo;
    result.nu.push_back(nu);
    result.predictions.push_back(yhat);
    result.converged.push_back(sol.converged);
    ae_sq += nu * nu;
  }
  result.ae = std::sqrt(ae_sq);
  return result;
}

}  // namespace posyid

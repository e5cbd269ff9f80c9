#include <cmath>

#include "posyid/errors.hpp"
#include "posyid/pipeline.hpp"

namespace posyid {

void WeightScheme::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be positive");
  if (sigma_rule == SigmaRule::kExplicit && !(explicit_sigma >= 0.0 && std::isfinite(explicit_sigma))) {
    throw ConfigError("explicit sigma must be finite and >= 0");
  }
}

SigmaRule WeightScheme::automatic_rule(WeightKind kind) {
  return kind == WeightKind::kUniform ? SigmaRule::kFractionOfGamma
                                      : SigmaRule::kFractionOfMinLambda;
}

Weights make_weights(const WeightScheme& scheme, const DesignMatrix& design) {
  scheme.validate();
  Weights w;
  if (scheme.kind == WeightKind::kUniform) {
    w.lambda = Eigen::VectorXd::Constant(design.cols(), scheme.gamma);
  } else {
    w.lambda = scheme.gamma * design.column_sq_norms();
  }
  switch (scheme.sigma_rule) {
    case SigmaRule::kFractionOfGamma:
      w.sigma = scheme.gamma / 10.0;
      break;
    case SigmaRule::kFractionOfMinLambda:
      w.sigma = w.lambda.size() > 0 ? w.lambda.minCoeff() / 10.0 : 0.0;
      break;
    case SigmaRule::kExplicit:
      w.sigma = scheme.explicit_sigma;
      break;
  }
  return w;
}

ProblemData make_problem(std::shared_ptr<const DesignMatrix> design, const Eigen::VectorXd& y,
                         const WeightScheme& scheme, Constraint constraint) {
  if (!design) throw ConfigError("make_problem needs a design matrix");
  Weights w = make_weights(scheme, *design);
  return ProblemData(std::move(design), y, std::move(w.lambda), w.sigma, constraint);
}

}  // namespace posyid

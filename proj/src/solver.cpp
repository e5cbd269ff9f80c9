#include "posyid/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "posyid/errors.hpp"

namespace posyid {
namespace {

// Below this, ||phi~||^2 - lambda^2 in the nonzero branch means the zero
// test was defeated by rounding.
constexpr double kMinShrinkDenominator = 1e-300;

void require_finite(double v, const char* what, Index i) {
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "non-finite " << what << " while updating coordinate " << i;
    throw NumericalError(msg.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ProblemData

ProblemData::ProblemData(std::shared_ptr<const DesignMatrix> design, Eigen::VectorXd response,
                         Eigen::VectorXd weights, double sigma, Constraint constraint)
    : design_(std::move(design)),
      response_(std::move(response)),
      weights_(std::move(weights)),
      sigma_(sigma),
      constraint_(constraint) {
  if (!design_) throw ConfigError("problem needs a design matrix");
  if (response_.size() != design_->rows()) {
    std::ostringstream msg;
    msg << "response has length " << response_.size() << " but the design has "
        << design_->rows() << " rows";
    throw DataError(msg.str());
  }
  if (weights_.size() != design_->cols()) {
    std::ostringstream msg;
    msg << "weight vector has length " << weights_.size() << " but the design has "
        << design_->cols() << " columns";
    throw DataError(msg.str());
  }
  if (!response_.allFinite()) throw DataError("response has non-finite entries");
  for (Index i = 0; i < weights_.size(); ++i) {
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      std::ostringstream msg;
      msg << "weight lambda_" << i << " = " << weights_[i] << " must be finite and >= 0";
      throw ConfigError(msg.str());
    }
  }
  if (!std::isfinite(sigma_) || sigma_ < 0.0) throw ConfigError("sigma must be finite and >= 0");
  correlations_ = design_->columns().transpose() * response_;
  response_sq_norm_ = response_.squaredNorm();
  response_norm_ = std::sqrt(response_sq_norm_);
}

ProblemData ProblemData::restrict_to(std::span<const Index> columns) const {
  Eigen::MatrixXd sub(num_samples(), static_cast<Index>(columns.size()));
  Eigen::VectorXd sub_weights(static_cast<Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const Index i = columns[k];
    if (i < 0 || i >= num_features()) throw DataError("restrict_to: column index out of range");
    sub.col(static_cast<Index>(k)) = phi().col(i);
    sub_weights[static_cast<Index>(k)] = weights_[i];
  }
  return ProblemData(std::make_shared<const DesignMatrix>(std::move(sub)), response_,
                     std::move(sub_weights), sigma_, constraint_);
}

// ---------------------------------------------------------------------------
// SolverConfig

void SolverConfig::validate() const {
  if (!(gap_tolerance > 0.0)) throw ConfigError("gap tolerance must be positive");
  if (max_epochs < 1) throw ConfigError("max_epochs must be at least 1");
  if (zero_threshold && !(*zero_threshold >= 0.0)) {
    throw ConfigError("zero threshold must be >= 0");
  }
  if (!(stall_tolerance >= 0.0)) throw ConfigError("stall tolerance must be >= 0");
}

double SolverConfig::support_threshold(Constraint constraint) const {
  if (zero_threshold) return *zero_threshold;
  return constraint == Constraint::kNonnegative ? 0.0 : 1e-12;
}

// ---------------------------------------------------------------------------
// Primitive operations

SolverState initial_state(const ProblemData& problem) {
  SolverState state;
  state.x = Eigen::VectorXd::Zero(problem.num_features());
  state.h = -problem.correlations();
  state.c = problem.response_sq_norm();
  state.epoch = 0;
  return state;
}

double objective(const ProblemData& problem, const Eigen::VectorXd& x) {
  if (x.size() != problem.num_features()) {
    throw DataError("objective: x has the wrong dimension");
  }
  const double fit = (problem.phi() * x - problem.response()).squaredNorm();
  const double ridge = problem.sigma() * problem.sigma() * x.squaredNorm();
  return std::sqrt(fit + ridge) + problem.weights().dot(x.cwiseAbs());
}

FeatureEliminationReport eliminate_features(const ProblemData& problem) {
  FeatureEliminationReport report;
  report.original_n = problem.num_features();
  for (Index i = 0; i < problem.num_features(); ++i) {
    const double lambda = problem.weights()[i];
    if (problem.augmented_sq_norm(i) < lambda * lambda) {
      report.eliminated.push_back(i);
    } else {
      report.kept.push_back(i);
    }
  }
  report.reduced_n = static_cast<Index>(report.kept.size());
  return report;
}

bool is_zero_optimal(const ProblemData& problem) {
  const double ynorm = problem.response_norm();
  const auto& q = problem.correlations();
  for (Index i = 0; i < q.size(); ++i) {
    const double bound = problem.weights()[i] * ynorm;
    const double lhs = problem.nonnegative() ? q[i] : std::abs(q[i]);
    if (lhs > bound) return false;
  }
  return true;
}

double univariate_solve(double phi_dot_y, double phi_sq, double y_sq, double lambda,
                        Constraint constraint) {
  if (!std::isfinite(phi_dot_y) || !std::isfinite(phi_sq) || !std::isfinite(y_sq) ||
      !std::isfinite(lambda)) {
    throw NumericalError("univariate_solve: non-finite argument");
  }
  if (!(phi_sq > 0.0)) throw DomainError("univariate_solve: ||phi||^2 must be positive");
  if (lambda < 0.0) throw DomainError("univariate_solve: lambda must be >= 0");
  y_sq = std::max(y_sq, 0.0);

  const double threshold = lambda * std::sqrt(y_sq);
  const bool zero = constraint == Constraint::kNonnegative ? phi_dot_y <= threshold
                                                           : std::abs(phi_dot_y) <= threshold;
  if (zero) return 0.0;

  const double x_ls = phi_dot_y / phi_sq;
  if (lambda == 0.0) return x_ls;

  const double denom = phi_sq - lambda * lambda;
  if (denom < kMinShrinkDenominator) {
    throw NumericalError(
        "univariate_solve: ||phi||^2 <= lambda^2 on the nonzero branch (rounding contradiction)");
  }
  // Cauchy-Schwarz makes this nonnegative; clamp rounding.
  const double discriminant = std::max(phi_sq * y_sq - phi_dot_y * phi_dot_y, 0.0);
  const double shrink = lambda / phi_sq * std::sqrt(discriminant / denom);
  const double x = x_ls > 0.0 ? x_ls - shrink : x_ls + shrink;
  // The shrink is analytically smaller than |x_ls|.
  if ((x > 0.0) != (x_ls > 0.0)) return 0.0;
  return x;
}

Eigen::VectorXd kernel_column(const ProblemData& problem, Index i) {
  if (i < 0 || i >= problem.num_features()) throw DataError("kernel_column: index out of range");
  Eigen::VectorXd col = problem.phi().transpose() * problem.phi().col(i);
  col[i] += problem.sigma() * problem.sigma();
  return col;
}

double coordinate_update(const ProblemData& problem, SolverState& state, Index i,
                         KernelCache* cache) {
  const double a = problem.augmented_sq_norm(i);
  if (!(a > 0.0)) return 0.0;  // zero column without ridge: coordinate has no effect
  const double xi = state.x[i];
  const double hi = state.h[i];
  const double b = a * xi - hi;
  const double y_sq = a * xi * xi + state.c - 2.0 * xi * hi;
  require_finite(b, "correlation", i);
  require_finite(y_sq, "partial residual norm", i);

  const double z = univariate_solve(b, a, y_sq, problem.weights()[i], problem.constraint());
  const double delta = z - xi;
  if (delta == 0.0) return 0.0;

  state.c = std::max(state.c + a * delta * delta + 2.0 * delta * hi, 0.0);
  require_finite(state.c, "residual norm", i);
  if (cache != nullptr) {
    state.h.noalias() += delta * cache->column(i);
  } else {
    state.h.noalias() += delta * (problem.phi().transpose() * problem.phi().col(i));
    state.h[i] += delta * problem.sigma() * problem.sigma();
  }
  state.x[i] = z;
  return delta;
}

DualCertificate dual_bound(const ProblemData& problem, const SolverState& state) {
  DualCertificate cert;
  const double penalty = problem.weights().dot(state.x.cwiseAbs());
  if (!(state.c > 0.0)) {
    cert.alpha = 1.0;
    cert.residual_norm = 0.0;
    cert.primal = penalty;
    cert.lower_bound = penalty;
    cert.gap = 0.0;
    return cert;
  }
  const double rnorm = std::sqrt(state.c);
  const auto& lambda = problem.weights();
  double alpha = 1.0;
  for (Index i = 0; i < state.h.size(); ++i) {
    const double g = state.h[i] / rnorm;  // phi~_i' u~
    const bool violated = problem.nonnegative() ? g < -lambda[i] : std::abs(g) > lambda[i];
    if (violated) alpha = std::min(alpha, lambda[i] / std::abs(g));
  }
  cert.alpha = alpha;
  cert.residual_norm = rnorm;
  cert.lower_bound =
      alpha * (problem.response_sq_norm() - state.x.dot(problem.correlations())) / rnorm;
  cert.primal = rnorm + penalty;
  cert.gap = cert.primal - cert.lower_bound;
  return cert;
}

Eigen::VectorXd materialize_dual(const ProblemData& problem, const Eigen::VectorXd& x,
                                 double alpha) {
  const Index m = problem.num_samples();
  const Index n = problem.num_features();
  Eigen::VectorXd r(m + n);
  r.head(m) = problem.phi() * x - problem.response();
  r.tail(n) = problem.sigma() * x;
  const double norm = r.norm();
  if (norm == 0.0) return Eigen::VectorXd::Zero(m + n);
  return alpha / norm * r;
}

// ---------------------------------------------------------------------------
// Coordinate descent driver

CoordinateDescent::CoordinateDescent(const ProblemData& problem, const SolverConfig& config)
    : problem_(&problem),
      state_(initial_state(problem)),
      randomized_(config.randomized_sweep),
      rng_(config.sweep_seed) {
  if (config.kernel_cache_bytes > 0) {
    cache_ = std::make_unique<KernelCache>(problem.phi(), problem.sigma(),
                                           config.kernel_cache_bytes);
  }
  order_.resize(static_cast<std::size_t>(problem.num_features()));
  std::iota(order_.begin(), order_.end(), Index{0});
}

double CoordinateDescent::run_epoch() {
  if (randomized_) std::shuffle(order_.begin(), order_.end(), rng_);
  double max_delta = 0.0;
  for (const Index i : order_) {
    max_delta = std::max(max_delta, std::abs(update(i)));
  }
  ++state_.epoch;
  return max_delta;
}

// ---------------------------------------------------------------------------
// solve

Solution solve(const ProblemData& problem, const SolverConfig& config, const TraceSink& trace) {
  config.validate();
  const Index n = problem.num_features();
  Solution sol;
  sol.x = Eigen::VectorXd::Zero(n);

  if (problem.response_sq_norm() == 0.0) {
    sol.elimination = eliminate_features(problem);
    sol.reason = StopReason::kTrivial;
    sol.converged = true;
    return sol;
  }
  if (problem.sigma() == 0.0) {
    sol.warnings.emplace_back(
        "sigma = 0: coordinate descent is only guaranteed to converge for sigma > 0");
  }

  if (config.eliminate) {
    sol.elimination = eliminate_features(problem);
  } else {
    sol.elimination.original_n = n;
    sol.elimination.reduced_n = n;
    sol.elimination.kept.resize(static_cast<std::size_t>(n));
    std::iota(sol.elimination.kept.begin(), sol.elimination.kept.end(), Index{0});
  }
  const auto& kept = sol.elimination.kept;

  std::optional<ProblemData> reduced;
  if (sol.elimination.reduced_n != n) reduced.emplace(problem.restrict_to(kept));
  const ProblemData& work = reduced ? *reduced : problem;

  CoordinateDescent cd(work, config);
  auto emit = [&](const DualCertificate& cert, double max_delta) {
    if (!trace) return;
    TraceRecord rec;
    rec.epoch = cd.state().epoch;
    rec.primal = cert.primal;
    rec.dual = cert.lower_bound;
    rec.gap = cert.gap;
    rec.support_size = (cd.state().x.array() != 0.0).count();
    rec.max_delta = max_delta;
    trace(rec);
  };

  DualCertificate cert = cd.certificate();
  emit(cert, 0.0);
  sol.reason = StopReason::kMaxEpochs;
  if (cert.gap <= config.gap_tolerance) {
    sol.reason = StopReason::kGapReached;
  } else {
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
      const double max_delta = cd.run_epoch();
      cert = cd.certificate();
      emit(cert, max_delta);
      if (cert.gap <= config.gap_tolerance) {
        sol.reason = StopReason::kGapReached;
        break;
      }
      if (max_delta <= config.stall_tolerance) {
        sol.reason = StopReason::kStalled;
        break;
      }
    }
  }

  const auto& xr = cd.state().x;
  for (std::size_t k = 0; k < kept.size(); ++k) sol.x[kept[k]] = xr[static_cast<Index>(k)];
  sol.epochs_used = cd.state().epoch;
  sol.objective = objective(problem, sol.x);
  sol.lower_bound = cert.lower_bound;
  sol.gap = sol.objective - sol.lower_bound;
  sol.converged = sol.gap <= config.gap_tolerance;

  const double thr = config.support_threshold(problem.constraint());
  for (Index i = 0; i < n; ++i) {
    const double v = problem.nonnegative() ? sol.x[i] : std::abs(sol.x[i]);
    if (v > thr) sol.support.push_back(i);
  }
  return sol;
}

}  // namespace posyid

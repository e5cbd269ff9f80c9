#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "posyid/basis.hpp"
#include "posyid/kernel_cache.hpp"

namespace posyid {

/// Selects the rsqrt-LASSO (free sign) or the nnrsqrt-LASSO (x >= 0).
enum class Constraint { kUnconstrained, kNonnegative };

/**
 * Weighted, regularized square-root LASSO instance
 *
 *   minimize  sqrt(||Phi x - y||^2 + sigma^2 ||x||^2) + lambda' |x|
 *
 * optionally subject to x >= 0. The augmented matrix [Phi; sigma I] is never
 * formed; everything is expressed through Phi, its squared column norms,
 * q = Phi' y and ||y||^2, which are computed once here.
 */
class ProblemData {
 public:
  ProblemData(std::shared_ptr<const DesignMatrix> design, Eigen::VectorXd response,
              Eigen::VectorXd weights, double sigma, Constraint constraint);

  const DesignMatrix& design() const { return *design_; }
  const std::shared_ptr<const DesignMatrix>& design_ptr() const { return design_; }
  const Eigen::MatrixXd& phi() const { return design_->columns(); }
  const Eigen::VectorXd& response() const { return response_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double sigma() const { return sigma_; }
  Constraint constraint() const { return constraint_; }
  bool nonnegative() const { return constraint_ == Constraint::kNonnegative; }

  Index num_samples() const { return design_->rows(); }
  Index num_features() const { return design_->cols(); }

  /// ||phi_i||^2 + sigma^2, the diagonal of the augmented kernel.
  double augmented_sq_norm(Index i) const {
    return design_->column_sq_norms()[i] + sigma_ * sigma_;
  }
  /// q = Phi' y (equal to the augmented correlations).
  const Eigen::VectorXd& correlations() const { return correlations_; }
  double response_sq_norm() const { return response_sq_norm_; }
  double response_norm() const { return response_norm_; }

  /// Same problem restricted to the listed columns (in that order).
  ProblemData restrict_to(std::span<const Index> columns) const;

 private:
  std::shared_ptr<const DesignMatrix> design_;
  Eigen::VectorXd response_;
  Eigen::VectorXd weights_;
  double sigma_;
  Constraint constraint_;
  Eigen::VectorXd correlations_;
  double response_sq_norm_;
  double response_norm_;
};

struct SolverConfig {
  /// Absolute duality-gap threshold.
  double gap_tolerance = 1e-6;
  int max_epochs = 100000;
  /// Support threshold; defaults to 0 (nonnegative) or 1e-12 (unconstrained).
  std::optional<double> zero_threshold;
  /// Run safe feature elimination before descent.
  bool eliminate = true;
  /// Shuffle the sweep order each epoch instead of ascending index order.
  bool randomized_sweep = false;
  std::uint64_t sweep_seed = 0;
  /// Byte budget of the kernel-column LRU cache; 0 disables caching.
  std::size_t kernel_cache_bytes = 0;
  /// An epoch whose largest |delta| is at most this ends the run.
  double stall_tolerance = 1e-12;

  void validate() const;
  double support_threshold(Constraint constraint) const;
};

/// Current iterate plus h = Phi~' r and c = ||r||^2 for r = Phi~ x - y~.
struct SolverState {
  Eigen::VectorXd x;
  Eigen::VectorXd h;
  double c = 0.0;
  int epoch = 0;
};

/// x = 0, h = -q, c = ||y||^2.
SolverState initial_state(const ProblemData& problem);

struct FeatureEliminationReport {
  std::vector<Index> kept;
  std::vector<Index> eliminated;
  Index original_n = 0;
  Index reduced_n = 0;
};

/**
 * Dual-feasible point u = alpha * r / ||r|| kept in implicit form, and the
 * lower bound d = -y~' u it certifies.
 */
struct DualCertificate {
  double alpha = 1.0;
  double residual_norm = 0.0;
  double lower_bound = 0.0;
  double primal = 0.0;
  double gap = 0.0;
};

enum class StopReason { kGapReached, kStalled, kMaxEpochs, kTrivial };

struct Solution {
  Eigen::VectorXd x;
  double objective = 0.0;
  double lower_bound = 0.0;
  double gap = 0.0;
  int epochs_used = 0;
  bool converged = false;
  StopReason reason = StopReason::kMaxEpochs;
  std::vector<Index> support;
  FeatureEliminationReport elimination;
  std::vector<std::string> warnings;
};

/// Per-epoch diagnostics.
struct TraceRecord {
  int epoch = 0;
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
  Index support_size = 0;
  double max_delta = 0.0;
};

using TraceSink = std::function<void(const TraceRecord&)>;

/// sqrt(||Phi x - y||^2 + sigma^2 ||x||^2) + lambda' |x|, evaluated from scratch.
double objective(const ProblemData& problem, const Eigen::VectorXd& x);

/// Partition into F = {i : ||phi_i||^2 + sigma^2 >= lambda_i^2} and its complement.
FeatureEliminationReport eliminate_features(const ProblemData& problem);

/// True iff x = 0 is optimal. Requires y != 0.
bool is_zero_optimal(const ProblemData& problem);

/**
 * Minimizer of ||phi x - y||_2 + lambda |x| over x (or x >= 0), given
 * phi' y, ||phi||^2 and ||y||^2.
 *
 * Returns 0 exactly when |phi' y| <= lambda ||y|| (resp. phi' y <= lambda ||y||),
 * otherwise the shrunk least-squares value, which keeps the sign of phi' y.
 */
double univariate_solve(double phi_dot_y, double phi_sq, double y_sq, double lambda,
                        Constraint constraint);

/// Column i of Phi' Phi + sigma^2 I, computed in O(mn).
Eigen::VectorXd kernel_column(const ProblemData& problem, Index i);

/**
 * Exact minimization along coordinate i, updating x, h and c in place.
 * Returns delta = x_i(new) - x_i(old). With delta == 0 the state is untouched.
 * The optional cache serves kernel columns.
 */
double coordinate_update(const ProblemData& problem, SolverState& state, Index i,
                         KernelCache* cache = nullptr);

/// Dual bound for the current iterate. ||r|| = 0 yields d = p and zero gap.
DualCertificate dual_bound(const ProblemData& problem, const SolverState& state);

/// Explicit (m + n)-vector alpha * (Phi~ x - y~) / ||Phi~ x - y~||.
Eigen::VectorXd materialize_dual(const ProblemData& problem, const Eigen::VectorXd& x,
                                 double alpha);

/**
 * Sequential coordinate descent on one (already reduced) problem.
 *
 * Exposed so that callers can observe every single update; solve() is the
 * usual entry point.
 */
class CoordinateDescent {
 public:
  CoordinateDescent(const ProblemData& problem, const SolverConfig& config);

  double update(Index i) { return coordinate_update(*problem_, state_, i, cache_.get()); }

  /// One full sweep; returns max |delta|.
  double run_epoch();

  DualCertificate certificate() const { return dual_bound(*problem_, state_); }
  const SolverState& state() const { return state_; }
  const ProblemData& problem() const { return *problem_; }

 private:
  const ProblemData* problem_;
  SolverState state_;
  std::unique_ptr<KernelCache> cache_;
  std::vector<Index> order_;
  bool randomized_;
  std::mt19937_64 rng_;
};

/**
 * Safe elimination, then coordinate descent from x = 0 until the duality gap
 * drops below the tolerance, the sweep stalls, or max_epochs is reached.
 * Running out of epochs is reported through Solution::converged, not thrown.
 */
Solution solve(const ProblemData& problem, const SolverConfig& config,
               const TraceSink& trace = {});

}  // namespace posyid

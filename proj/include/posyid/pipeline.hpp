#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "posyid/basis.hpp"
#include "posyid/model.hpp"
#include "posyid/solver.hpp"

namespace posyid {

// ---------------------------------------------------------------------------
// Data files

/// Reads a CSV with header w_1,...,w_nw,y. Errors carry the 1-based line number.
Dataset ingest(const std::filesystem::path& csv_path);
Dataset parse_dataset_csv(std::istream& in, const std::string& source_name = "<stream>");
void write_dataset_csv(const Dataset& data, const std::filesystem::path& csv_path);

// ---------------------------------------------------------------------------
// Weights

enum class WeightKind { kUniform, kColumnNorm };
enum class SigmaRule { kFractionOfGamma, kFractionOfMinLambda, kExplicit };

struct WeightScheme {
  WeightKind kind = WeightKind::kColumnNorm;
  double gamma = 1e-4;
  SigmaRule sigma_rule = SigmaRule::kFractionOfMinLambda;
  double explicit_sigma = 0.0;

  void validate() const;
  /// Rule used by "--sigma auto": gamma/10 for uniform, min lambda/10 for colnorm.
  static SigmaRule automatic_rule(WeightKind kind);
};

struct Weights {
  Eigen::VectorXd lambda;
  double sigma = 0.0;
};

/// uniform: lambda = gamma * 1; colnorm: lambda_i = gamma * ||phi_i||^2.
/// sigma follows the rule, computed after lambda.
Weights make_weights(const WeightScheme& scheme, const DesignMatrix& design);

ProblemData make_problem(std::shared_ptr<const DesignMatrix> design, const Eigen::VectorXd& y,
                         const WeightScheme& scheme, Constraint constraint);

// ---------------------------------------------------------------------------
// Pareto sweeps

struct SweepSpec {
  double gamma_min = 1e-5;
  double gamma_max = 1e-2;
  int count = 10;

  void validate() const;
  /// count values, logarithmically spaced, endpoints included.
  std::vector<double> gammas() const;
};

struct ParetoRow {
  double gamma = 0.0;
  Index cardinality = 0;
  double relative_error = 0.0;
  double gap = 0.0;
  bool converged = false;
  double wall_time = 0.0;
  std::string error;  // non-empty when this row's solve failed
};

/**
 * Solves one problem per gamma (the scheme's gamma is replaced) and returns
 * the rows sorted by gamma. Up to `jobs` solves run concurrently; a failure
 * is recorded in its row and the sweep continues.
 */
std::vector<ParetoRow> sweep(std::shared_ptr<const DesignMatrix> design, const Eigen::VectorXd& y,
                             const WeightScheme& scheme, Constraint constraint,
                             const SweepSpec& spec, const SolverConfig& config, int jobs = 1);

void write_pareto_csv(const std::vector<ParetoRow>& rows, std::ostream& out);

// ---------------------------------------------------------------------------
// Synthetic benchmark

/// psi(w) = w2^1.5 w3^3 + 2 w1^2 w3^-1 + 3 w2^3.2 + 4 w1^0.5 w2^-2 w3.
PosynomialModel example1_truth();
/// Q1 = {0, 0.5, ..., 4}, Q2 = {-2, -1.9, ..., 4}, Q3 = {-1, 0, ..., 4}.
ExponentGrid example1_grid();
/// Q_j = {-2, -1, 0, 1, 2} for four variables.
ExponentGrid example2_grid();

/**
 * m samples with w uniform on [0.2, 3.2]^3 and y = psi(w) + e, where e is
 * Gaussian with std = noise_ratio * (sample std of psi(w)). Bit-reproducible
 * for a given seed: mt19937_64 with hand-written uniform and Box-Muller maps.
 */
Dataset generate_example1(std::uint64_t seed, Index m, double noise_ratio);

// ---------------------------------------------------------------------------
// Leave-one-out validation

struct LooResult {
  std::vector<Index> validation;  // dataset rows used for validation
  std::vector<double> nu;         // |y_j - yhat_j| / ||y_LOO||
  std::vector<double> predictions;
  std::vector<bool> converged;
  double ae = 0.0;                // sqrt(sum nu_j^2)
  bool empty() const { return validation.empty(); }
};

/// Rows whose every coordinate lies in [lo + margin * range, hi - margin * range]
/// of the observed per-variable extent.
std::vector<Index> interior_points(const Dataset& data, double boundary_margin);

/// Fits on the dataset minus point j for every interior point j and scores the
/// held-out prediction. An empty validation set gives an empty result.
LooResult loo_validate(const Dataset& data, const MonomialBasis& basis, const WeightScheme& scheme,
                       Constraint constraint, double boundary_margin, const SolverConfig& config);

}  // namespace posyid

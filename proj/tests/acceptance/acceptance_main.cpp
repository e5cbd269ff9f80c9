// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.
//
// Run everything:      posyid_acceptance
// Run a subset:        posyid_acceptance 3 4

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "posyid/basis.hpp"
#include "posyid/model.hpp"
#include "posyid/pipeline.hpp"
#include "posyid/solver.hpp"

namespace {

using namespace posyid;
using Clock = std::chrono::steady_clock;

// ---------------------------------------------------------------------------
// Pinned settings

constexpr int kExample1Runs = 10;
constexpr int kExample1RequiredExact = 8;
constexpr Index kExample1Samples = 600;
constexpr double kExample1Noise = 0.01;
constexpr double kExample1Gamma = 1e-4;
constexpr double kCoefficientTolerance = 0.15;
constexpr double kValidationReLimit = 0.03;
constexpr double kRunSecondsLimit = 300.0;
constexpr int kExample1MaxEpochs = 300000;
constexpr std::size_t kExample1CacheBytes = std::size_t{64} << 20;

constexpr Index kEliminatedMin = 500;
constexpr Index kEliminatedMax = 1200;
constexpr int kReducedInstances = 20;
constexpr double kReducedRelTol = 1e-8;

constexpr int kScalarInstances = 1000;
constexpr double kScalarStep = 1e-6;
constexpr double kScalarBound = 5.0;
constexpr double kScalarTol = 2e-6;

constexpr int kOracleInstances = 50;
constexpr Index kOracleRows = 20;
constexpr Index kOracleCols = 30;
constexpr double kOracleSigma = 0.01;
constexpr long kOracleIterations = 1000000;
constexpr double kOracleStep = 0.1;
constexpr double kOracleRelTol = 1e-4;

constexpr double kWeakDualityTol = 1e-10;
constexpr double kZeroGapTol = 1e-10;
constexpr double kMonotoneTol = 1e-12;
constexpr double kStateRelTol = 1e-8;

constexpr Index kLooSamples = 200;
constexpr double kLooMargin = 0.3;
constexpr double kLooAeLimit = 0.05;

struct Outcome {
  bool pass = false;
  std::string summary;
};

double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ProblemData to_problem(const oracle::Dense& d, Constraint c) {
  return ProblemData(std::make_shared<const DesignMatrix>(d.phi), d.y, d.lambda, d.sigma, c);
}

const char* mode_name(Constraint c) {
  return c == Constraint::kNonnegative ? "nonnegative" : "free-sign";
}

// Accumulates certificate evidence from every solve made by the suite.
struct CertificateLedger {
  long solves = 0;
  long converged = 0;
  long converged_over_tolerance = 0;
  long records = 0;
  double worst_dual_excess = -std::numeric_limits<double>::infinity();

  TraceSink sink() {
    return [this](const TraceRecord& r) {
      ++records;
      worst_dual_excess = std::max(worst_dual_excess, r.dual - r.primal);
    };
  }
  void add(const Solution& sol, const SolverConfig& cfg) {
    ++solves;
    if (sol.converged) {
      ++converged;
      if (!(sol.gap <= cfg.gap_tolerance)) ++converged_over_tolerance;
    }
  }
};

CertificateLedger g_certificates;

// ---------------------------------------------------------------------------
// Example 1 datasets shared by criteria 1 and 2

struct Example1Run {
  std::uint64_t seed;
  Dataset train;
  std::shared_ptr<const DesignMatrix> design;
};

const MonomialBasis& example1_basis() {
  static const MonomialBasis basis = build_basis(example1_grid());
  return basis;
}

std::vector<Example1Run>& example1_runs() {
  static std::vector<Example1Run> runs = [] {
    std::vector<Example1Run> out;
    for (int r = 0; r < kExample1Runs; ++r) {
      const auto seed = static_cast<std::uint64_t>(r + 1);
      Dataset train = generate_example1(seed, kExample1Samples, kExample1Noise);
      auto design = std::make_shared<const DesignMatrix>(build_design_matrix(example1_basis(), train));
      out.push_back({seed, std::move(train), std::move(design)});
    }
    return out;
  }();
  return runs;
}

WeightScheme colnorm(double gamma) {
  return {WeightKind::kColumnNorm, gamma, SigmaRule::kFractionOfMinLambda, 0.0};
}

// ---------------------------------------------------------------------------
// 1. Example-1 reproduction

Outcome example1_reproduction() {
  const MonomialBasis& basis = example1_basis();
  const PosynomialModel truth = example1_truth();
  std::map<std::vector<double>, double> true_terms;
  for (const auto& t : truth.terms()) true_terms[t.exponents] = t.coefficient;

  SolverConfig cfg;
  cfg.max_epochs = kExample1MaxEpochs;
  cfg.kernel_cache_bytes = kExample1CacheBytes;

  int exact = 0, contains_truth = 0, re_ok = 0, time_ok = 0;
  for (const auto& run : example1_runs()) {
    const ProblemData problem =
        make_problem(run.design, run.train.responses(), colnorm(kExample1Gamma), Constraint::kNonnegative);
    const auto start = Clock::now();
    const Solution sol = solve(problem, cfg, g_certificates.sink());
    const double secs = seconds_since(start);
    g_certificates.add(sol, cfg);

    const PosynomialModel model =
        from_solution(basis, sol.x, cfg.support_threshold(Constraint::kNonnegative));
    std::size_t found = 0;
    double worst_coef = 0.0;
    for (const auto& term : model.terms()) {
      const auto it = true_terms.find(term.exponents);
      if (it != true_terms.end()) {
        ++found;
        worst_coef = std::max(worst_coef, std::abs(term.coefficient - it->second));
      }
    }
    const bool same_support = found == true_terms.size() && model.size() == true_terms.size();
    const bool coef_ok = same_support && worst_coef <= kCoefficientTolerance;
    const Dataset validation =
        generate_example1(run.seed + 1000, kExample1Samples, kExample1Noise);
    const double re = relative_error(model, validation);

    exact += coef_ok;
    contains_truth += found == true_terms.size();
    re_ok += re <= kValidationReLimit;
    time_ok += secs <= kRunSecondsLimit;

    // five largest terms by contribution to ||Phi x||
    std::vector<std::pair<double, Index>> contrib;
    for (const Index i : sol.support) {
      contrib.emplace_back(sol.x[i] * std::sqrt(run.design->column_sq_norms()[i]), i);
    }
    std::sort(contrib.rbegin(), contrib.rend());
    std::ostringstream top;
    for (std::size_t k = 0; k < std::min<std::size_t>(5, contrib.size()); ++k) {
      const auto a = basis.exponent(contrib[k].second);
      top << (k ? " " : "") << "(" << a[0] << "," << a[1] << "," << a[2] << "):"
          << std::setprecision(3) << sol.x[contrib[k].second];
    }
    std::printf(
        "    seed %2llu  card %3zu  true terms found %zu/4  exact %s  max|coef err| %s  "
        "val RE %.4f  gap %.2e  epochs %d  %.1f s\n      top: %s\n",
        static_cast<unsigned long long>(run.seed), sol.support.size(), found,
        same_support ? "yes" : "no ",
        found == true_terms.size() ? std::to_string(worst_coef).c_str() : "n/a", re, sol.gap,
        sol.epochs_used, secs, top.str().c_str());
  }
  const int n = kExample1Runs;
  std::ostringstream s;
  s << "exact support with coefficients within " << kCoefficientTolerance << ": " << exact << "/"
    << n << " (need " << kExample1RequiredExact << "); true terms contained: " << contains_truth
    << "/" << n << "; validation RE <= " << kValidationReLimit << ": " << re_ok << "/" << n
    << "; runtime <= " << kRunSecondsLimit << " s: " << time_ok << "/" << n;
  return {exact >= kExample1RequiredExact && re_ok == n && time_ok == n, s.str()};
}

// ---------------------------------------------------------------------------
// 2. Feature elimination

Outcome feature_elimination() {
  bool counts_ok = true;
  std::ostringstream s;
  s << "eliminated per seed:";
  for (const auto& run : example1_runs()) {
    const ProblemData problem = make_problem(run.design, run.train.responses(),
                                             colnorm(kExample1Gamma), Constraint::kNonnegative);
    const auto report = eliminate_features(problem);
    const auto removed = static_cast<Index>(report.eliminated.size());
    counts_ok = counts_ok && removed >= kEliminatedMin && removed <= kEliminatedMax &&
                report.original_n == 3294;
    s << ' ' << removed;
  }

  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> mdist(5, 15), ndist(5, 25);
  std::uniform_real_distribution<double> unit;
  double worst_rel = 0.0, worst_zero = 0.0;
  int with_elimination = 0;
  for (int rep = 0; rep < kReducedInstances; ++rep) {
    const bool nn = rep % 2 == 0;
    auto d = oracle::random_instance(rng, mdist(rng), ndist(rng), 0.3, nn, 0.02, 0.2);
    for (Index i = 0; i < d.phi.cols(); ++i) {
      if (unit(rng) < 0.3) {
        d.lambda[i] = (1.0 + unit(rng)) * std::sqrt(d.phi.col(i).squaredNorm() + d.sigma * d.sigma);
      }
    }
    const Constraint mode = nn ? Constraint::kNonnegative : Constraint::kUnconstrained;
    const ProblemData problem = to_problem(d, mode);
    SolverConfig reduced, full;
    reduced.gap_tolerance = full.gap_tolerance = 1e-11;
    reduced.stall_tolerance = full.stall_tolerance = 0.0;
    reduced.max_epochs = full.max_epochs = 1000000;
    full.eliminate = false;
    const Solution a = solve(problem, reduced, g_certificates.sink());
    const Solution b = solve(problem, full, g_certificates.sink());
    g_certificates.add(a, reduced);
    g_certificates.add(b, full);
    with_elimination += !a.elimination.eliminated.empty();
    worst_rel = std::max(worst_rel, rel_diff(a.objective, b.objective));
    for (const Index i : a.elimination.eliminated) worst_zero = std::max(worst_zero, std::abs(b.x[i]));
  }
  const bool reduced_ok = worst_rel <= kReducedRelTol && with_elimination == kReducedInstances;
  s << " (allowed " << kEliminatedMin << ".." << kEliminatedMax << "); reduced vs full on "
    << kReducedInstances << " instances: worst rel diff " << worst_rel << " (tol " << kReducedRelTol
    << "), largest full-solve |x_i| on eliminated i " << worst_zero;
  return {counts_ok && reduced_ok, s.str()};
}

// ---------------------------------------------------------------------------
// 3. Univariate closed form vs dense grid search

Outcome univariate_oracle() {
  std::mt19937_64 rng(777);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  std::uniform_int_distribution<int> dim(1, 6);
  int instances = 0, branch_mismatch = 0, value_mismatch = 0, zeros = 0;
  double worst = 0.0;
  while (instances < kScalarInstances) {
    const int d = dim(rng);
    Eigen::VectorXd phi(d), y(d);
    const double t = 2.5 * normal(rng);
    const double spread = std::exp(2.0 * normal(rng));
    for (int k = 0; k < d; ++k) phi[k] = normal(rng);
    for (int k = 0; k < d; ++k) y[k] = t * phi[k] + 0.3 * spread * normal(rng);
    const double b = phi.dot(y), a = phi.squaredNorm(), ysq = y.squaredNorm();
    if (!(a > 0.0) || !(ysq > 0.0) || std::abs(b / a) > kScalarBound - 0.1) continue;
    const double lambda = 1.3 * std::sqrt(a) * unit(rng);
    ++instances;
    for (const auto mode : {Constraint::kUnconstrained, Constraint::kNonnegative}) {
      const bool nn = mode == Constraint::kNonnegative;
      const double x = univariate_solve(b, a, ysq, lambda, mode);
      const bool zero_cond = nn ? b <= lambda * std::sqrt(ysq) : std::abs(b) <= lambda * std::sqrt(ysq);
      branch_mismatch += (x == 0.0) != zero_cond;
      zeros += x == 0.0;
      const double g = oracle::grid_minimizer(b, a, ysq, lambda, nn, kScalarBound, kScalarStep);
      const double err = std::abs(x - g);
      worst = std::max(worst, err);
      value_mismatch += !(err <= kScalarTol);
      branch_mismatch += (g == 0.0) != (x == 0.0) && err > kScalarTol;
    }
  }
  std::ostringstream s;
  s << instances << " instances x 2 modes, grid step " << kScalarStep << " on [-" << kScalarBound
    << ", " << kScalarBound << "]: worst |x - x_grid| " << worst << " (tol " << kScalarTol
    << "), value mismatches " << value_mismatch << ", zero-branch mismatches " << branch_mismatch
    << ", zero results " << zeros;
  return {value_mismatch == 0 && branch_mismatch == 0, s.str()};
}

// ---------------------------------------------------------------------------
// 4. Multivariate solve vs projected subgradient

Outcome multivariate_oracle() {
  std::mt19937_64 rng(4242);
  double worst = 0.0;
  int failures = 0, unconverged = 0;
  for (int rep = 0; rep < kOracleInstances; ++rep) {
    for (const auto mode : {Constraint::kUnconstrained, Constraint::kNonnegative}) {
      const bool nn = mode == Constraint::kNonnegative;
      const auto d = oracle::random_instance(rng, kOracleRows, kOracleCols, kOracleSigma, nn);
      SolverConfig cfg;
      cfg.max_epochs = 1000000;
      const Solution sol = solve(to_problem(d, mode), cfg, g_certificates.sink());
      g_certificates.add(sol, cfg);
      unconverged += !sol.converged;
      const double ref = oracle::projected_subgradient(d, nn, kOracleIterations, kOracleStep);
      const double rel = rel_diff(sol.objective, ref);
      worst = std::max(worst, rel);
      if (!(rel <= kOracleRelTol)) {
        ++failures;
        std::printf("    instance %d (%s): solver %.12g oracle %.12g rel %.2e\n", rep, mode_name(mode),
                    sol.objective, ref, rel);
      }
    }
  }
  std::ostringstream s;
  s << kOracleInstances << " instances x 2 modes (" << kOracleRows << "x" << kOracleCols
    << ", sigma " << kOracleSigma << ", " << kOracleIterations
    << " subgradient steps): worst rel diff " << worst << " (tol " << kOracleRelTol
    << "), over tolerance " << failures << ", unconverged solves " << unconverged;
  return {failures == 0, s.str()};
}

// ---------------------------------------------------------------------------
// 5. Certified gap

Outcome certified_gap() {
  std::mt19937_64 rng(55);
  int zero_cases = 0, zero_failures = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const bool nn = rep % 2 == 1;
    auto d = oracle::random_instance(rng, 12, 16, 0.05, nn);
    // scale the weights just past the zero-optimality threshold
    const Eigen::VectorXd corr = d.phi.transpose() * d.y;
    const double ynorm = d.y.norm();
    for (Index i = 0; i < d.phi.cols(); ++i) {
      const double need = (nn ? std::max(corr[i], 0.0) : std::abs(corr[i])) / ynorm;
      d.lambda[i] = need * (1.0 + 1e-3 * (rep % 5));
    }
    const Constraint mode = nn ? Constraint::kNonnegative : Constraint::kUnconstrained;
    const ProblemData problem = to_problem(d, mode);
    if (!is_zero_optimal(problem)) continue;
    ++zero_cases;
    SolverConfig cfg;
    const Solution sol = solve(problem, cfg, g_certificates.sink());
    g_certificates.add(sol, cfg);
    zero_failures += !(sol.x.isZero(0.0) && sol.gap <= kZeroGapTol);
  }

  // anti-correlated data: zero is optimal only with the sign constraint
  Eigen::MatrixXd phi(4, 3);
  phi << -1, -0.5, -2, -1, 0, -0.1, -0.2, -1, -1, -3, -0.4, -0.5;
  oracle::Dense neg{phi, Eigen::Vector4d(1, 2, 1, 1), Eigen::Vector3d::Constant(0.01), 0.01};
  const ProblemData nn_problem = to_problem(neg, Constraint::kNonnegative);
  if (is_zero_optimal(nn_problem)) {
    ++zero_cases;
    SolverConfig cfg;
    const Solution sol = solve(nn_problem, cfg, g_certificates.sink());
    g_certificates.add(sol, cfg);
    zero_failures += !(sol.x.isZero(0.0) && sol.gap <= kZeroGapTol);
  } else {
    ++zero_failures;
  }

  const auto& c = g_certificates;
  std::ostringstream s;
  s << c.solves << " solves (" << c.converged << " converged, " << c.converged_over_tolerance
    << " converged with gap > tol), " << c.records << " trace records, max (d - p) "
    << c.worst_dual_excess << " (tol " << kWeakDualityTol << "); zero-optimal cases "
    << zero_cases << ", failures " << zero_failures;
  const bool ok = c.solves > 0 && c.converged_over_tolerance == 0 &&
                  c.worst_dual_excess <= kWeakDualityTol && zero_cases >= 20 && zero_failures == 0;
  return {ok, s.str()};
}

// ---------------------------------------------------------------------------
// 6. Monotone descent and incremental state

struct StateAudit {
  long updates = 0;
  long epochs = 0;
  double worst_increase = -std::numeric_limits<double>::infinity();
  double worst_c = 0.0;
  double worst_h = 0.0;
  bool sign_ok = true;
};

void audit_run(const ProblemData& problem, int epochs, StateAudit& audit) {
  const oracle::Dense dense{problem.phi(), problem.response(), problem.weights(), problem.sigma()};
  SolverConfig cfg;
  CoordinateDescent cd(problem, cfg);
  double prev = oracle::objective(dense, cd.state().x);
  for (int e = 0; e < epochs; ++e) {
    for (Index i = 0; i < problem.num_features(); ++i) {
      const double delta = cd.update(i);
      ++audit.updates;
      if (delta == 0.0) continue;
      const double now = oracle::objective(dense, cd.state().x);
      audit.worst_increase = std::max(audit.worst_increase, now - prev);
      prev = now;
      if (problem.nonnegative() && cd.state().x.minCoeff() < 0.0) audit.sign_ok = false;
    }
    ++audit.epochs;
    const auto ref = oracle::residual(dense, cd.state().x);
    audit.worst_c = std::max(audit.worst_c, std::abs(cd.state().c - ref.c) / ref.c);
    audit.worst_h = std::max(audit.worst_h, (cd.state().h - ref.h).norm() / ref.h.norm());
  }
}

Outcome monotone_state() {
  StateAudit audit;
  std::mt19937_64 rng(66);
  for (int rep = 0; rep < 20; ++rep) {
    const bool nn = rep % 2 == 0;
    const auto d = oracle::random_instance(rng, 20, 30, 0.01, nn);
    audit_run(to_problem(d, nn ? Constraint::kNonnegative : Constraint::kUnconstrained), 200, audit);
  }
  const auto& run = example1_runs().front();
  const ProblemData full = make_problem(run.design, run.train.responses(), colnorm(kExample1Gamma),
                                        Constraint::kNonnegative);
  const auto report = eliminate_features(full);
  audit_run(full.restrict_to(report.kept), 100, audit);

  std::ostringstream s;
  s << audit.updates << " updates over " << audit.epochs
    << " epochs (20 random instances, one Example-1 problem): max objective increase "
    << audit.worst_increase << " (tol " << kMonotoneTol << "), max rel drift c " << audit.worst_c
    << ", h " << audit.worst_h << " (tol " << kStateRelTol << ")"
    << (audit.sign_ok ? "" : ", NEGATIVE ENTRY in nonnegative mode");
  return {audit.worst_increase <= kMonotoneTol && audit.worst_c <= kStateRelTol &&
              audit.worst_h <= kStateRelTol && audit.sign_ok,
          s.str()};
}

// ---------------------------------------------------------------------------
// 7. Uniform weights and leave-one-out machinery

Outcome loo_machinery() {
  bool weights_ok = true;
  {
    const DesignMatrix design(Eigen::MatrixXd::Constant(3, 4, 2.0));
    for (const double gamma : {1e-3, 785.0, 1438.0}) {
      const Weights w =
          make_weights({WeightKind::kUniform, gamma, SigmaRule::kFractionOfGamma, 0.0}, design);
      weights_ok = weights_ok && (w.lambda.array() == gamma).all() && w.sigma == gamma / 10.0;
    }
  }

  // exact-recovery regime: noiseless data, column-norm weights
  const Dataset data = generate_example1(31, kLooSamples, 0.0);
  SolverConfig cfg;
  cfg.kernel_cache_bytes = kExample1CacheBytes;
  const auto start = Clock::now();
  const LooResult res = loo_validate(data, example1_basis(), colnorm(kExample1Gamma),
                                     Constraint::kNonnegative, kLooMargin, cfg);
  const double secs = seconds_since(start);
  double sum = 0.0;
  for (const double nu : res.nu) sum += nu * nu;
  const bool ae_identity = !res.empty() && res.ae == std::sqrt(sum) &&
                           std::abs(res.ae * res.ae - sum) <= 4.0 * sum * 0x1p-52;

  // the same bookkeeping with uniform weights on a small dictionary
  const MonomialBasis small = build_basis(ExponentGrid({{0.0, 0.5, 2.0}, {-2.0, 0.0, 1.5, 3.2}, {-1.0, 0.0, 1.0, 3.0}}));
  const Dataset noisy = generate_example1(32, 60, 0.01);
  const LooResult uni = loo_validate(noisy, small, {WeightKind::kUniform, 1e-2, SigmaRule::kFractionOfGamma, 0.0},
                                     Constraint::kNonnegative, 0.1, SolverConfig{});
  double usum = 0.0;
  for (const double nu : uni.nu) usum += nu * nu;
  const bool uni_identity = !uni.empty() && uni.ae == std::sqrt(usum);

  std::ostringstream s;
  s << "uniform weights lambda = gamma, sigma = gamma/10: " << (weights_ok ? "ok" : "WRONG")
    << "; AE^2 = sum nu^2: " << (ae_identity && uni_identity ? "ok" : "WRONG")
    << "; noiseless Example-1 LOO (m " << kLooSamples << ", margin " << kLooMargin << ", "
    << res.validation.size() << " held-out points, " << secs << " s): AE " << res.ae
    << " (limit " << kLooAeLimit << "); uniform-weight LOO AE " << uni.ae << " over "
    << uni.validation.size() << " points";
  return {weights_ok && ae_identity && uni_identity && !res.empty() && res.ae <= kLooAeLimit,
          s.str()};
}

}  // namespace

int main(int argc, char** argv) {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // 5 runs last: it also audits the certificates of every earlier solve
  const std::vector<Criterion> criteria = {
      {1, "Example-1 reproduction", example1_reproduction},
      {2, "feature elimination", feature_elimination},
      {3, "univariate oracle equivalence", univariate_oracle},
      {4, "multivariate oracle equivalence", multivariate_oracle},
      {6, "monotone descent and state consistency", monotone_state},
      {7, "uniform weights and leave-one-out", loo_machinery},
      {5, "certified gap", certified_gap},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

  std::map<int, std::pair<const char*, Outcome>> results;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = Clock::now();
    std::printf("[%d] %s ...\n", c.id, c.name);
    std::fflush(stdout);
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("    (%.1f s)\n", seconds_since(start));
    std::fflush(stdout);
    results[c.id] = {c.name, o};
  }

  std::printf("\n");
  int failed = 0;
  for (const auto& [id, entry] : results) {
    const auto& [name, o] = entry;
    std::printf("%s [%d] %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.summary.c_str());
    failed += !o.pass;
  }
  std::printf("\n%zu criteria, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}

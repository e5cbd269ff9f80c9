// posyid: sparse posynomial identification from input-output data.
//
// Subcommands: fit, sweep, eliminate, eval, loo, gen-example1.
// Exit codes: 0 success, 1 usage/config error, 2 data error,
//             3 unconverged fit (fit only, unless --allow-unconverged).

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "posyid/basis.hpp"
#include "posyid/errors.hpp"
#include "posyid/grid_file.hpp"
#include "posyid/model.hpp"
#include "posyid/pipeline.hpp"
#include "posyid/solver.hpp"

namespace {

using namespace posyid;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitUnconverged = 3;

struct CommonOptions {
  std::string data;
  std::string grid;
  double gamma = 1e-4;
  std::string weights = "colnorm";
  std::string sigma = "auto";
  bool unconstrained = false;
  double tol = 1e-6;
  int max_epochs = 100000;
  double kernel_cache_mb = 0.0;
  bool randomized = false;
  std::uint64_t sweep_seed = 0;
};

void add_problem_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--data", o.data, "CSV with header w_1,...,w_nw,y")->required();
  cmd->add_option("--grid", o.grid, "JSON exponent grid")->required();
  cmd->add_option("--gamma", o.gamma, "regularization weight gamma")->capture_default_str();
  cmd->add_option("--weights", o.weights, "weight scheme")
      ->check(CLI::IsMember({"uniform", "colnorm"}))
      ->capture_default_str();
  cmd->add_option("--sigma", o.sigma,
                  "'auto' (gamma/10 for uniform, min lambda/10 for colnorm) or a value")
      ->capture_default_str();
  cmd->add_flag("--unconstrained", o.unconstrained,
                "solve the free-sign problem instead of x >= 0");
}

void add_solver_options(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--tol", o.tol, "absolute duality-gap tolerance")->capture_default_str();
  cmd->add_option("--max-epochs", o.max_epochs, "epoch limit")->capture_default_str();
  cmd->add_option("--kernel-cache-mb", o.kernel_cache_mb,
                  "kernel-column cache budget in MiB (0 = recompute)")
      ->capture_default_str();
  cmd->add_flag("--randomized-sweep", o.randomized, "shuffle coordinates every epoch");
  cmd->add_option("--sweep-seed", o.sweep_seed, "seed for --randomized-sweep");
}

WeightScheme scheme_from(const CommonOptions& o) {
  WeightScheme s;
  s.kind = o.weights == "uniform" ? WeightKind::kUniform : WeightKind::kColumnNorm;
  s.gamma = o.gamma;
  if (o.sigma == "auto") {
    s.sigma_rule = WeightScheme::automatic_rule(s.kind);
  } else {
    s.sigma_rule = SigmaRule::kExplicit;
    try {
      std::size_t used = 0;
      s.explicit_sigma = std::stod(o.sigma, &used);
      if (used != o.sigma.size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw ConfigError("--sigma must be 'auto' or a number, got '" + o.sigma + "'");
    }
  }
  s.validate();
  return s;
}

SolverConfig config_from(const CommonOptions& o) {
  SolverConfig c;
  c.gap_tolerance = o.tol;
  c.max_epochs = o.max_epochs;
  c.kernel_cache_bytes = static_cast<std::size_t>(o.kernel_cache_mb * 1024.0 * 1024.0);
  c.randomized_sweep = o.randomized;
  c.sweep_seed = o.sweep_seed;
  c.validate();
  return c;
}

Constraint constraint_from(const CommonOptions& o) {
  return o.unconstrained ? Constraint::kUnconstrained : Constraint::kNonnegative;
}

struct Loaded {
  Dataset data;
  MonomialBasis basis;
  std::shared_ptr<const DesignMatrix> design;
};

Loaded load_inputs(const CommonOptions& o) {
  Dataset data = ingest(o.data);
  MonomialBasis basis = build_basis(load_grid(o.grid));
  auto design = std::make_shared<const DesignMatrix>(build_design_matrix(basis, data));
  return {std::move(data), std::move(basis), std::move(design)};
}

void print_terms(const MonomialBasis& basis, const Eigen::VectorXd& x,
                 const std::vector<Index>& support) {
  std::cout << "terms:\n";
  for (const Index i : support) {
    std::cout << "  [" << i << "] " << x[i] << " *";
    for (Index j = 0; j < basis.num_variables(); ++j) {
      const double a = basis.exponents()(i, j);
      if (a != 0.0) std::cout << " w_" << j + 1 << "^" << a;
    }
    std::cout << '\n';
  }
}

int run_fit(const CommonOptions& o, const std::string& out, const std::string& trace_path,
            bool allow_unconverged) {
  const WeightScheme scheme = scheme_from(o);
  const SolverConfig config = config_from(o);
  const Loaded in = load_inputs(o);
  const ProblemData problem =
      make_problem(in.design, in.data.responses(), scheme, constraint_from(o));

  std::ofstream trace_file;
  TraceSink sink;
  if (!trace_path.empty()) {
    trace_file.open(trace_path);
    if (!trace_file) throw DataError("cannot write trace file " + trace_path);
    trace_file << std::setprecision(std::numeric_limits<double>::max_digits10);
    trace_file << "epoch,primal,dual,gap,support_size,max_delta\n";
    sink = [&trace_file](const TraceRecord& r) {
      trace_file << r.epoch << ',' << r.primal << ',' << r.dual << ',' << r.gap << ','
                 << r.support_size << ',' << r.max_delta << '\n';
    };
  }

  const auto start = std::chrono::steady_clock::now();
  const Solution sol = solve(problem, config, sink);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (const auto& w : sol.warnings) std::cerr << "warning: " << w << '\n';

  std::cout << std::setprecision(10);
  std::cout << "samples: " << in.data.size() << "  monomials: " << in.basis.size() << '\n'
            << "eliminated: " << sol.elimination.eliminated.size()
            << "  kept: " << sol.elimination.reduced_n << '\n'
            << "objective: " << sol.objective << "  lower bound: " << sol.lower_bound
            << "  gap: " << sol.gap << '\n'
            << "epochs: " << sol.epochs_used << "  converged: " << (sol.converged ? "yes" : "no")
            << "  time: " << seconds << " s\n"
            << "cardinality: " << sol.support.size()
            << "  relative error: " << relative_error(*in.design, sol.x, in.data.responses())
            << '\n';
  print_terms(in.basis, sol.x, sol.support);

  if (!out.empty()) {
    save_model(from_solution(in.basis, sol.x, config.support_threshold(problem.constraint())),
               out);
    std::cout << "model written to " << out << '\n';
  }
  if (!sol.converged && !allow_unconverged) {
    std::cerr << "error: not converged (gap " << sol.gap << " > " << config.gap_tolerance
              << ")\n";
    return kExitUnconverged;
  }
  return kExitOk;
}

int run_sweep(const CommonOptions& o, const SweepSpec& spec, int jobs, const std::string& out) {
  const WeightScheme scheme = scheme_from(o);
  const SolverConfig config = config_from(o);
  spec.validate();
  const Loaded in = load_inputs(o);
  const auto rows =
      sweep(in.design, in.data.responses(), scheme, constraint_from(o), spec, config, jobs);

  if (out.empty()) {
    write_pareto_csv(rows, std::cout);
  } else {
    std::ofstream file(out);
    if (!file) throw DataError("cannot write " + out);
    write_pareto_csv(rows, file);
    std::cout << std::setw(14) << "gamma" << std::setw(8) << "card" << std::setw(14) << "RE"
              << std::setw(14) << "gap" << std::setw(6) << "conv" << std::setw(10) << "time"
              << '\n';
    for (const auto& r : rows) {
      std::cout << std::setw(14) << r.gamma << std::setw(8) << r.cardinality << std::setw(14)
                << r.relative_error << std::setw(14) << r.gap << std::setw(6)
                << (r.converged ? "yes" : "no") << std::setw(10) << std::setprecision(3)
                << r.wall_time << std::setprecision(6);
      if (!r.error.empty()) std::cout << "  error: " << r.error;
      std::cout << '\n';
    }
    std::cout << "pareto curve written to " << out << '\n';
  }
  return kExitOk;
}

int run_eliminate(const CommonOptions& o, bool list_indices) {
  const WeightScheme scheme = scheme_from(o);
  const Loaded in = load_inputs(o);
  const ProblemData problem =
      make_problem(in.design, in.data.responses(), scheme, constraint_from(o));
  const auto report = eliminate_features(problem);
  std::cout << "original: " << report.original_n << "\nkept: " << report.reduced_n
            << "\neliminated: " << report.eliminated.size() << '\n'
            << "x = 0 optimal: " << (is_zero_optimal(problem) ? "yes" : "no") << '\n';
  if (list_indices) {
    std::cout << "kept indices:";
    for (const Index i : report.kept) std::cout << ' ' << i;
    std::cout << '\n';
  }
  return kExitOk;
}

int run_eval(const std::string& model_path, const std::string& data_path) {
  const PosynomialModel model = load_model(model_path);
  const Dataset data = ingest(data_path);
  if (data.num_variables() != model.num_variables()) {
    throw DataError("model and data have different input dimensions");
  }
  std::cout << std::setprecision(10) << "terms: " << model.size() << "\nrelative error: "
            << relative_error(model, data) << '\n';
  return kExitOk;
}

int run_loo(const CommonOptions& o, double margin) {
  const WeightScheme scheme = scheme_from(o);
  const SolverConfig config = config_from(o);
  const Dataset data = ingest(o.data);
  const MonomialBasis basis = build_basis(load_grid(o.grid));
  const LooResult res = loo_validate(data, basis, scheme, constraint_from(o), margin, config);
  if (res.empty()) {
    std::cout << "validation set is empty for margin " << margin << '\n';
    return kExitOk;
  }
  std::cout << std::setprecision(8) << "validation points: " << res.validation.size() << " of "
            << data.size() << '\n'
            << "row,y,prediction,nu,converged\n";
  for (std::size_t t = 0; t < res.validation.size(); ++t) {
    const Index j = res.validation[t];
    std::cout << j + 1 << ',' << data.responses()[j] << ',' << res.predictions[t] << ','
              << res.nu[t] << ',' << (res.converged[t] ? 1 : 0) << '\n';
  }
  std::cout << "AE: " << res.ae << '\n';
  return kExitOk;
}

int run_gen_example1(Index m, double noise, std::uint64_t seed, const std::string& out) {
  const Dataset data = generate_example1(seed, m, noise);
  write_dataset_csv(data, out);
  std::cout << "wrote " << data.size() << " samples to " << out << " (seed " << seed
            << ", noise ratio " << noise << ")\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"posyid: sparse identification of posynomial models"};
  app.require_subcommand(1);

  CommonOptions fit_opts;
  std::string fit_out, fit_trace;
  bool allow_unconverged = false;
  auto* fit = app.add_subcommand("fit", "identify a model at one gamma");
  add_problem_options(fit, fit_opts);
  add_solver_options(fit, fit_opts);
  fit->add_option("--out", fit_out, "write the model JSON here");
  fit->add_option("--trace", fit_trace, "write per-epoch diagnostics CSV here");
  fit->add_flag("--allow-unconverged", allow_unconverged, "exit 0 even if the gap is not met");

  CommonOptions sweep_opts;
  SweepSpec spec;
  int jobs = 1;
  std::string sweep_out;
  auto* sw = app.add_subcommand("sweep", "trace the Pareto curve over log-spaced gamma");
  add_problem_options(sw, sweep_opts);
  add_solver_options(sw, sweep_opts);
  sw->add_option("--gamma-min", spec.gamma_min)->capture_default_str();
  sw->add_option("--gamma-max", spec.gamma_max)->capture_default_str();
  sw->add_option("--count", spec.count)->capture_default_str();
  sw->add_option("--jobs", jobs, "concurrent solves")->capture_default_str();
  sw->add_option("--out", sweep_out, "pareto.csv path (default: stdout)");

  CommonOptions elim_opts;
  bool list_indices = false;
  auto* elim = app.add_subcommand("eliminate", "report safe feature elimination");
  add_problem_options(elim, elim_opts);
  elim->add_flag("--indices", list_indices, "list the kept column indices");

  std::string eval_model, eval_data;
  auto* ev = app.add_subcommand("eval", "relative error of a model on a dataset");
  ev->add_option("--model", eval_model)->required();
  ev->add_option("--data", eval_data)->required();

  CommonOptions loo_opts;
  double margin = 0.075;
  auto* loo = app.add_subcommand("loo", "leave-one-out validation");
  add_problem_options(loo, loo_opts);
  add_solver_options(loo, loo_opts);
  loo->add_option("--margin", margin, "fraction of each range excluded at both ends")
      ->capture_default_str();

  Index gen_m = 600;
  double gen_noise = 0.01;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-example1", "generate the synthetic benchmark dataset");
  gen->add_option("--m", gen_m)->capture_default_str();
  gen->add_option("--noise", gen_noise, "noise-to-signal std ratio")->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out", gen_out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit) return run_fit(fit_opts, fit_out, fit_trace, allow_unconverged);
    if (*sw) return run_sweep(sweep_opts, spec, jobs, sweep_out);
    if (*elim) return run_eliminate(elim_opts, list_indices);
    if (*ev) return run_eval(eval_model, eval_data);
    if (*loo) return run_loo(loo_opts, margin);
    if (*gen) return run_gen_example1(gen_m, gen_noise, gen_seed, gen_out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <thread>

#include "posyid/errors.hpp"
#include "posyid/pipeline.hpp"

namespace posyid {

void SweepSpec::validate() const {
  if (!(gamma_min > 0.0) || !(gamma_max > gamma_min) || !std::isfinite(gamma_max)) {
    throw ConfigError("sweep needs 0 < gamma_min < gamma_max");
  }
  if (count < 2) throw ConfigError("sweep needs at least two gamma values");
}

std::vector<double> SweepSpec::gammas() const {
  validate();
  std::vector<double> out(static_cast<std::size_t>(count));
  const double lo = std::log10(gamma_min);
  const double hi = std::log10(gamma_max);
  for (int k = 0; k < count; ++k) {
    out[static_cast<std::size_t>(k)] = std::pow(10.0, lo + (hi - lo) * k / (count - 1));
  }
  out.front() = gamma_min;
  out.back() = gamma_max;
  return out;
}

std::vector<ParetoRow> sweep(std::shared_ptr<const DesignMatrix> design, const Eigen::VectorXd& y,
                             const WeightScheme& scheme, Constraint constraint,
                             const SweepSpec& spec, const SolverConfig& config, int jobs) {
  const auto gammas = spec.gammas();
  std::vector<ParetoRow> rows(gammas.size());

  auto run_row = [&](std::size_t k) {
    ParetoRow& row = rows[k];
    row.gamma = gammas[k];
    const auto start = std::chrono::steady_clock::now();
    try {
      WeightScheme s = scheme;
      s.gamma = gammas[k];
      const ProblemData problem = make_problem(design, y, s, constraint);
      const Solution sol = solve(problem, config);
      row.cardinality = static_cast<Index>(sol.support.size());
      row.relative_error = relative_error(*design, sol.x, y);
      row.gap = sol.gap;
      row.converged = sol.converged;
    } catch (const std::exception& e) {
      row.error = e.what();
      row.relative_error = std::numeric_limits<double>::quiet_NaN();
      row.gap = std::numeric_limits<double>::quiet_NaN();
    }
    row.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  const auto workers =
      static_cast<std::size_t>(std::clamp<int>(jobs, 1, static_cast<int>(gammas.size())));
  if (workers == 1) {
    for (std::size_t k = 0; k < rows.size(); ++k) run_row(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) run_row(k);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::sort(rows.begin(), rows.end(),
            [](const ParetoRow& a, const ParetoRow& b) { return a.gamma < b.gamma; });
  return rows;
}

void write_pareto_csv(const std::vector<ParetoRow>& rows, std::ostream& out) {
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << "gamma,cardinality,relative_error,gap,converged,wall_time_s\n";
  for (const auto& r : rows) {
    out << r.gamma << ',' << r.cardinality << ',' << r.relative_error << ',' << r.gap << ','
        << (r.converged ? 1 : 0) << ',' << r.wall_time << '\n';
  }
  out.precision(old_precision);
}

}  // namespace posyid

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "fastloc/eigensolver.hpp"
#include "fastloc/landscape.hpp"
#include "fastloc/operators.hpp"
#include "fastloc/smoothing.hpp"
#include "fastloc/stats.hpp"

namespace fastloc {

/// Predictor 1/u from the landscape of `op` (defaults to the experiment operator).
struct LandscapeMethod {
  std::optional<OperatorKind> op;
};

struct Method {
  std::variant<LandscapeMethod, FilterKind> kind;

  /// "landscape", "heat", "gauss" or "box".
  std::string name() const;
  /// Parameter column: t, box halfwidth, or the landscape operator.
  std::string param(const OperatorKind& experiment_op) const;
};

struct ExperimentConfig {
  GridShape grid = GridShape::lattice(128);
  OperatorKind op = DiscreteLaplacian{};
  double vmax = 1.0;
  int instances = 20;
  std::uint64_t seed_base = 1;
  std::vector<Method> methods;
  int k_minima = 16;
  int pool = 64;
  double radius_in_h = 5.0;
  int eig_m = 48;
  double eig_tol = 1e-6;
  int eig_max_iterations = 1000;
  double landscape_tol = 1e-10;
  int landscape_max_iterations = 0;
  PositivityPolicy positivity = PositivityPolicy::Error;
  bool many_to_one = false;
  int workers = 1;
  bool heatmaps = false;
  std::filesystem::path output;

  void validate() const;
};

/// Reads the JSON schema documented in README.md. Missing keys keep defaults.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

struct MethodOutcome {
  std::string method;
  std::string param;
  StatsRecord stats;
};

struct LpRow {
  std::string method;
  std::string param;
  double l1 = 0.0, l2 = 0.0, linf = 0.0;
};

/// Pointwise check |phi_j| <= lambda_j u ||phi_j||_inf (1 + 1e-6).
struct BoundCheck {
  int pairs_checked = 0;
  long violations = 0;
  /// max over j, x of |phi_j(x)| / (lambda_j u(x) ||phi_j||_inf).
  double max_ratio = 0.0;
};

struct InstanceResult {
  int index = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  std::vector<MethodOutcome> outcomes;
  std::vector<LpRow> lp;
  std::optional<BoundCheck> bound;
  int eig_iterations = 0;
};

struct AggregateRow {
  std::string method;
  std::string param;
  StatsSummary summary;
};

struct ExperimentResult {
  std::vector<InstanceResult> instances;
  std::vector<AggregateRow> aggregate;
  std::vector<LpRow> lp_mean;
  int failed = 0;
};

/// Replaceable solver entry points; tests count calls through these.
struct ExperimentSolvers {
  std::function<EigenSet(const SchrodingerOperator&, int, const EigenOptions&)> eigensolve =
      [](const SchrodingerOperator& op, int m, const EigenOptions& o) { return smallest_eigenpairs(op, m, o); };
  std::function<LandscapeResult(const SchrodingerOperator&, const LandscapeOptions&)> landscape =
      [](const SchrodingerOperator& op, const LandscapeOptions& o) { return solve_landscape(op, o); };
};

BoundCheck check_landscape_bound(const EigenSet& eigs, const ScalarField& u);

/// Runs every instance (in parallel across `workers` threads) and, when
/// config.output is set, writes instances.csv, lp.csv, bound.csv,
/// failures.csv, aggregate.csv and aggregate_lp.csv there. Results do not
/// depend on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentSolvers& solvers = {});

/// Merges aggregate.csv files into one table: vmax, operator, method, param,
/// EigRat, FirstMissEig, FirstMissMin, DismissedMin.
std::string sweep_report(const std::vector<std::filesystem::path>& aggregate_csvs);

/// RFC-4180 quoting for a single CSV field.
std::string csv_field(const std::string& s);

}  // namespace fastloc

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "fastloc/eigensolver.hpp"
#include "fastloc/experiment.hpp"
#include "fastloc/field_io.hpp"
#include "fastloc/heatmap.hpp"
#include "fastloc/landscape.hpp"
#include "fastloc/smoothing.hpp"
#include "fastloc/stats.hpp"

using namespace fastloc;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

struct GridFlags {
  int n = 128;
  std::string convention = "lattice";

  void add(CLI::App* app) {
    app->add_option("--n", n, "grid points per side")->check(CLI::Range(4, 1 << 15));
    app->add_option("--h-convention", convention, "mesh size convention: domain (h=1/n) or lattice (h=1)")
        ->check(CLI::IsMember({"domain", "lattice"}));
  }
  GridShape shape() const { return GridShape(n, parse_unit_convention(convention)); }
};

int run_generate(const GridFlags& g, double vmax, std::uint64_t seed, const fs::path& out) {
  write_field(out, make_potential({vmax, seed}, g.shape()));
  return 0;
}

int run_smooth(const fs::path& in, const std::string& filter, const std::vector<double>& ts, const std::vector<int>& ws,
               const std::string& op, const fs::path& out) {
  const auto V = read_field(in);
  const auto kind = parse_operator(op);
  validate(kind);
  const auto symbol = operator_symbol(kind, V.shape());
  std::vector<FilterKind> filters;
  if (filter == "box") {
    if (ws.empty()) throw Error("smooth: box needs --w");
    for (int w : ws) filters.push_back(Box{w});
  } else {
    if (ts.empty()) throw Error("smooth: " + filter + " needs --t");
    for (double t : ts) filters.push_back(filter == "heat" ? FilterKind{AveragedHeat{t}} : FilterKind{Gaussian{t}});
  }
  if (filters.size() == 1) {
    write_field(out, smooth_potential(V, filter_symbol(filters[0], symbol)));
    return 0;
  }
  fs::create_directories(out);
  for (const auto& f : filters) {
    std::string name = to_string(f);
    std::replace(name.begin(), name.end(), ':', '_');
    write_field(out / (name + ".lsf"), smooth_potential(V, filter_symbol(f, symbol)));
  }
  return 0;
}

int run_landscape(const fs::path& in, const std::string& op, double tol, bool effective, const std::string& positivity,
                  const fs::path& out) {
  const auto V = read_field(in);
  const auto kind = parse_operator(op);
  validate(kind);
  LandscapeOptions o;
  o.tol = tol;
  const auto res = solve_landscape(kind, V, o);
  std::fprintf(stderr, "landscape: %d iterations, residual %.3g\n", res.iterations, res.residual_inf);
  if (effective)
    write_field(out, effective_potential(res, positivity == "clamp" ? PositivityPolicy::Clamp : PositivityPolicy::Error));
  else
    write_field(out, res.u);
  return 0;
}

int run_eigs(const fs::path& in, const std::string& op, int m, double tol, std::uint64_t seed, int max_it,
             const fs::path& out) {
  const auto V = read_field(in);
  const auto kind = parse_operator(op);
  validate(kind);
  EigenOptions o;
  o.tol = tol;
  o.seed = seed;
  o.max_iterations = max_it;
  const auto eigs = smallest_eigenpairs(kind, V, m, o);
  std::fprintf(stderr, "eigs: %zu pairs in %d iterations\n", eigs.size(), eigs.iterations);
  write_eigenset(out, eigs);
  return 0;
}

int run_localize(const fs::path& predictor, const fs::path& eigs_dir, int k, int pool, double radius, bool many_to_one,
                 const fs::path& out) {
  const auto f = read_field(predictor);
  const auto eigs = read_eigenset(eigs_dir);
  const auto minima = find_local_minima(f, k, predictor.stem().string());
  const auto matching = match(minima, eigs, {radius, pool, many_to_one});
  const auto r = evaluate(matching, eigs);
  auto os = open_out(out);
  os << "source,k,eig_rat,first_miss_eig,first_miss_min,dismissed_min,n_matched\n";
  os << csv_field(minima.source) << ',' << minima.size() << ',' << (r.eig_rat ? fmt(*r.eig_rat) : "") << ','
     << r.first_miss_eig << ',' << r.first_miss_min << ',' << r.dismissed_min << ',' << r.n_matched << '\n';
  os << "\nrank,x,y,value,eigen_index\n";
  for (std::size_t i = 0; i < minima.size(); ++i) {
    const auto& e = minima.entries[i];
    os << i + 1 << ',' << e.location.x << ',' << e.location.y << ',' << fmt(e.value) << ','
       << (matching.assignments[i] ? std::to_string(*matching.assignments[i] + 1) : "") << '\n';
  }
  return 0;
}

int run_profile_kernel(int d, const std::vector<double>& ts, double rmax, int points, const fs::path& out) {
  if (points < 2) throw Error("profile-kernel: need at least 2 points");
  if (!(rmax > 0.0)) throw Error("profile-kernel: rmax must be positive");
  auto os = open_out(out);
  os << "t,r,k\n";
  for (double t : ts)
    for (int i = 0; i < points; ++i) {
      // d = 2 is singular at the origin, so start one step out
      const double r = d == 2 ? rmax * (i + 1) / points : rmax * i / (points - 1);
      os << fmt(t) << ',' << fmt(r) << ',' << fmt(kernel_profile(d, t, r)) << '\n';
    }
  return 0;
}

int run_heatmap(const fs::path& in, int minima, const fs::path& eigs_dir, int centers, const fs::path& out) {
  const auto f = read_field(in);
  std::vector<GridPoint> marks, cs;
  if (minima > 0)
    for (const auto& e : find_local_minima(f, minima).entries) marks.push_back(e.location);
  if (!eigs_dir.empty()) {
    const auto eigs = read_eigenset(eigs_dir);
    for (std::size_t j = 0; j < eigs.size() && int(j) < centers; ++j) cs.push_back(eigs.pairs[j].center);
  }
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  render_heatmap(f, out, marks, cs);
  return 0;
}

int run_experiment_cmd(const fs::path& config_path, CLI::App* sub, const GridFlags& g, double vmax,
                       const std::vector<double>& ts, const std::string& op, std::uint64_t seed, int instances,
                       int workers, const fs::path& out) {
  nlohmann::json j = nlohmann::json::object();
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw Error("cannot open config '" + config_path.string() + "'");
    j = nlohmann::json::parse(in);
  }
  if (sub->count("--n")) j["n"] = g.n;
  if (sub->count("--h-convention")) j["convention"] = g.convention;
  if (sub->count("--vmax")) j["vmax"] = vmax;
  if (sub->count("--operator")) j["operator"] = op;
  if (sub->count("--seed")) j["seed_base"] = seed;
  if (sub->count("--instances")) j["instances"] = instances;
  if (sub->count("--workers")) j["workers"] = workers;
  if (sub->count("--out")) j["output"] = out.string();
  if (sub->count("--t")) {
    if (!j.contains("methods")) j["methods"] = nlohmann::json::array({{{"type", "landscape"}}, {{"type", "heat"}}});
    for (auto& m : j["methods"])
      if (m.at("type") == "heat" || m.at("type") == "gauss") m["t"] = ts;
  }
  auto config = config_from_json(j);
  if (config.output.empty()) throw Error("experiment: no output directory (set \"output\" or --out)");
  const auto res = run_experiment(config);
  std::printf("%-10s %-10s %10s %13s %13s %13s\n", "method", "param", "EigRat", "FirstMissEig", "FirstMissMin",
              "DismissedMin");
  for (const auto& a : res.aggregate)
    std::printf("%-10s %-10s %10.6f %13.4f %13.4f %13.4f\n", a.method.c_str(), a.param.c_str(), a.summary.eig_rat,
                a.summary.first_miss_eig, a.summary.first_miss_min, a.summary.dismissed_min);
  if (res.failed) std::fprintf(stderr, "experiment: %d of %d instances failed (see failures.csv)\n", res.failed,
                               config.instances);
  std::printf("results in %s\n", config.output.string().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fast localization predictors for random Schroedinger operators on the torus"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a random potential V = vmax * U[0,1) as LSF1");
  GridFlags gen_grid;
  gen_grid.add(gen);
  double gen_vmax = 1.0;
  std::uint64_t gen_seed = 1;
  fs::path gen_out;
  gen->add_option("--vmax", gen_vmax, "potential amplitude")->check(CLI::NonNegativeNumber);
  gen->add_option("--seed", gen_seed, "64-bit seed");
  gen->add_option("--out", gen_out, "output .lsf")->required();

  // smooth
  auto* smooth = app.add_subcommand("smooth", "smooth a potential with the averaged heat, Gaussian or box filter");
  fs::path smooth_in, smooth_out;
  std::string smooth_filter = "heat", smooth_op = "lap";
  std::vector<double> smooth_t;
  std::vector<int> smooth_w;
  smooth->add_option("--in", smooth_in, "potential .lsf")->required()->check(CLI::ExistingFile);
  smooth->add_option("--filter", smooth_filter, "heat | gauss | box")->check(CLI::IsMember({"heat", "gauss", "box"}));
  smooth->add_option("--t", smooth_t, "smoothing time (repeatable)")->check(CLI::PositiveNumber);
  smooth->add_option("--w", smooth_w, "box half-width (repeatable)");
  smooth->add_option("--operator", smooth_op, "lap | frac:<alpha> | bilap");
  smooth->add_option("--out", smooth_out, "output .lsf, or a directory when several t/w are given")->required();

  // landscape
  auto* land = app.add_subcommand("landscape", "solve (L + V) u = 1");
  fs::path land_in, land_out;
  std::string land_op = "lap", land_pos = "error";
  double land_tol = 1e-10;
  bool land_eff = false;
  land->add_option("--in", land_in, "potential .lsf")->required()->check(CLI::ExistingFile);
  land->add_option("--operator", land_op, "lap | frac:<alpha> | bilap");
  land->add_option("--tol", land_tol, "max-norm residual tolerance")->check(CLI::PositiveNumber);
  land->add_flag("--effective", land_eff, "write 1/u instead of u");
  land->add_option("--positivity", land_pos, "error | clamp, for u <= 0")->check(CLI::IsMember({"error", "clamp"}));
  land->add_option("--out", land_out, "output .lsf")->required();

  // eigs
  auto* eig = app.add_subcommand("eigs", "smallest eigenpairs of L + V");
  fs::path eig_in, eig_out;
  std::string eig_op = "lap";
  int eig_m = 48, eig_maxit = 1000;
  double eig_tol = 1e-6;
  std::uint64_t eig_seed = 0;
  eig->add_option("--in", eig_in, "potential .lsf")->required()->check(CLI::ExistingFile);
  eig->add_option("--operator", eig_op, "lap | frac:<alpha> | bilap");
  eig->add_option("--m", eig_m, "number of eigenpairs")->check(CLI::PositiveNumber);
  eig->add_option("--tol", eig_tol, "relative residual tolerance")->check(CLI::PositiveNumber);
  eig->add_option("--seed", eig_seed, "seed of the initial block");
  eig->add_option("--max-iterations", eig_maxit, "iteration cap")->check(CLI::PositiveNumber);
  eig->add_option("--out", eig_out, "output directory (eigs.csv + phi_NNNN.lsf)")->required();

  // localize
  auto* loc = app.add_subcommand("localize", "match predictor minima against eigenfunction centers");
  fs::path loc_pred, loc_eigs, loc_out;
  int loc_k = 16, loc_pool = 64;
  double loc_radius = 5.0;
  bool loc_many = false;
  loc->add_option("--predictor", loc_pred, "predictor field .lsf (1/u or W)")->required()->check(CLI::ExistingFile);
  loc->add_option("--eigs", loc_eigs, "directory written by `eigs`")->required()->check(CLI::ExistingDirectory);
  loc->add_option("--k", loc_k, "number of minima")->check(CLI::PositiveNumber);
  loc->add_option("--pool", loc_pool, "eigenfunctions eligible for matching")->check(CLI::PositiveNumber);
  loc->add_option("--radius", loc_radius, "match radius in units of h")->check(CLI::PositiveNumber);
  loc->add_flag("--many-to-one", loc_many, "allow several minima per eigenfunction");
  loc->add_option("--out", loc_out, "output CSV")->required();

  // experiment
  auto* exp = app.add_subcommand("experiment", "run the full pipeline over random instances");
  fs::path exp_config, exp_out;
  GridFlags exp_grid;
  exp_grid.add(exp);
  double exp_vmax = 1.0;
  std::vector<double> exp_t;
  std::string exp_op = "lap";
  std::uint64_t exp_seed = 1;
  int exp_instances = 20, exp_workers = 1;
  exp->add_option("--config", exp_config, "JSON config (see README)")->check(CLI::ExistingFile);
  exp->add_option("--vmax", exp_vmax, "potential amplitude")->check(CLI::NonNegativeNumber);
  exp->add_option("--t", exp_t, "replaces the t list of every heat/gauss method (repeatable)")
      ->check(CLI::PositiveNumber);
  exp->add_option("--operator", exp_op, "lap | frac:<alpha> | bilap");
  exp->add_option("--seed", exp_seed, "seed_base");
  exp->add_option("--instances", exp_instances, "number of random instances")->check(CLI::PositiveNumber);
  exp->add_option("--workers", exp_workers, "worker threads")->check(CLI::PositiveNumber);
  exp->add_option("--out", exp_out, "output directory");

  // profile-kernel
  auto* prof = app.add_subcommand("profile-kernel", "radial profile of the averaged heat kernel as CSV");
  int prof_d = 2, prof_points = 200;
  std::vector<double> prof_t{1.0};
  double prof_rmax = 5.0;
  fs::path prof_out;
  prof->add_option("--d", prof_d, "dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
  prof->add_option("--t", prof_t, "time (repeatable)")->check(CLI::PositiveNumber);
  prof->add_option("--rmax", prof_rmax, "largest radius");
  prof->add_option("--points", prof_points, "samples per t");
  prof->add_option("--out", prof_out, "output CSV")->required();

  // heatmap
  auto* heat = app.add_subcommand("heatmap", "render a field as an 8-bit PGM");
  fs::path heat_in, heat_eigs, heat_out;
  int heat_minima = 0, heat_centers = 16;
  heat->add_option("--in", heat_in, "field .lsf")->required()->check(CLI::ExistingFile);
  heat->add_option("--minima", heat_minima, "mark the k lowest local minima (white)");
  heat->add_option("--eigs", heat_eigs, "eigs directory; mark eigenfunction centers (black)")
      ->check(CLI::ExistingDirectory);
  heat->add_option("--centers", heat_centers, "number of centers to mark");
  heat->add_option("--out", heat_out, "output .pgm")->required();

  // report
  auto* rep = app.add_subcommand("report", "merge aggregate.csv files into one table");
  std::vector<fs::path> rep_in;
  fs::path rep_out;
  rep->add_option("inputs", rep_in, "aggregate.csv files")->required();
  rep->add_option("--out", rep_out, "output CSV (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_generate(gen_grid, gen_vmax, gen_seed, gen_out);
    if (*smooth) return run_smooth(smooth_in, smooth_filter, smooth_t, smooth_w, smooth_op, smooth_out);
    if (*land) return run_landscape(land_in, land_op, land_tol, land_eff, land_pos, land_out);
    if (*eig) return run_eigs(eig_in, eig_op, eig_m, eig_tol, eig_seed, eig_maxit, eig_out);
    if (*loc) return run_localize(loc_pred, loc_eigs, loc_k, loc_pool, loc_radius, loc_many, loc_out);
    if (*exp)
      return run_experiment_cmd(exp_config, exp, exp_grid, exp_vmax, exp_t, exp_op, exp_seed, exp_instances,
                                exp_workers, exp_out);
    if (*prof) return run_profile_kernel(prof_d, prof_t, prof_rmax, prof_points, prof_out);
    if (*heat) return run_heatmap(heat_in, heat_minima, heat_eigs, heat_centers, heat_out);
    if (*rep) {
      const auto table = sweep_report(rep_in);
      if (rep_out.empty())
        std::cout << table;
      else
        open_out(rep_out) << table;
      return 0;
    }
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

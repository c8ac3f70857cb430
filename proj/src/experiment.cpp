#include "fastloc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "fastloc/heatmap.hpp"
#include "fastloc/rng.hpp"

namespace fastloc {
namespace {

using nlohmann::json;

std::string fmt(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string fmt_fixed(double v, int digits) {
  if (std::isnan(v)) return "";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

bool same_operator(const OperatorKind& a, const OperatorKind& b) { return to_string(a) == to_string(b); }

std::vector<Method> parse_methods(const json& arr) {
  std::vector<Method> out;
  for (const auto& m : arr) {
    const std::string type = m.at("type").get<std::string>();
    if (type == "landscape") {
      LandscapeMethod lm;
      if (m.contains("operator")) lm.op = parse_operator(m.at("operator").get<std::string>());
      out.push_back({lm});
    } else if (type == "heat" || type == "gauss") {
      std::vector<double> ts = m.at("t").is_array() ? m.at("t").get<std::vector<double>>()
                                                    : std::vector<double>{m.at("t").get<double>()};
      for (double t : ts) {
        if (type == "heat")
          out.push_back({FilterKind{AveragedHeat{t}}});
        else
          out.push_back({FilterKind{Gaussian{t}}});
      }
    } else if (type == "box") {
      std::vector<int> ws = m.at("w").is_array() ? m.at("w").get<std::vector<int>>()
                                                 : std::vector<int>{m.at("w").get<int>()};
      for (int w : ws) out.push_back({FilterKind{Box{w}}});
    } else {
      throw Error("unknown method type '" + type + "'");
    }
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

InstanceResult run_instance(const ExperimentConfig& cfg, const ExperimentSolvers& solvers, int index) {
  InstanceResult r;
  r.index = index;
  r.seed = instance_seed(cfg.seed_base, static_cast<std::uint64_t>(index));
  try {
    const ScalarField V = make_potential({cfg.vmax, r.seed}, cfg.grid);
    const SchrodingerOperator op(cfg.op, V);

    EigenOptions eo;
    eo.tol = cfg.eig_tol;
    eo.seed = r.seed;
    eo.max_iterations = cfg.eig_max_iterations;
    const EigenSet eigs = solvers.eigensolve(op, cfg.eig_m, eo);
    r.eig_iterations = eigs.iterations;

    LandscapeOptions lo;
    lo.tol = cfg.landscape_tol;
    lo.max_iterations = cfg.landscape_max_iterations;

    MatchOptions mo;
    mo.radius_in_h = cfg.radius_in_h;
    mo.pool = cfg.pool;
    mo.many_to_one = cfg.many_to_one;

    // landscape solves are shared between methods naming the same operator
    std::map<std::string, ScalarField> landscape_predictors;
    std::optional<ScalarField> reference;  // normalized 1/u for the experiment operator

    const bool write_maps = cfg.heatmaps && index == 0 && !cfg.output.empty();
    std::vector<GridPoint> centers;
    if (write_maps) {
      for (std::size_t j = 0; j < std::min<std::size_t>(eigs.size(), cfg.pool); ++j)
        centers.push_back(eigs.pairs[j].center);
      render_heatmap(V, cfg.output / "potential.pgm");
    }

    for (const auto& method : cfg.methods) {
      const std::string name = method.name();
      const std::string param = method.param(cfg.op);
      ScalarField predictor(cfg.grid);
      if (const auto* lm = std::get_if<LandscapeMethod>(&method.kind)) {
        const OperatorKind lop = lm->op.value_or(cfg.op);
        auto it = landscape_predictors.find(to_string(lop));
        if (it == landscape_predictors.end()) {
          const SchrodingerOperator lop_op(lop, V);
          const LandscapeResult lr = solvers.landscape(lop_op, lo);
          if (std::holds_alternative<DiscreteLaplacian>(lop) && std::holds_alternative<DiscreteLaplacian>(cfg.op))
            r.bound = check_landscape_bound(eigs, lr.u);
          it = landscape_predictors.emplace(to_string(lop), effective_potential(lr, cfg.positivity)).first;
          if (same_operator(lop, cfg.op) && !reference) reference = normalize01(it->second);
        }
        predictor = it->second;
      } else {
        const auto& filter = std::get<FilterKind>(method.kind);
        predictor = smooth_potential(V, filter_symbol(filter, op.symbol()));
      }
      const MinimaList minima = find_local_minima(predictor, cfg.k_minima, name + ":" + param);
      const Matching matching = match(minima, eigs, mo);
      r.outcomes.push_back({name, param, evaluate(matching, eigs)});

      if (write_maps) {
        std::vector<GridPoint> marks;
        for (const auto& e : minima.entries) marks.push_back(e.location);
        render_heatmap(predictor, cfg.output / (name + "_" + param + ".pgm"), marks, centers);
      }
    }

    if (reference) {
      for (const auto& method : cfg.methods) {
        const auto* filter = std::get_if<FilterKind>(&method.kind);
        if (!filter) continue;
        const ScalarField W = normalize01(smooth_potential(V, filter_symbol(*filter, op.symbol())));
        r.lp.push_back({method.name(), method.param(cfg.op), lp_difference(*reference, W, Norm::L1),
                        lp_difference(*reference, W, Norm::L2), lp_difference(*reference, W, Norm::Linf)});
      }
    }
    r.ok = true;
  } catch (const Error& e) {
    r.ok = false;
    r.error = e.what();
    r.outcomes.clear();
    r.lp.clear();
    r.bound.reset();
  }
  return r;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res) {
  std::filesystem::create_directories(cfg.output);
  const std::string op = to_string(cfg.op);
  {
    std::ostringstream os;
    os << "instance_seed,method,param,eig_rat,first_miss_eig,first_miss_min,dismissed_min,n_matched\n";
    for (const auto& inst : res.instances)
      for (const auto& o : inst.outcomes)
        os << inst.seed << ',' << csv_field(o.method) << ',' << csv_field(o.param) << ','
           << (o.stats.eig_rat ? fmt(*o.stats.eig_rat) : "") << ',' << o.stats.first_miss_eig << ','
           << o.stats.first_miss_min << ',' << o.stats.dismissed_min << ',' << o.stats.n_matched << '\n';
    write_text(cfg.output / "instances.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "instance_seed,method,param,L1,L2,Linf\n";
    for (const auto& inst : res.instances)
      for (const auto& l : inst.lp)
        os << inst.seed << ',' << csv_field(l.method) << ',' << csv_field(l.param) << ',' << fmt(l.l1) << ','
           << fmt(l.l2) << ',' << fmt(l.linf) << '\n';
    write_text(cfg.output / "lp.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "instance_seed,pairs_checked,violations,max_ratio\n";
    for (const auto& inst : res.instances)
      if (inst.bound)
        os << inst.seed << ',' << inst.bound->pairs_checked << ',' << inst.bound->violations << ','
           << fmt(inst.bound->max_ratio) << '\n';
    write_text(cfg.output / "bound.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "instance_seed,error\n";
    for (const auto& inst : res.instances)
      if (!inst.ok) os << inst.seed << ',' << csv_field(inst.error) << '\n';
    write_text(cfg.output / "failures.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "vmax,operator,method,param,eig_rat,first_miss_eig,first_miss_min,dismissed_min,count,eig_rat_missing,"
          "failed_instances\n";
    for (const auto& a : res.aggregate)
      os << fmt(cfg.vmax) << ',' << csv_field(op) << ',' << csv_field(a.method) << ',' << csv_field(a.param) << ','
         << fmt_fixed(a.summary.eig_rat, 6) << ',' << fmt_fixed(a.summary.first_miss_eig, 4) << ','
         << fmt_fixed(a.summary.first_miss_min, 4) << ',' << fmt_fixed(a.summary.dismissed_min, 4) << ','
         << a.summary.count << ',' << a.summary.eig_rat_missing << ',' << res.failed << '\n';
    write_text(cfg.output / "aggregate.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "vmax,operator,method,param,L1,L2,Linf\n";
    for (const auto& l : res.lp_mean)
      os << fmt(cfg.vmax) << ',' << csv_field(op) << ',' << csv_field(l.method) << ',' << csv_field(l.param) << ','
         << fmt_fixed(l.l1, 6) << ',' << fmt_fixed(l.l2, 6) << ',' << fmt_fixed(l.linf, 6) << '\n';
    write_text(cfg.output / "aggregate_lp.csv", os.str());
  }
  write_text(cfg.output / "config.json", config_to_json(cfg).dump(2) + "\n");
}

// Minimal RFC-4180 line splitter (quoted fields, doubled quotes).
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

}  // namespace

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string Method::name() const {
  if (std::holds_alternative<LandscapeMethod>(kind)) return "landscape";
  const auto& f = std::get<FilterKind>(kind);
  if (std::holds_alternative<AveragedHeat>(f)) return "heat";
  if (std::holds_alternative<Gaussian>(f)) return "gauss";
  return "box";
}

std::string Method::param(const OperatorKind& experiment_op) const {
  if (const auto* lm = std::get_if<LandscapeMethod>(&kind)) return to_string(lm->op.value_or(experiment_op));
  const auto& f = std::get<FilterKind>(kind);
  if (const auto* a = std::get_if<AveragedHeat>(&f)) return fmt(a->t);
  if (const auto* g = std::get_if<Gaussian>(&f)) return fmt(g->t);
  return std::to_string(std::get<Box>(f).halfwidth);
}

void ExperimentConfig::validate() const {
  fastloc::validate(op);
  if (instances < 1) throw Error("config: instances must be >= 1");
  if (methods.empty()) throw Error("config: at least one method is required");
  if (!(vmax >= 0.0)) throw Error("config: vmax must be >= 0");
  if (k_minima < 1 || pool < 1 || eig_m < 1) throw Error("config: k_minima, pool and eig_m must be >= 1");
  if (!(radius_in_h > 0.0) || !(eig_tol > 0.0) || !(landscape_tol > 0.0))
    throw Error("config: radius and tolerances must be positive");
  if (workers < 1) throw Error("config: workers must be >= 1");
  for (const auto& m : methods) {
    if (const auto* f = std::get_if<FilterKind>(&m.kind)) {
      if (const auto* a = std::get_if<AveragedHeat>(f); a && !(a->t > 0.0)) throw Error("config: t must be > 0");
      if (const auto* g = std::get_if<Gaussian>(f); g && !(g->t > 0.0)) throw Error("config: t must be > 0");
      if (const auto* b = std::get_if<Box>(f); b && b->halfwidth < 1) throw Error("config: box w must be >= 1");
    }
  }
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  const int n = j.value("n", c.grid.n());
  const auto conv = parse_unit_convention(j.value("convention", std::string(to_string(c.grid.convention()))));
  c.grid = GridShape(n, conv);
  if (j.contains("operator")) c.op = parse_operator(j.at("operator").get<std::string>());
  c.vmax = j.value("vmax", c.vmax);
  c.instances = j.value("instances", c.instances);
  c.seed_base = j.value("seed_base", c.seed_base);
  if (j.contains("methods")) c.methods = parse_methods(j.at("methods"));
  c.k_minima = j.value("k_minima", c.k_minima);
  c.pool = j.value("pool", c.pool);
  c.radius_in_h = j.value("radius_in_h", c.radius_in_h);
  c.eig_m = j.value("eig_m", c.eig_m);
  c.eig_tol = j.value("eig_tol", c.eig_tol);
  c.eig_max_iterations = j.value("eig_max_iterations", c.eig_max_iterations);
  c.landscape_tol = j.value("landscape_tol", c.landscape_tol);
  c.landscape_max_iterations = j.value("landscape_max_iterations", c.landscape_max_iterations);
  const std::string pos = j.value("positivity", std::string("error"));
  if (pos == "error")
    c.positivity = PositivityPolicy::Error;
  else if (pos == "clamp")
    c.positivity = PositivityPolicy::Clamp;
  else
    throw Error("config: positivity must be error|clamp");
  c.many_to_one = j.value("many_to_one", c.many_to_one);
  c.workers = j.value("workers", c.workers);
  c.heatmaps = j.value("heatmaps", c.heatmaps);
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json methods = json::array();
  for (const auto& m : c.methods) {
    json e;
    e["type"] = m.name();
    if (const auto* lm = std::get_if<LandscapeMethod>(&m.kind)) {
      if (lm->op) e["operator"] = to_string(*lm->op);
    } else {
      const auto& f = std::get<FilterKind>(m.kind);
      if (const auto* a = std::get_if<AveragedHeat>(&f)) e["t"] = a->t;
      if (const auto* g = std::get_if<Gaussian>(&f)) e["t"] = g->t;
      if (const auto* b = std::get_if<Box>(&f)) e["w"] = b->halfwidth;
    }
    methods.push_back(e);
  }
  // workers and output are run-local and not recorded
  return json{{"n", c.grid.n()},
              {"convention", to_string(c.grid.convention())},
              {"operator", to_string(c.op)},
              {"vmax", c.vmax},
              {"instances", c.instances},
              {"seed_base", c.seed_base},
              {"methods", methods},
              {"k_minima", c.k_minima},
              {"pool", c.pool},
              {"radius_in_h", c.radius_in_h},
              {"eig_m", c.eig_m},
              {"eig_tol", c.eig_tol},
              {"eig_max_iterations", c.eig_max_iterations},
              {"landscape_tol", c.landscape_tol},
              {"landscape_max_iterations", c.landscape_max_iterations},
              {"positivity", c.positivity == PositivityPolicy::Error ? "error" : "clamp"},
              {"many_to_one", c.many_to_one},
              {"heatmaps", c.heatmaps}};
}

BoundCheck check_landscape_bound(const EigenSet& eigs, const ScalarField& u) {
  BoundCheck b;
  for (const auto& p : eigs.pairs) {
    require_same_shape(p.phi, u, "check_landscape_bound");
    double sup = 0.0;
    for (double v : p.phi.values()) sup = std::max(sup, std::abs(v));
    ++b.pairs_checked;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double rhs = p.lambda * u[i] * sup;
      const double lhs = std::abs(p.phi[i]);
      if (lhs > rhs * (1.0 + 1e-6)) ++b.violations;
      if (rhs > 0.0) b.max_ratio = std::max(b.max_ratio, lhs / rhs);
      else if (lhs > 0.0) b.max_ratio = std::numeric_limits<double>::infinity();
    }
  }
  return b;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentSolvers& solvers) {
  config.validate();
  if (!config.output.empty()) std::filesystem::create_directories(config.output);
  ExperimentResult res;
  res.instances.resize(config.instances);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < config.instances; i = next++) res.instances[i] = run_instance(config, solvers, i);
  };
  const int threads = std::min(config.workers, config.instances);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (const auto& inst : res.instances)
    if (!inst.ok) ++res.failed;

  for (std::size_t m = 0; m < config.methods.size(); ++m) {
    std::vector<StatsRecord> records;
    for (const auto& inst : res.instances)
      if (inst.ok) records.push_back(inst.outcomes[m].stats);
    if (records.empty()) continue;
    res.aggregate.push_back({config.methods[m].name(), config.methods[m].param(config.op), summarize(records)});
  }

  std::map<std::pair<std::string, std::string>, std::pair<LpRow, int>> lp_sum;
  std::vector<std::pair<std::string, std::string>> lp_order;
  for (const auto& inst : res.instances) {
    for (const auto& l : inst.lp) {
      auto key = std::make_pair(l.method, l.param);
      auto [it, fresh] = lp_sum.try_emplace(key, LpRow{l.method, l.param}, 0);
      if (fresh) lp_order.push_back(key);
      it->second.first.l1 += l.l1;
      it->second.first.l2 += l.l2;
      it->second.first.linf += l.linf;
      ++it->second.second;
    }
  }
  for (const auto& key : lp_order) {
    auto [row, count] = lp_sum.at(key);
    row.l1 /= count;
    row.l2 /= count;
    row.linf /= count;
    res.lp_mean.push_back(row);
  }

  if (!config.output.empty()) write_outputs(config, res);
  return res;
}

std::string sweep_report(const std::vector<std::filesystem::path>& aggregate_csvs) {
  if (aggregate_csvs.empty()) throw Error("sweep_report: no inputs");
  std::ostringstream os;
  os << "vmax,operator,method,param,EigRat,FirstMissEig,FirstMissMin,DismissedMin\n";
  std::size_t rows = 0;
  for (const auto& path : aggregate_csvs) {
    std::ifstream in(path);
    if (!in) throw Error("sweep_report: missing input '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw Error("sweep_report: empty aggregate '" + path.string() + "'");
    const auto header = split_csv_line(line);
    auto col = [&](const std::string& name) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw Error("sweep_report: column '" + name + "' missing in " + path.string());
      return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t cv = col("vmax"), co = col("operator"), cm = col("method"), cp = col("param"),
                      c1 = col("eig_rat"), c2 = col("first_miss_eig"), c3 = col("first_miss_min"),
                      c4 = col("dismissed_min");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split_csv_line(line);
      if (f.size() != header.size()) throw Error("sweep_report: ragged row in " + path.string());
      os << f[cv] << ',' << csv_field(f[co]) << ',' << csv_field(f[cm]) << ',' << csv_field(f[cp]) << ',' << f[c1]
         << ',' << f[c2] << ',' << f[c3] << ',' << f[c4] << '\n';
      ++rows;
    }
  }
  if (rows == 0) throw Error("sweep_report: aggregates contain no rows");
  return os.str();
}

}  // namespace fastloc

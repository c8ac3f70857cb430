#include "fastloc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "fastloc/rng.hpp"

namespace fastloc {

const char* to_string(UnitConvention c) {
  return c == UnitConvention::Domain ? "domain" : "lattice";
}

UnitConvention parse_unit_convention(const std::string& s) {
  if (s == "domain") return UnitConvention::Domain;
  if (s == "lattice") return UnitConvention::Lattice;
  throw Error("unknown unit convention '" + s + "' (expected domain|lattice)");
}

GridShape::GridShape(int n, UnitConvention convention)
    : n_(n), h_(convention == UnitConvention::Domain ? 1.0 / n : 1.0), convention_(convention) {
  if (n < 4) throw Error("grid needs n >= 4, got " + std::to_string(n));
}

double GridShape::frequency(int k) const {
  return 2.0 * std::numbers::pi * k / length();
}

double torus_distance_in_h(const GridShape& s, GridPoint a, GridPoint b) {
  const int n = s.n();
  auto wrap = [n](int d) {
    d = std::abs(d) % n;
    return std::min(d, n - d);
  };
  const double dx = wrap(a.x - b.x);
  const double dy = wrap(a.y - b.y);
  return std::sqrt(dx * dx + dy * dy);
}

ScalarField::ScalarField(GridShape shape, double fill)
    : shape_(shape), values_(shape.size(), fill) {}

ScalarField::ScalarField(GridShape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (values_.size() != shape_.size())
    throw Error("field has " + std::to_string(values_.size()) + " values, grid needs " +
                std::to_string(shape_.size()));
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / values_.size();
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* where) {
  if (!(a.shape() == b.shape()))
    throw Error(std::string(where) + ": shape mismatch (n=" + std::to_string(a.shape().n()) +
                " vs n=" + std::to_string(b.shape().n()) + ")");
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_shape(a, b, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  const double h = a.shape().h();
  return h * h * s;
}

ScalarField make_potential(const PotentialSpec& spec, const GridShape& shape) {
  if (!(spec.vmax >= 0.0)) throw Error("make_potential: vmax must be >= 0");
  ScalarField v(shape);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = spec.vmax * keyed_uniform(spec.seed, i);
  return v;
}

ScalarField normalize01(const ScalarField& f) {
  const double lo = f.min();
  const double hi = f.max();
  if (!(hi > lo)) throw Error("normalize01: degenerate range");
  ScalarField out(f.shape());
  const double scale = 1.0 / (hi - lo);
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = (f[i] - lo) * scale;
  // pin the extremes so the result spans [0,1] exactly
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f[i] == lo) out[i] = 0.0;
    if (f[i] == hi) out[i] = 1.0;
  }
  return out;
}

const char* to_string(Norm p) {
  switch (p) {
    case Norm::L1: return "L1";
    case Norm::L2: return "L2";
    case Norm::Linf: return "Linf";
  }
  return "?";
}

double lp_difference(const ScalarField& f, const ScalarField& g, Norm p) {
  require_same_shape(f, g, "lp_difference");
  double acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = std::abs(f[i] - g[i]);
    switch (p) {
      case Norm::L1: acc += d; break;
      case Norm::L2: acc += d * d; break;
      case Norm::Linf: acc = std::max(acc, d); break;
    }
  }
  const double cells = static_cast<double>(f.size());
  switch (p) {
    case Norm::L1: return acc / cells;
    case Norm::L2: return std::sqrt(acc / cells);
    case Norm::Linf: return acc;
  }
  return acc;
}

}  // namespace fastloc

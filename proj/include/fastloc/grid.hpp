#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fastloc {

/// Raised for contract violations in the library (bad shapes, singular
/// problems, malformed files).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative solver hit its iteration cap. `residuals` holds the best
/// residual reached (one entry for linear solves, one per pair for eigensolves).
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const { return residuals_; }

 private:
  std::vector<double> residuals_;
};

/// Domain: h = 1/n on [0,1)^2.  Lattice: h = 1 on [0,n)^2.
enum class UnitConvention { Domain, Lattice };

const char* to_string(UnitConvention c);
UnitConvention parse_unit_convention(const std::string& s);

/// Uniform n x n periodic grid. All frequencies and measures derive from here.
class GridShape {
 public:
  GridShape(int n, UnitConvention convention);

  static GridShape domain(int n) { return {n, UnitConvention::Domain}; }
  static GridShape lattice(int n) { return {n, UnitConvention::Lattice}; }

  int n() const { return n_; }
  double h() const { return h_; }
  UnitConvention convention() const { return convention_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  /// Side length n*h of the torus.
  double length() const { return h_ * n_; }
  /// Per-axis angular frequency 2*pi*k/(n*h) for a signed index k.
  double frequency(int k) const;

  bool operator==(const GridShape& o) const {
    return n_ == o.n_ && convention_ == o.convention_;
  }

 private:
  int n_;
  double h_;
  UnitConvention convention_;
};

struct GridPoint {
  int x = 0;
  int y = 0;
  bool operator==(const GridPoint&) const = default;
};

/// Row-major index: x selects the row, y the column.
inline std::size_t flat_index(const GridShape& s, int x, int y) {
  return static_cast<std::size_t>(x) * s.n() + y;
}

/// Minimum-image Euclidean distance between two sites, in mesh units.
double torus_distance_in_h(const GridShape& s, GridPoint a, GridPoint b);

/// Real grid function.
class ScalarField {
 public:
  explicit ScalarField(GridShape shape, double fill = 0.0);
  ScalarField(GridShape shape, std::vector<double> values);

  const GridShape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int x, int y) { return values_[flat_index(shape_, x, y)]; }
  double operator()(int x, int y) const { return values_[flat_index(shape_, x, y)]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  double min() const;
  double max() const;
  double mean() const;
  bool all_finite() const;

  bool operator==(const ScalarField& o) const {
    return shape_ == o.shape_ && values_ == o.values_;
  }

 private:
  GridShape shape_;
  std::vector<double> values_;
};

void require_same_shape(const ScalarField& a, const ScalarField& b, const char* where);

/// h^2-weighted inner product.
double inner(const ScalarField& a, const ScalarField& b);

/// Per-site i.i.d. uniform potential on [0, vmax).
struct PotentialSpec {
  double vmax = 1.0;
  std::uint64_t seed = 0;
};

ScalarField make_potential(const PotentialSpec& spec, const GridShape& shape);

/// Affine rescaling onto [0,1]. Throws on a constant field.
ScalarField normalize01(const ScalarField& f);

enum class Norm { L1, L2, Linf };

const char* to_string(Norm p);

/// L1 and L2 are taken with respect to the probability measure on the torus
/// (mean and root-mean-square of |f-g|); Linf is the max.
double lp_difference(const ScalarField& f, const ScalarField& g, Norm p);

}  // namespace fastloc

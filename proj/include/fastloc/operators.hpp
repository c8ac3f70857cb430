#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <variant>

#include "fastloc/fft.hpp"
#include "fastloc/grid.hpp"

namespace fastloc {

/// Five-point stencil Laplacian, -Delta_h.
struct DiscreteLaplacian {};

/// (-Delta)^alpha defined through |xi|^{2 alpha} on signed frequencies.
struct SpectralFractional {
  double alpha = 1.0;
};

/// (-Delta_h)^2, the squared five-point stencil.
struct DiscreteBiLaplacian {};

using OperatorKind = std::variant<DiscreteLaplacian, SpectralFractional, DiscreteBiLaplacian>;

std::string to_string(const OperatorKind& kind);
/// Accepts "lap", "bilap" and "frac:<alpha>".
OperatorKind parse_operator(const std::string& s);
void validate(const OperatorKind& kind);

/// Fourier multiplier M of Delta (or of -(-Delta)^alpha, -(Delta_h)^2);
/// every value is <= 0 and the only zero is at k = l = 0.
SymbolTable operator_symbol(const OperatorKind& kind, const GridShape& shape);

/// L + V bound to a fixed potential, with the symbol precomputed. Immutable
/// after construction; apply() may be called from several threads.
class SchrodingerOperator {
 public:
  SchrodingerOperator(const OperatorKind& kind, ScalarField V);

  const OperatorKind& kind() const { return kind_; }
  const GridShape& shape() const { return V_.shape(); }
  const ScalarField& potential() const { return V_; }
  /// Symbol of Delta-like part (<= 0).
  const SymbolTable& symbol() const { return symbol_; }

  void apply(std::span<const double> in, std::span<double> out) const;
  ScalarField apply(const ScalarField& f) const;

  /// (L + shift)^{-1} applied spectrally; shift must be > 0.
  void solve_shifted(double shift, std::span<const double> in, std::span<double> out) const;

 private:
  OperatorKind kind_;
  ScalarField V_;
  SymbolTable symbol_;
  std::vector<double> neg_symbol_;
};

/// (L + V) f computed spectrally: ifft2(-M * fft2(f)) + V f.
ScalarField apply_schrodinger(const OperatorKind& kind, const ScalarField& V, const ScalarField& f);

/// Same as above with a precomputed symbol.
ScalarField apply_schrodinger(const SymbolTable& symbol, const ScalarField& V, const ScalarField& f);

/// Direct five-point stencil, (-Delta_h) f. Independent of the FFT path.
ScalarField apply_stencil_laplacian(const ScalarField& f);

inline constexpr int kDenseMatrixMaxN = 32;

/// Assembled (n^2 x n^2) matrix of L + V; columns are images of unit vectors.
Eigen::MatrixXd dense_matrix(const OperatorKind& kind, const ScalarField& V);

/// <f,(L+V)f> / <f,f>.
double rayleigh_quotient(const OperatorKind& kind, const ScalarField& V, const ScalarField& f);

}  // namespace fastloc

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "fastloc/grid.hpp"

namespace fastloc {

/// DFT coefficients over the frequency index grid {0..n-1}^2, stored row-major
/// like ScalarField.
struct SpectralField {
  GridShape shape;
  std::vector<std::complex<double>> coeffs;

  explicit SpectralField(GridShape s) : shape(s), coeffs(s.size()) {}

  std::complex<double>& operator()(int k, int l) { return coeffs[flat_index(shape, k, l)]; }
  std::complex<double> operator()(int k, int l) const { return coeffs[flat_index(shape, k, l)]; }
};

/// A real Fourier multiplier sampled on the frequency index grid.
struct SymbolTable {
  GridShape shape;
  std::string description;
  std::vector<double> values;

  SymbolTable(GridShape s, std::string desc) : shape(s), description(std::move(desc)), values(s.size()) {}

  double& operator()(int k, int l) { return values[flat_index(shape, k, l)]; }
  double operator()(int k, int l) const { return values[flat_index(shape, k, l)]; }
};

/// Signed frequency index in {-n/2, ..., n/2-1} for a raw index k in {0..n-1}.
inline int signed_index(int k, int n) { return k < n / 2 ? k : k - n; }

/// F(k,l) = h^2 * sum_{x,y} exp(-i(xi_k x + eta_l y)) f(x,y), positions x = i*h.
SpectralField fft2(const ScalarField& f);

/// Inverse of fft2. The imaginary residue is discarded; it is only round-off
/// when the spectrum is conjugate symmetric.
ScalarField ifft2(const SpectralField& F);

/// Complex inverse, for callers that need to inspect the imaginary part.
std::vector<std::complex<double>> ifft2_complex(const SpectralField& F);

SpectralField apply_multiplier(const SpectralField& F, const SymbolTable& m);

/// ifft2(m * fft2(f)); the workhorse behind operator application and smoothing.
ScalarField filter_field(const ScalarField& f, const SymbolTable& m);

/// Raw form of filter_field on row-major buffers of length n^2. `in` and
/// `out` may alias.
void filter_values(const GridShape& shape, std::span<const double> in, std::span<const double> multiplier,
                   std::span<double> out);

}  // namespace fastloc

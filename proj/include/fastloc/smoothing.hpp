#pragma once

#include <limits>
#include <string>
#include <variant>

#include "fastloc/fft.hpp"
#include "fastloc/grid.hpp"
#include "fastloc/operators.hpp"

namespace fastloc {

/// Time average of the heat semigroup over [0, t]: (e^{tM} - 1)/(tM).
struct AveragedHeat {
  double t = 0.1;
};

/// Plain heat semigroup at time t: e^{tM}.
struct Gaussian {
  double t = 0.1;
};

/// Uniform average over the (2w+1) x (2w+1) box of sites around each point.
struct Box {
  int halfwidth = 1;
};

using FilterKind = std::variant<AveragedHeat, Gaussian, Box>;

std::string to_string(const FilterKind& f);

/// Below this value of t*M the averaged-heat multiplier is evaluated as
/// -1/(tM); e^{tM} is smaller than 1e-304 there.
inline constexpr double kAveragedHeatAsymptoticCutoff = -700.0;

/// Scalar averaged-heat multiplier for a single symbol value m <= 0.
double averaged_heat_multiplier(double t, double m);

SymbolTable filter_symbol(const FilterKind& filter, const SymbolTable& op_symbol);

/// W = ifft2(G * fft2(V)), two FFTs.
ScalarField smooth_potential(const ScalarField& V, const FilterKind& filter, const OperatorKind& kind);

/// Same, reusing a filter symbol built by filter_symbol().
ScalarField smooth_potential(const ScalarField& V, const SymbolTable& filter_sym);

/// Radial profile of the averaged heat kernel
///   k_t(r) = (1/t) int_0^t exp(-r^2/(4s)) / (4 pi s)^{d/2} ds
/// in closed form through the upper incomplete gamma function.
/// d must be 1 or 2; r must be > 0 in d = 2 (log singularity at the origin).
double kernel_profile(int d, double t, double r);

inline constexpr double kUnboundedRadius = std::numeric_limits<double>::infinity();

/// Largest site distance r (length units) with h^2 * sum_{|x - x0| <= r} V(x) <= 1.
/// Returns 0 if the centre site alone exceeds 1 and kUnboundedRadius if the
/// whole torus does not reach 1 (including V == 0).
double fefferman_phong_radius(const ScalarField& V, GridPoint x0);

/// Smoothing time t = r(x0, V)^2 matched to the local confinement scale.
double suggest_t(const ScalarField& V, GridPoint x0);

}  // namespace fastloc

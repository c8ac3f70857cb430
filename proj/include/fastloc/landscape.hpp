#pragma once

#include <vector>

#include "fastloc/grid.hpp"
#include "fastloc/operators.hpp"

namespace fastloc {

struct LandscapeOptions {
  /// Stop once ||(L+V)u - 1||_inf <= tol.
  double tol = 1e-10;
  /// Iteration cap; <= 0 means 10 * n.
  int max_iterations = 0;
};

struct LandscapeResult {
  ScalarField u;
  double residual_inf = 0.0;
  int iterations = 0;
  /// sqrt(r . T r) after each iteration, T the preconditioner.
  std::vector<double> preconditioned_residuals;
};

/// Solves (L + V) u = 1 on the torus by conjugate gradients preconditioned
/// with (L + mean(V))^{-1}. Zero initial guess, so the result is a
/// deterministic function of the inputs.
LandscapeResult solve_landscape(const OperatorKind& kind, const ScalarField& V,
                                const LandscapeOptions& opts = {});
LandscapeResult solve_landscape(const SchrodingerOperator& op, const LandscapeOptions& opts = {});

/// What to do when u is not strictly positive (possible for the
/// bi-Laplacian, which has no maximum principle).
enum class PositivityPolicy { Error, Clamp };

/// Pointwise 1/u. With Clamp, values of u below 1e-12 * max(u) are raised to
/// that floor before inversion.
ScalarField effective_potential(const LandscapeResult& result,
                                PositivityPolicy policy = PositivityPolicy::Error);

}  // namespace fastloc

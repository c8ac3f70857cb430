#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "fastloc/grid.hpp"
#include "fastloc/operators.hpp"

namespace fastloc {

struct EigenPair {
  double lambda = 0.0;
  ScalarField phi;
  GridPoint center;
  double residual = 0.0;
};

/// Ascending eigenpairs. Each phi has unit h^2-weighted L2 norm and its
/// largest-magnitude entry positive.
struct EigenSet {
  std::vector<EigenPair> pairs;
  double tol = 0.0;
  int iterations = 0;

  std::size_t size() const { return pairs.size(); }
  double lambda(std::size_t j) const { return pairs[j].lambda; }
};

struct EigenOptions {
  /// Per-pair stopping rule ||(L+V)phi - lambda phi||_2 <= tol * max(1, |lambda|).
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Block size; 0 picks m + max(8, m/4), clamped to n^2.
  int block = 0;
  int max_iterations = 1000;
};

/// The m algebraically smallest eigenpairs of L + V by preconditioned block
/// iteration (LOBPCG) with the spectral preconditioner (L + mean(V))^{-1}.
/// Deterministic for fixed inputs and seed.
EigenSet smallest_eigenpairs(const SchrodingerOperator& op, int m, const EigenOptions& opts = {});
EigenSet smallest_eigenpairs(const OperatorKind& kind, const ScalarField& V, int m,
                             const EigenOptions& opts = {});

/// Argmax of |phi|; ties resolved to the smallest row-major index.
GridPoint localization_center(const ScalarField& phi);

inline constexpr int kDenseEigenMaxN = 24;

/// Full dense eigendecomposition, truncated to m pairs. Test oracle.
EigenSet dense_eigen_oracle(const OperatorKind& kind, const ScalarField& V, int m);

/// Writes phi_NNNN.lsf per pair plus eigs.csv (index, lambda, center_x,
/// center_y, residual) into `dir`.
void write_eigenset(const std::filesystem::path& dir, const EigenSet& eigs);
EigenSet read_eigenset(const std::filesystem::path& dir);

}  // namespace fastloc

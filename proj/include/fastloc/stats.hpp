#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fastloc/eigensolver.hpp"
#include "fastloc/grid.hpp"

namespace fastloc {

struct LocalMinimum {
  GridPoint location;
  double value = 0.0;
};

/// Strict local minima of a predictor field, ascending by value.
struct MinimaList {
  std::vector<LocalMinimum> entries;
  std::string source;

  std::size_t size() const { return entries.size(); }
};

/// The k smallest points that are strictly below all 8 torus neighbours.
/// Equal values are ordered by row-major index.
MinimaList find_local_minima(const ScalarField& f, int k, std::string source = {});

struct MatchOptions {
  double radius_in_h = 5.0;
  int pool = 64;
  /// Let several minima claim the same eigenfunction (sensitivity analysis only).
  bool many_to_one = false;
};

/// assignments[i] is the 0-based eigen-index claimed by minimum i, if any.
struct Matching {
  std::vector<std::optional<int>> assignments;
  double radius_in_h = 5.0;

  std::size_t matched() const;
};

/// Greedy in minimum order: each minimum takes the nearest unclaimed
/// eigenfunction among the first `pool` whose center lies within
/// radius_in_h * h (ties go to the lower eigen-index).
Matching match(const MinimaList& minima, const EigenSet& eigs, const MatchOptions& opts = {});

/// (sum of matched eigenvalues) / (sum of the same number of smallest ones);
/// nullopt when nothing matched.
std::optional<double> eig_rat(const Matching& matching, const EigenSet& eigs);
/// Smallest 1-based eigen-index not claimed by any minimum.
int first_miss_eig(const Matching& matching);
/// Smallest 1-based minimum rank without an assignment, k+1 if all matched.
int first_miss_min(const Matching& matching);
/// Number of minima without an assignment.
int dismissed_min(const Matching& matching);

struct StatsRecord {
  std::optional<double> eig_rat;
  int first_miss_eig = 1;
  int first_miss_min = 1;
  int dismissed_min = 0;
  int n_matched = 0;
};

StatsRecord evaluate(const Matching& matching, const EigenSet& eigs);

struct StatsSummary {
  double eig_rat = 0.0;
  double first_miss_eig = 0.0;
  double first_miss_min = 0.0;
  double dismissed_min = 0.0;
  std::size_t count = 0;
  /// Records whose eig_rat was undefined and therefore left out of its mean.
  std::size_t eig_rat_missing = 0;
};

StatsSummary summarize(const std::vector<StatsRecord>& records);

}  // namespace fastloc

#include "fastloc/stats.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace fastloc {

MinimaList find_local_minima(const ScalarField& f, int k, std::string source) {
  if (k < 1) throw Error("find_local_minima: k must be >= 1");
  const int n = f.shape().n();
  MinimaList out;
  out.source = std::move(source);
  std::vector<std::pair<double, std::size_t>> found;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double v = f(x, y);
      bool strict = true;
      for (int dx = -1; dx <= 1 && strict; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          if (dx == 0 && dy == 0) continue;
          if (!(v < f((x + dx + n) % n, (y + dy + n) % n))) {
            strict = false;
            break;
          }
        }
      if (strict) found.emplace_back(v, flat_index(f.shape(), x, y));
    }
  }
  std::sort(found.begin(), found.end());
  if (found.size() > static_cast<std::size_t>(k)) found.resize(k);
  for (const auto& [v, idx] : found)
    out.entries.push_back({{static_cast<int>(idx / n), static_cast<int>(idx % n)}, v});
  return out;
}

std::size_t Matching::matched() const {
  return static_cast<std::size_t>(
      std::count_if(assignments.begin(), assignments.end(), [](const auto& a) { return a.has_value(); }));
}

Matching match(const MinimaList& minima, const EigenSet& eigs, const MatchOptions& opts) {
  for (std::size_t j = 1; j < eigs.size(); ++j)
    if (eigs.lambda(j) < eigs.lambda(j - 1)) throw Error("match: eigenvalues must be ascending");
  Matching m;
  m.radius_in_h = opts.radius_in_h;
  const int pool = std::min<int>(opts.pool, static_cast<int>(eigs.size()));
  std::vector<char> taken(pool, 0);
  for (const auto& minimum : minima.entries) {
    std::optional<int> pick;
    double pick_dist = 0.0;
    for (int j = 0; j < pool; ++j) {
      if (taken[j] && !opts.many_to_one) continue;
      const auto& phi = eigs.pairs[j].phi;
      const double d = torus_distance_in_h(phi.shape(), minimum.location, eigs.pairs[j].center);
      if (d > opts.radius_in_h) continue;
      if (!pick || d < pick_dist) {
        pick = j;
        pick_dist = d;
      }
    }
    if (pick) taken[*pick] = 1;
    m.assignments.push_back(pick);
  }
  return m;
}

std::optional<double> eig_rat(const Matching& matching, const EigenSet& eigs) {
  double num = 0.0;
  std::size_t count = 0;
  for (const auto& a : matching.assignments) {
    if (!a) continue;
    num += eigs.lambda(*a);
    ++count;
  }
  if (count == 0) return std::nullopt;
  double den = 0.0;
  for (std::size_t j = 0; j < count; ++j) den += eigs.lambda(j);
  return num / den;
}

int first_miss_eig(const Matching& matching) {
  std::set<int> claimed;
  for (const auto& a : matching.assignments)
    if (a) claimed.insert(*a);
  int k = 0;
  while (claimed.count(k)) ++k;
  return k + 1;
}

int first_miss_min(const Matching& matching) {
  for (std::size_t i = 0; i < matching.assignments.size(); ++i)
    if (!matching.assignments[i]) return static_cast<int>(i) + 1;
  return static_cast<int>(matching.assignments.size()) + 1;
}

int dismissed_min(const Matching& matching) {
  return static_cast<int>(matching.assignments.size() - matching.matched());
}

StatsRecord evaluate(const Matching& matching, const EigenSet& eigs) {
  return StatsRecord{eig_rat(matching, eigs), first_miss_eig(matching), first_miss_min(matching),
                     dismissed_min(matching), static_cast<int>(matching.matched())};
}

StatsSummary summarize(const std::vector<StatsRecord>& records) {
  if (records.empty()) throw Error("summarize: no records");
  StatsSummary s;
  s.count = records.size();
  std::size_t rat_count = 0;
  for (const auto& r : records) {
    if (r.eig_rat) {
      s.eig_rat += *r.eig_rat;
      ++rat_count;
    }
    s.first_miss_eig += r.first_miss_eig;
    s.first_miss_min += r.first_miss_min;
    s.dismissed_min += r.dismissed_min;
  }
  s.eig_rat_missing = records.size() - rat_count;
  s.eig_rat = rat_count ? s.eig_rat / rat_count : std::numeric_limits<double>::quiet_NaN();
  const double c = static_cast<double>(records.size());
  s.first_miss_eig /= c;
  s.first_miss_min /= c;
  s.dismissed_min /= c;
  return s;
}

}  // namespace fastloc

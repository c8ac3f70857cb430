#include "fastloc/landscape.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fastloc {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

LandscapeResult solve_landscape(const OperatorKind& kind, const ScalarField& V, const LandscapeOptions& opts) {
  return solve_landscape(SchrodingerOperator(kind, V), opts);
}

LandscapeResult solve_landscape(const SchrodingerOperator& op, const LandscapeOptions& opts) {
  if (!(opts.tol > 0.0)) throw Error("solve_landscape: tolerance must be positive");
  const auto& V = op.potential();
  const auto& shape = op.shape();
  if (V.min() < 0.0) throw Error("solve_landscape: potential must be nonnegative");
  const double shift = V.mean();
  if (!(shift > 0.0)) throw Error("solve_landscape: singular problem (mean(V) = 0)");
  const int cap = opts.max_iterations > 0 ? opts.max_iterations : 10 * shape.n();

  const std::size_t N = shape.size();
  std::vector<double> u(N, 0.0), r(N, 1.0), z(N), p(N), q(N);
  std::vector<double> best_u = u;
  std::vector<double> history;
  double best_res = max_abs(r);
  int it = 0;

  while (true) {
    // (re)start from the true residual r = 1 - (L+V)u
    op.apply(u, q);
    for (std::size_t i = 0; i < N; ++i) r[i] = 1.0 - q[i];
    double res = max_abs(r);
    if (res < best_res) {
      best_res = res;
      best_u = u;
    }
    if (res <= opts.tol) break;
    if (it >= cap) break;

    op.solve_shifted(shift, r, z);
    p = z;
    double rz = dot(r, z);
    bool recurrence_converged = false;
    while (it < cap) {
      ++it;
      op.apply(p, q);
      const double alpha = rz / dot(p, q);
      for (std::size_t i = 0; i < N; ++i) {
        u[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      if (max_abs(r) <= opts.tol) {
        recurrence_converged = true;
        break;
      }
      op.solve_shifted(shift, r, z);
      const double rz_next = dot(r, z);
      history.push_back(std::sqrt(std::max(rz_next, 0.0)));
      const double beta = rz_next / rz;
      rz = rz_next;
      for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
    }
    if (!recurrence_converged && it >= cap) {
      op.apply(u, q);
      for (std::size_t i = 0; i < N; ++i) r[i] = 1.0 - q[i];
      const double final_res = max_abs(r);
      if (final_res < best_res) {
        best_res = final_res;
        best_u = u;
      }
      break;
    }
  }

  if (best_res > opts.tol) {
    std::ostringstream os;
    os << "solve_landscape: no convergence in " << cap << " iterations (best residual " << best_res << ")";
    throw ConvergenceError(os.str(), {best_res});
  }
  return LandscapeResult{ScalarField(shape, std::move(best_u)), best_res, it, std::move(history)};
}

ScalarField effective_potential(const LandscapeResult& result, PositivityPolicy policy) {
  const auto& u = result.u;
  const double floor = 1e-12 * std::max(u.max(), 0.0);
  ScalarField w(u.shape());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double v = u[i];
    if (!(v > 0.0)) {
      if (policy == PositivityPolicy::Error) throw Error("effective_potential: positivity violated (u <= 0)");
      v = floor;
    }
    if (policy == PositivityPolicy::Clamp) v = std::max(v, floor);
    if (!(v > 0.0)) throw Error("effective_potential: positivity violated (u <= 0 everywhere)");
    w[i] = 1.0 / v;
  }
  return w;
}

}  // namespace fastloc

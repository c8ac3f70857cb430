#include "fastloc/smoothing.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fastloc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

void require_positive_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw Error("smoothing time must be positive, got " + std::to_string(t));
}

// Dirichlet-type sum  sum_{j=-w}^{w} cos(2 pi j k / n).
double box_factor(int k, int w, int n) {
  double s = 1.0;
  for (int j = 1; j <= w; ++j) s += 2.0 * std::cos(2.0 * std::numbers::pi * j * k / n);
  return s;
}

// Gamma(-1/2, a). The erfc form cancels for large a, so switch to the
// Legendre continued fraction there (modified Lentz).
double upper_gamma_minus_half(double a) {
  const double pi = std::numbers::pi;
  const double sa = std::sqrt(a);
  if (a <= 1.0) return 2.0 * std::exp(-a) / sa - 2.0 * std::sqrt(pi) * std::erfc(sa);
  constexpr double s = -0.5;
  constexpr double tiny = 1e-300;
  double b = a + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 300; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-a) / sa * h;
}

}  // namespace

std::string to_string(const FilterKind& f) {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&](const AveragedHeat& a) { os << "heat:" << a.t; },
                 [&](const Gaussian& g) { os << "gauss:" << g.t; },
                 [&](const Box& b) { os << "box:" << b.halfwidth; },
             },
             f);
  return os.str();
}

double averaged_heat_multiplier(double t, double m) {
  const double x = t * m;
  if (x == 0.0) return 1.0;
  if (x < kAveragedHeatAsymptoticCutoff) return -1.0 / x;
  return std::expm1(x) / x;
}

SymbolTable filter_symbol(const FilterKind& filter, const SymbolTable& op_symbol) {
  const auto& shape = op_symbol.shape;
  SymbolTable g(shape, to_string(filter));
  std::visit(Overloaded{
                 [&](const AveragedHeat& a) {
                   require_positive_time(a.t);
                   for (std::size_t i = 0; i < g.values.size(); ++i) {
                     if (op_symbol.values[i] > 0.0) throw Error("filter_symbol: operator symbol must be <= 0");
                     g.values[i] = averaged_heat_multiplier(a.t, op_symbol.values[i]);
                   }
                 },
                 [&](const Gaussian& gs) {
                   require_positive_time(gs.t);
                   for (std::size_t i = 0; i < g.values.size(); ++i) {
                     if (op_symbol.values[i] > 0.0) throw Error("filter_symbol: operator symbol must be <= 0");
                     g.values[i] = std::exp(gs.t * op_symbol.values[i]);
                   }
                 },
                 [&](const Box& b) {
                   const int n = shape.n();
                   if (b.halfwidth < 1 || 2 * b.halfwidth + 1 > n)
                     throw Error("box halfwidth must satisfy 1 <= w and 2w+1 <= n");
                   const double side = 2.0 * b.halfwidth + 1.0;
                   std::vector<double> f(n);
                   for (int k = 0; k < n; ++k) f[k] = box_factor(k, b.halfwidth, n) / side;
                   for (int k = 0; k < n; ++k)
                     for (int l = 0; l < n; ++l) g(k, l) = f[k] * f[l];
                 },
             },
             filter);
  return g;
}

ScalarField smooth_potential(const ScalarField& V, const SymbolTable& filter_sym) {
  return filter_field(V, filter_sym);
}

ScalarField smooth_potential(const ScalarField& V, const FilterKind& filter, const OperatorKind& kind) {
  return filter_field(V, filter_symbol(filter, operator_symbol(kind, V.shape())));
}

double kernel_profile(int d, double t, double r) {
  require_positive_time(t);
  const double pi = std::numbers::pi;
  if (d == 2) {
    if (!(r > 0.0)) throw Error("kernel_profile: r must be > 0 in d = 2");
    // k_t(r) = E1(r^2/(4t)) / (4 pi t)
    const double a = r * r / (4.0 * t);
    return -std::expint(-a) / (4.0 * pi * t);
  }
  if (d == 1) {
    if (r < 0.0) throw Error("kernel_profile: r must be >= 0");
    if (r == 0.0) return 1.0 / std::sqrt(pi * t);
    // k_t(r) = r / (4 sqrt(pi) t) * Gamma(-1/2, a)
    const double a = r * r / (4.0 * t);
    return r / (4.0 * std::sqrt(pi) * t) * upper_gamma_minus_half(a);
  }
  throw Error("kernel_profile: dimension must be 1 or 2");
}

double fefferman_phong_radius(const ScalarField& V, GridPoint x0) {
  const auto& s = V.shape();
  const int n = s.n();
  if (x0.x < 0 || x0.x >= n || x0.y < 0 || x0.y >= n) throw Error("fefferman_phong_radius: point off grid");
  if (V.min() < 0.0) throw Error("fefferman_phong_radius: potential must be nonnegative");

  // bucket masses by squared minimum-image distance (integer, in mesh units)
  const int half = n / 2;
  std::vector<double> shell_mass(2 * half * half + 1, 0.0);
  std::vector<char> shell_present(shell_mass.size(), 0);
  for (int x = 0; x < n; ++x) {
    int dx = std::abs(x - x0.x);
    dx = std::min(dx, n - dx);
    for (int y = 0; y < n; ++y) {
      int dy = std::abs(y - x0.y);
      dy = std::min(dy, n - dy);
      const int d2 = dx * dx + dy * dy;
      shell_mass[d2] += V(x, y);
      shell_present[d2] = 1;
    }
  }

  const double cell = s.h() * s.h();
  double mass = 0.0;
  long best = -1;
  for (std::size_t d2 = 0; d2 < shell_mass.size(); ++d2) {
    if (!shell_present[d2]) continue;
    mass += cell * shell_mass[d2];
    if (mass > 1.0) break;
    best = static_cast<long>(d2);
  }
  if (mass <= 1.0) return kUnboundedRadius;
  if (best < 0) return 0.0;
  return std::sqrt(static_cast<double>(best)) * s.h();
}

double suggest_t(const ScalarField& V, GridPoint x0) {
  const double r = fefferman_phong_radius(V, x0);
  return r * r;
}

}  // namespace fastloc

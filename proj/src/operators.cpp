#include "fastloc/operators.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

namespace fastloc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

double laplacian_symbol(int k, int l, const GridShape& s) {
  const double sk = std::sin(std::numbers::pi * k / s.n());
  const double sl = std::sin(std::numbers::pi * l / s.n());
  return -(4.0 / (s.h() * s.h())) * (sk * sk + sl * sl);
}

}  // namespace

std::string to_string(const OperatorKind& kind) {
  return std::visit(Overloaded{
                        [](const DiscreteLaplacian&) { return std::string("lap"); },
                        [](const DiscreteBiLaplacian&) { return std::string("bilap"); },
                        [](const SpectralFractional& f) {
                          std::ostringstream os;
                          os << "frac:" << f.alpha;
                          return os.str();
                        },
                    },
                    kind);
}

OperatorKind parse_operator(const std::string& s) {
  if (s == "lap") return DiscreteLaplacian{};
  if (s == "bilap") return DiscreteBiLaplacian{};
  if (s.rfind("frac:", 0) == 0) {
    double alpha = 0.0;
    const char* b = s.data() + 5;
    const char* e = s.data() + s.size();
    auto r = std::from_chars(b, e, alpha);
    if (r.ec != std::errc() || r.ptr != e) throw Error("bad fractional exponent in '" + s + "'");
    OperatorKind k = SpectralFractional{alpha};
    validate(k);
    return k;
  }
  throw Error("unknown operator '" + s + "' (expected lap|bilap|frac:<alpha>)");
}

void validate(const OperatorKind& kind) {
  if (const auto* f = std::get_if<SpectralFractional>(&kind)) {
    if (!(f->alpha > 0.0 && f->alpha <= 1.0))
      throw Error("fractional exponent must lie in (0,1], got " + std::to_string(f->alpha));
  }
}

SymbolTable operator_symbol(const OperatorKind& kind, const GridShape& shape) {
  validate(kind);
  SymbolTable m(shape, to_string(kind));
  const int n = shape.n();
  std::visit(Overloaded{
                 [&](const DiscreteLaplacian&) {
                   for (int k = 0; k < n; ++k)
                     for (int l = 0; l < n; ++l) m(k, l) = laplacian_symbol(k, l, shape);
                 },
                 [&](const DiscreteBiLaplacian&) {
                   for (int k = 0; k < n; ++k)
                     for (int l = 0; l < n; ++l) {
                       const double lap = laplacian_symbol(k, l, shape);
                       m(k, l) = -lap * lap;
                     }
                 },
                 [&](const SpectralFractional& f) {
                   for (int k = 0; k < n; ++k)
                     for (int l = 0; l < n; ++l) {
                       const double xi = shape.frequency(signed_index(k, n));
                       const double eta = shape.frequency(signed_index(l, n));
                       const double r2 = xi * xi + eta * eta;
                       m(k, l) = f.alpha == 1.0 ? -r2 : -std::pow(r2, f.alpha);
                     }
                 },
             },
             kind);
  return m;
}

SchrodingerOperator::SchrodingerOperator(const OperatorKind& kind, ScalarField V)
    : kind_(kind), V_(std::move(V)), symbol_(operator_symbol(kind, V_.shape())), neg_symbol_(symbol_.values) {
  for (double& v : neg_symbol_) v = -v;
}

void SchrodingerOperator::apply(std::span<const double> in, std::span<double> out) const {
  filter_values(shape(), in, neg_symbol_, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += V_[i] * in[i];
}

ScalarField SchrodingerOperator::apply(const ScalarField& f) const {
  if (!(f.shape() == shape())) throw Error("SchrodingerOperator::apply: shape mismatch");
  ScalarField out(shape());
  apply(f.values(), out.values());
  return out;
}

void SchrodingerOperator::solve_shifted(double shift, std::span<const double> in, std::span<double> out) const {
  if (!(shift > 0.0)) throw Error("solve_shifted: shift must be positive");
  std::vector<double> inv(neg_symbol_.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / (neg_symbol_[i] + shift);
  filter_values(shape(), in, inv, out);
}

ScalarField apply_schrodinger(const SymbolTable& symbol, const ScalarField& V, const ScalarField& f) {
  require_same_shape(V, f, "apply_schrodinger");
  if (!(symbol.shape == f.shape())) throw Error("apply_schrodinger: symbol shape mismatch");
  SymbolTable neg(symbol.shape, symbol.description);
  for (std::size_t i = 0; i < neg.values.size(); ++i) neg.values[i] = -symbol.values[i];
  ScalarField out = filter_field(f, neg);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += V[i] * f[i];
  return out;
}

ScalarField apply_schrodinger(const OperatorKind& kind, const ScalarField& V, const ScalarField& f) {
  require_same_shape(V, f, "apply_schrodinger");
  return apply_schrodinger(operator_symbol(kind, f.shape()), V, f);
}

ScalarField apply_stencil_laplacian(const ScalarField& f) {
  const auto& s = f.shape();
  const int n = s.n();
  const double inv_h2 = 1.0 / (s.h() * s.h());
  ScalarField out(s);
  for (int x = 0; x < n; ++x) {
    const int xp = (x + 1) % n, xm = (x + n - 1) % n;
    for (int y = 0; y < n; ++y) {
      const int yp = (y + 1) % n, ym = (y + n - 1) % n;
      out(x, y) = inv_h2 * (4.0 * f(x, y) - f(xp, y) - f(xm, y) - f(x, yp) - f(x, ym));
    }
  }
  return out;
}

Eigen::MatrixXd dense_matrix(const OperatorKind& kind, const ScalarField& V) {
  const auto& s = V.shape();
  if (s.n() > kDenseMatrixMaxN)
    throw Error("dense_matrix: n=" + std::to_string(s.n()) + " too large (max " +
                std::to_string(kDenseMatrixMaxN) + ")");
  const auto symbol = operator_symbol(kind, s);
  const auto N = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd A(N, N);
  ScalarField e(s);
  for (Eigen::Index j = 0; j < N; ++j) {
    e[j] = 1.0;
    const auto col = apply_schrodinger(symbol, V, e);
    for (Eigen::Index i = 0; i < N; ++i) A(i, j) = col[i];
    e[j] = 0.0;
  }
  // the operator is symmetric; remove round-off asymmetry from the FFT path
  Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
  return sym;
}

double rayleigh_quotient(const OperatorKind& kind, const ScalarField& V, const ScalarField& f) {
  const double ff = inner(f, f);
  if (!(ff > 0.0)) throw Error("rayleigh_quotient: zero field");
  return inner(f, apply_schrodinger(kind, V, f)) / ff;
}

}  // namespace fastloc

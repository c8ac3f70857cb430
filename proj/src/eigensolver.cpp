#include "fastloc/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fastloc/field_io.hpp"
#include "fastloc/rng.hpp"

namespace fastloc {
namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

std::span<const double> col_span(const Mat& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}
std::span<double> col_span(Mat& m, Eigen::Index j) {
  return {m.col(j).data(), static_cast<std::size_t>(m.rows())};
}

Mat apply_block(const SchrodingerOperator& op, const Mat& in) {
  Mat out(in.rows(), in.cols());
  for (Eigen::Index j = 0; j < in.cols(); ++j) op.apply(col_span(in, j), col_span(out, j));
  return out;
}

class Preconditioner {
 public:
  explicit Preconditioner(const SchrodingerOperator& op) : shape_(op.shape()), inv_(shape_.size()) {
    const auto& m = op.symbol().values;
    double shift = op.potential().mean();
    if (!(shift > 0.0)) {
      // V == 0: shift by the smallest nonzero |M| so the inverse exists
      shift = std::numeric_limits<double>::infinity();
      for (double v : m)
        if (v < 0.0) shift = std::min(shift, -v);
    }
    for (std::size_t i = 0; i < inv_.size(); ++i) inv_[i] = 1.0 / (shift - m[i]);
  }

  Mat apply(const Mat& in) const {
    Mat out(in.rows(), in.cols());
    for (Eigen::Index j = 0; j < in.cols(); ++j) filter_values(shape_, col_span(in, j), inv_, col_span(out, j));
    return out;
  }

 private:
  GridShape shape_;
  std::vector<double> inv_;
};

// Orthonormalize the columns of S (SVQB, two passes), dropping directions
// that are numerically dependent.
Mat orthonormalize(Mat S) {
  for (int pass = 0; pass < 2 && S.cols() > 0; ++pass) {
    std::vector<Eigen::Index> nonzero;
    for (Eigen::Index j = 0; j < S.cols(); ++j) {
      const double nrm = S.col(j).norm();
      if (nrm > 0.0) {
        S.col(j) /= nrm;
        nonzero.push_back(j);
      }
    }
    if (nonzero.size() != static_cast<std::size_t>(S.cols())) S = Mat(S(Eigen::all, nonzero));
    if (S.cols() == 0) break;
    Mat G = S.transpose() * S;
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    const Vec& d = es.eigenvalues();
    const double cutoff = (pass == 0 ? 1e-12 : 1e-14) * d.maxCoeff();
    std::vector<Eigen::Index> keep;
    for (Eigen::Index i = 0; i < d.size(); ++i)
      if (d[i] > cutoff) keep.push_back(i);
    Mat U(G.rows(), static_cast<Eigen::Index>(keep.size()));
    for (std::size_t i = 0; i < keep.size(); ++i) U.col(i) = es.eigenvectors().col(keep[i]) / std::sqrt(d[keep[i]]);
    S = S * U;
  }
  return S;
}

void project_out(const Mat& X, Mat& S) {
  for (int pass = 0; pass < 2; ++pass) S -= X * (X.transpose() * S);
}

void finalize(EigenSet& set) {
  for (auto& p : set.pairs) {
    p.center = localization_center(p.phi);
    if (p.phi(p.center.x, p.center.y) < 0.0)
      for (auto& v : p.phi.values()) v = -v;
  }
  // inside a numerically degenerate cluster, order by center index
  auto& pairs = set.pairs;
  std::size_t start = 0;
  while (start < pairs.size()) {
    std::size_t end = start + 1;
    while (end < pairs.size() &&
           pairs[end].lambda - pairs[end - 1].lambda <= 1e-8 * std::max(1.0, std::abs(pairs[end - 1].lambda)))
      ++end;
    if (end - start > 1) {
      std::stable_sort(pairs.begin() + start, pairs.begin() + end, [&](const EigenPair& a, const EigenPair& b) {
        return flat_index(a.phi.shape(), a.center.x, a.center.y) < flat_index(b.phi.shape(), b.center.x, b.center.y);
      });
    }
    start = end;
  }
}

EigenPair make_pair_from(const GridShape& shape, double lambda, const Vec& x, double residual) {
  const double inv_h = 1.0 / shape.h();
  std::vector<double> values(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) values[i] = x[i] * inv_h;
  return EigenPair{lambda, ScalarField(shape, std::move(values)), {}, residual};
}

}  // namespace

EigenSet smallest_eigenpairs(const OperatorKind& kind, const ScalarField& V, int m, const EigenOptions& opts) {
  return smallest_eigenpairs(SchrodingerOperator(kind, V), m, opts);
}

EigenSet smallest_eigenpairs(const SchrodingerOperator& op, int m, const EigenOptions& opts) {
  const auto& shape = op.shape();
  const auto N = static_cast<Eigen::Index>(shape.size());
  if (m < 1 || m > N / 2) throw Error("smallest_eigenpairs: need 1 <= m <= n^2/2, got m=" + std::to_string(m));
  if (!(opts.tol > 0.0)) throw Error("smallest_eigenpairs: tolerance must be positive");
  Eigen::Index b = opts.block > 0 ? opts.block : m + std::max(8, m / 4);
  b = std::min<Eigen::Index>(std::max<Eigen::Index>(b, m), N);

  const Preconditioner T(op);

  Mat X(N, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < N; ++i)
      X(i, j) = keyed_uniform(opts.seed, static_cast<std::uint64_t>(j) * N + i) - 0.5;
  X = orthonormalize(std::move(X));
  if (X.cols() < b) throw Error("smallest_eigenpairs: degenerate initial block");

  Mat AX = apply_block(op, X);
  Vec lam;
  {
    Mat H = X.transpose() * AX;
    H = 0.5 * (H + H.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    X = X * es.eigenvectors();
    AX = AX * es.eigenvectors();
    lam = es.eigenvalues();
  }

  Mat P(N, 0);
  Vec res(b);
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  int it = 0;
  bool converged = false;
  for (;; ++it) {
    Mat R = AX - X * lam.asDiagonal();
    std::vector<Eigen::Index> active;
    converged = true;
    for (Eigen::Index j = 0; j < b; ++j) {
      res[j] = R.col(j).norm();
      const bool ok = res[j] <= opts.tol * std::max(1.0, std::abs(lam[j]));
      if (j < m) {
        best[j] = std::min(best[j], res[j]);
        converged = converged && ok;
      }
      if (!ok) active.push_back(j);
    }
    if (converged || it >= opts.max_iterations) break;

    Mat W = T.apply(R(Eigen::all, active));
    Mat S(N, W.cols() + (P.cols() > 0 ? static_cast<Eigen::Index>(active.size()) : 0));
    S.leftCols(W.cols()) = W;
    if (P.cols() > 0) S.rightCols(active.size()) = P(Eigen::all, active);
    project_out(X, S);
    S = orthonormalize(std::move(S));
    if (S.cols() == 0) break;
    const Mat AS = apply_block(op, S);

    const Eigen::Index s = S.cols();
    Mat H(b + s, b + s);
    H.topLeftCorner(b, b) = lam.asDiagonal();
    H.topRightCorner(b, s) = X.transpose() * AS;
    H.bottomLeftCorner(s, b) = H.topRightCorner(b, s).transpose();
    Mat SAS = S.transpose() * AS;
    H.bottomRightCorner(s, s) = 0.5 * (SAS + SAS.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(H);
    const Mat C = es.eigenvectors().leftCols(b);
    lam = es.eigenvalues().head(b);

    const Mat Cx = C.topRows(b);
    const Mat Cs = C.bottomRows(s);
    P = S * Cs;
    X = X * Cx + P;
    AX = AX * Cx + AS * Cs;

    if ((it + 1) % 50 == 0) {
      // refresh: undo slow loss of orthogonality and drift between X and AX
      X = orthonormalize(std::move(X));
      if (X.cols() < b) break;
      AX = apply_block(op, X);
      Mat H2 = X.transpose() * AX;
      H2 = 0.5 * (H2 + H2.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Mat> es2(H2);
      X = X * es2.eigenvectors();
      AX = AX * es2.eigenvectors();
      lam = es2.eigenvalues();
      P.resize(N, 0);
    }
  }

  if (!converged) {
    std::ostringstream os;
    os << "smallest_eigenpairs: no convergence after " << it << " iterations; per-pair residuals:";
    for (int j = 0; j < m; ++j) os << ' ' << best[j];
    throw ConvergenceError(os.str(), best);
  }

  EigenSet set;
  set.tol = opts.tol;
  set.iterations = it;
  for (int j = 0; j < m; ++j) set.pairs.push_back(make_pair_from(shape, lam[j], X.col(j), res[j]));
  finalize(set);
  return set;
}

GridPoint localization_center(const ScalarField& phi) {
  std::size_t best = 0;
  double best_abs = -1.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double a = std::abs(phi[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  if (!(best_abs > 0.0)) throw Error("localization_center: zero field");
  const int n = phi.shape().n();
  return {static_cast<int>(best / n), static_cast<int>(best % n)};
}

EigenSet dense_eigen_oracle(const OperatorKind& kind, const ScalarField& V, int m) {
  const auto& shape = V.shape();
  if (shape.n() > kDenseEigenMaxN)
    throw Error("dense_eigen_oracle: n=" + std::to_string(shape.n()) + " too large (max " +
                std::to_string(kDenseEigenMaxN) + ")");
  const auto N = static_cast<Eigen::Index>(shape.size());
  if (m < 1 || m > N) throw Error("dense_eigen_oracle: m out of range");
  const Mat A = dense_matrix(kind, V);
  Eigen::SelfAdjointEigenSolver<Mat> es(A);
  EigenSet set;
  set.tol = 0.0;
  for (int j = 0; j < m; ++j) {
    const Vec v = es.eigenvectors().col(j);
    const double lambda = es.eigenvalues()[j];
    const double r = (A * v - lambda * v).norm();
    set.pairs.push_back(make_pair_from(shape, lambda, v, r));
    set.tol = std::max(set.tol, r);
  }
  finalize(set);
  return set;
}

void write_eigenset(const std::filesystem::path& dir, const EigenSet& eigs) {
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "eigs.csv");
  if (!csv) throw Error("cannot write '" + (dir / "eigs.csv").string() + "'");
  csv << "index,lambda,center_x,center_y,residual\n";
  char name[32];
  for (std::size_t j = 0; j < eigs.size(); ++j) {
    const auto& p = eigs.pairs[j];
    char line[160];
    std::snprintf(line, sizeof(line), "%zu,%.17g,%d,%d,%.17g\n", j + 1, p.lambda, p.center.x, p.center.y,
                  p.residual);
    csv << line;
    std::snprintf(name, sizeof(name), "phi_%04zu.lsf", j + 1);
    write_field(dir / name, p.phi);
  }
}

EigenSet read_eigenset(const std::filesystem::path& dir) {
  std::ifstream csv(dir / "eigs.csv");
  if (!csv) throw Error("cannot open '" + (dir / "eigs.csv").string() + "'");
  std::string line;
  if (!std::getline(csv, line) || line != "index,lambda,center_x,center_y,residual")
    throw Error("eigs.csv: unexpected header");
  EigenSet set;
  char name[32];
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    std::size_t index = 0;
    double lambda = 0.0, residual = 0.0;
    int cx = 0, cy = 0;
    if (std::sscanf(line.c_str(), "%zu,%lf,%d,%d,%lf", &index, &lambda, &cx, &cy, &residual) != 5)
      throw Error("eigs.csv: malformed row '" + line + "'");
    if (index != set.size() + 1) throw Error("eigs.csv: rows out of order");
    std::snprintf(name, sizeof(name), "phi_%04zu.lsf", index);
    EigenPair p{lambda, read_field(dir / name), {cx, cy}, residual};
    set.tol = std::max(set.tol, residual);
    set.pairs.push_back(std::move(p));
  }
  return set;
}

}  // namespace fastloc

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>

#include "fastloc/operators.hpp"
#include "test_util.hpp"

using namespace fastloc;
using fastloc::oracle::random_field;

TEST(OperatorSymbol, LaplacianExamples) {
  auto lat = operator_symbol(DiscreteLaplacian{}, GridShape::lattice(8));
  EXPECT_EQ(lat(0, 0), 0.0);
  EXPECT_NEAR(lat(4, 4), -8.0, 1e-14);
  EXPECT_NEAR(lat(4, 0), -4.0, 1e-14);
  auto dom = operator_symbol(DiscreteLaplacian{}, GridShape::domain(4));
  EXPECT_NEAR(dom(1, 1), -64.0, 1e-12);
  EXPECT_NEAR(dom(2, 2), -128.0, 1e-12);
}

TEST(OperatorSymbol, FractionalWithUnitExponentIsFrequencySquared) {
  auto s = GridShape::domain(16);
  auto m = operator_symbol(SpectralFractional{1.0}, s);
  for (int k = 0; k < 16; ++k)
    for (int l = 0; l < 16; ++l) {
      const double xi = s.frequency(signed_index(k, 16)), eta = s.frequency(signed_index(l, 16));
      EXPECT_NEAR(m(k, l), -(xi * xi + eta * eta), 1e-10);
    }
}

TEST(OperatorSymbol, FractionalExponentScalesModulus) {
  auto s = GridShape::lattice(16);
  auto m = operator_symbol(SpectralFractional{0.5}, s);
  const double xi = s.frequency(3), eta = s.frequency(-4);
  EXPECT_NEAR(m(3, 12), -std::sqrt(xi * xi + eta * eta), 1e-14);
}

TEST(OperatorSymbol, BiLaplacianIsSquaredLaplacian) {
  auto s = GridShape::domain(8);
  auto lap = operator_symbol(DiscreteLaplacian{}, s);
  auto bi = operator_symbol(DiscreteBiLaplacian{}, s);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(bi.values[i], -lap.values[i] * lap.values[i], 1e-9);
}

TEST(OperatorSymbol, NonPositiveWithSingleZero) {
  for (OperatorKind kind : {OperatorKind{DiscreteLaplacian{}}, OperatorKind{SpectralFractional{0.3}},
                            OperatorKind{SpectralFractional{1.0}}, OperatorKind{DiscreteBiLaplacian{}}})
    for (int n : {4, 7, 32})
      for (auto s : {GridShape::domain(n), GridShape::lattice(n)}) {
        auto m = operator_symbol(kind, s);
        EXPECT_EQ(m(0, 0), 0.0);
        for (std::size_t i = 1; i < s.size(); ++i) ASSERT_LT(m.values[i], 0.0) << to_string(kind) << " n=" << n;
      }
}

TEST(OperatorKind, ParseAndPrintRoundTrip) {
  for (const char* text : {"lap", "bilap", "frac:0.75", "frac:1"}) EXPECT_EQ(to_string(parse_operator(text)), text);
  EXPECT_THROW(parse_operator("laplace"), Error);
  EXPECT_THROW(parse_operator("frac:x"), Error);
  EXPECT_THROW(validate(SpectralFractional{0.0}), Error);
  EXPECT_THROW(validate(SpectralFractional{1.5}), Error);
  EXPECT_NO_THROW(validate(SpectralFractional{1.0}));
}

TEST(Apply, SpectralLaplacianMatchesStencil) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = trial % 2 ? GridShape::lattice(16) : GridShape::domain(16);
    auto f = random_field(s, rng);
    ScalarField zero(s);
    auto spectral = apply_schrodinger(DiscreteLaplacian{}, zero, f);
    auto stencil = apply_stencil_laplacian(f);
    const double scale = 1.0 / (s.h() * s.h());
    ASSERT_LT(oracle::max_abs_diff(spectral, stencil), 1e-11 * scale);
  }
}

TEST(Apply, BiLaplacianIsStencilTwice) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = trial % 2 ? GridShape::lattice(16) : GridShape::lattice(32);
    auto f = random_field(s, rng);
    auto twice = apply_stencil_laplacian(apply_stencil_laplacian(f));
    auto spectral = apply_schrodinger(DiscreteBiLaplacian{}, ScalarField(s), f);
    EXPECT_LT(oracle::max_abs_diff(spectral, twice), 1e-10);
  }
}

TEST(Apply, PotentialActsPointwise) {
  auto s = GridShape::lattice(8);
  std::mt19937_64 rng(33);
  auto V = random_field(s, rng, 0.0, 4.0);
  auto out = apply_schrodinger(DiscreteLaplacian{}, V, ScalarField(s, 2.0));
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(out[i], 2.0 * V[i], 1e-13);
}

TEST(Apply, FourierModesAreEigenvectors) {
  auto s = GridShape::domain(16);
  auto m = operator_symbol(SpectralFractional{0.6}, s);
  auto f = oracle::cosine_mode(s, 2, 5);
  auto Lf = apply_schrodinger(SpectralFractional{0.6}, ScalarField(s), f);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_NEAR(Lf[i], -m(2, 5) * f[i], 1e-9);
}

TEST(Apply, SchrodingerOperatorObjectAgreesWithFreeFunction) {
  std::mt19937_64 rng(34);
  auto s = GridShape::lattice(16);
  auto V = random_field(s, rng, 0.0, 1.0);
  auto f = random_field(s, rng);
  SchrodingerOperator op(DiscreteBiLaplacian{}, V);
  EXPECT_LT(oracle::max_abs_diff(op.apply(f), apply_schrodinger(DiscreteBiLaplacian{}, V, f)), 1e-13);
  EXPECT_THROW(op.apply(ScalarField(GridShape::lattice(8))), Error);
}

TEST(Apply, SolveShiftedInvertsShiftedOperator) {
  std::mt19937_64 rng(35);
  auto s = GridShape::domain(16);
  SchrodingerOperator op(DiscreteLaplacian{}, ScalarField(s));
  auto f = random_field(s, rng);
  ScalarField x(s);
  op.solve_shifted(3.0, f.values(), x.values());
  auto back = op.apply(x);
  for (std::size_t i = 0; i < s.size(); ++i) back[i] += 3.0 * x[i];
  EXPECT_LT(oracle::max_abs_diff(back, f), 1e-11);
  EXPECT_THROW(op.solve_shifted(0.0, f.values(), x.values()), Error);
}

TEST(DenseMatrix, LaplacianMatchesHandAssembledStencil) {
  std::mt19937_64 rng(36);
  for (auto s : {GridShape::lattice(6), GridShape::domain(8)}) {
    auto V = random_field(s, rng, 0.0, 2.0);
    auto A = dense_matrix(DiscreteLaplacian{}, V);
    auto B = oracle::stencil_matrix(s, V);
    EXPECT_LT((A - B).cwiseAbs().maxCoeff(), 1e-10 / (s.h() * s.h()));
  }
  EXPECT_THROW(dense_matrix(DiscreteLaplacian{}, ScalarField(GridShape::lattice(64))), Error);
}

TEST(DenseMatrix, FreeLaplacianSpectrumAtN4) {
  auto A = dense_matrix(DiscreteLaplacian{}, ScalarField(GridShape::lattice(4)));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  std::map<long, int> counts;
  for (double ev : es.eigenvalues()) {
    EXPECT_NEAR(ev, std::round(ev), 1e-10);
    ++counts[std::lround(ev)];
  }
  const std::map<long, int> expected{{0, 1}, {2, 4}, {4, 6}, {6, 4}, {8, 1}};
  EXPECT_EQ(counts, expected);
}

TEST(DenseMatrix, SymmetricPositiveSemidefiniteForRandomPotentials) {
  std::mt19937_64 rng(37);
  const OperatorKind kinds[] = {DiscreteLaplacian{}, SpectralFractional{0.75}, DiscreteBiLaplacian{}};
  for (int trial = 0; trial < 102; ++trial) {
    auto s = GridShape::lattice(6);
    auto V = random_field(s, rng, 0.0, 3.0);
    const auto& kind = kinds[trial % 3];
    auto A = dense_matrix(kind, V);
    ASSERT_LT((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    // L is PSD and V >= 0, so lambda_min lies in [min V, mean V]
    EXPECT_GE(es.eigenvalues()(0), V.min() - 1e-10);
    EXPECT_LE(es.eigenvalues()(0), V.mean() + 1e-10);
  }
}

TEST(RayleighQuotient, Examples) {
  auto s = GridShape::lattice(8);
  ScalarField V(s, 1.5);
  EXPECT_NEAR(rayleigh_quotient(DiscreteLaplacian{}, V, ScalarField(s, 1.0)), 1.5, 1e-13);
  EXPECT_NEAR(rayleigh_quotient(DiscreteLaplacian{}, ScalarField(s), oracle::cosine_mode(s, 4, 4)), 8.0, 1e-12);
  EXPECT_THROW(rayleigh_quotient(DiscreteLaplacian{}, V, ScalarField(s)), Error);
}

TEST(RayleighQuotient, SymmetricFormOnRandomPairs) {
  std::mt19937_64 rng(38);
  auto s = GridShape::domain(16);
  for (int trial = 0; trial < 100; ++trial) {
    auto V = random_field(s, rng, 0.0, 10.0);
    auto f = random_field(s, rng), g = random_field(s, rng);
    const OperatorKind kind = trial % 2 ? OperatorKind{DiscreteLaplacian{}} : OperatorKind{SpectralFractional{0.4}};
    const double fLg = inner(f, apply_schrodinger(kind, V, g));
    const double gLf = inner(g, apply_schrodinger(kind, V, f));
    const double scale = std::sqrt(inner(f, f) * inner(g, g)) * (V.max() + 8.0 / (s.h() * s.h()));
    EXPECT_LE(std::abs(fLg - gLf), 1e-10 * scale);
    EXPECT_GE(rayleigh_quotient(kind, V, f), V.min());
  }
}

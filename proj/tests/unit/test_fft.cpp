#include <gtest/gtest.h>

#include <cmath>

#include "fastloc/fft.hpp"
#include "test_util.hpp"

using namespace fastloc;
using fastloc::oracle::random_field;

TEST(Fft, ConstantFieldHasSingleCoefficient) {
  for (auto s : {GridShape::domain(8), GridShape::lattice(8)}) {
    auto F = fft2(ScalarField(s, 3.0));
    const double mass = 3.0 * s.length() * s.length();
    EXPECT_NEAR(F(0, 0).real(), mass, 1e-12 * mass);
    for (int k = 0; k < 8; ++k)
      for (int l = 0; l < 8; ++l)
        if (k || l) EXPECT_LT(std::abs(F(k, l)), 1e-12 * mass);
  }
}

TEST(Fft, DeltaHasFlatSpectrum) {
  auto s = GridShape::domain(16);
  ScalarField d(s);
  d(0, 0) = 1.0;
  auto F = fft2(d);
  for (auto c : F.coeffs) {
    EXPECT_NEAR(c.real(), s.h() * s.h(), 1e-17);
    EXPECT_NEAR(c.imag(), 0.0, 1e-17);
  }
}

TEST(Fft, InverseOfConstantSpectrumIsScaledDelta) {
  auto s = GridShape::domain(8);
  SpectralField F(s);
  for (auto& c : F.coeffs) c = 1.0;
  auto f = ifft2(F);
  EXPECT_NEAR(f(0, 0), 1.0 / (s.h() * s.h()), 1e-10);
  for (std::size_t i = 1; i < f.size(); ++i) EXPECT_NEAR(f[i], 0.0, 1e-10);
}

TEST(Fft, SingleModeLandsOnItsFrequency) {
  auto s = GridShape::lattice(16);
  auto F = fft2(oracle::cosine_mode(s, 3, 5));
  const double half = 0.5 * 256;
  EXPECT_NEAR(F(3, 5).real(), half, 1e-10);
  EXPECT_NEAR(F(13, 11).real(), half, 1e-10);
  double rest = 0.0;
  for (int k = 0; k < 16; ++k)
    for (int l = 0; l < 16; ++l)
      if (!((k == 3 && l == 5) || (k == 13 && l == 11))) rest = std::max(rest, std::abs(F(k, l)));
  EXPECT_LT(rest, 1e-10);
}

TEST(Fft, MatchesDirectDftAt8x8) {
  std::mt19937_64 rng(21);
  for (auto s : {GridShape::domain(8), GridShape::lattice(8)}) {
    auto f = random_field(s, rng);
    auto fast = fft2(f);
    auto slow = oracle::direct_dft(f);
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_LT(std::abs(fast.coeffs[i] - slow.coeffs[i]), 1e-12 * s.length() * s.length());
  }
}

TEST(Fft, RoundTripWithinTolerance) {
  std::mt19937_64 rng(22);
  for (int n : {8, 64, 256}) {
    auto f = random_field(GridShape::domain(n), rng);
    auto back = ifft2(fft2(f));
    EXPECT_LT(oracle::max_abs_diff(f, back), 1e-12) << "n=" << n;
  }
}

TEST(Fft, ParsevalOnRandomFields) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto s = trial % 2 ? GridShape::domain(8) : GridShape::lattice(8);
    auto f = random_field(s, rng);
    auto F = fft2(f);
    double spatial = 0.0;
    for (double v : f.values()) spatial += v * v;
    spatial *= s.h() * s.h();
    double spectral = 0.0;
    for (auto c : F.coeffs) spectral += std::norm(c);
    spectral /= s.length() * s.length();
    EXPECT_NEAR(spatial, spectral, 1e-12 * spatial);
  }
}

TEST(Fft, LinearAndConjugateSymmetricOnRandomFields) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  auto s = GridShape::domain(8);
  for (int trial = 0; trial < 100; ++trial) {
    auto f = random_field(s, rng), g = random_field(s, rng);
    const double a = coef(rng), b = coef(rng);
    ScalarField combo(s);
    for (std::size_t i = 0; i < combo.size(); ++i) combo[i] = a * f[i] + b * g[i];
    auto F = fft2(f), G = fft2(g), C = fft2(combo);
    for (int k = 0; k < 8; ++k)
      for (int l = 0; l < 8; ++l) {
        EXPECT_LT(std::abs(C(k, l) - (a * F(k, l) + b * G(k, l))), 1e-13);
        EXPECT_LT(std::abs(F(k, l) - std::conj(F((8 - k) % 8, (8 - l) % 8))), 1e-14);
      }
  }
}

TEST(Fft, ApplyMultiplierScalesEachCoefficient) {
  auto s = GridShape::lattice(4);
  SpectralField F(s);
  SymbolTable m(s, "test");
  for (std::size_t i = 0; i < s.size(); ++i) {
    F.coeffs[i] = {double(i), -1.0};
    m.values[i] = 0.5 * double(i);
  }
  auto G = apply_multiplier(F, m);
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(G.coeffs[i], F.coeffs[i] * m.values[i]);
  EXPECT_THROW(apply_multiplier(F, SymbolTable(GridShape::lattice(8), "x")), Error);
}

TEST(Fft, FilterValuesAllowsAliasing) {
  std::mt19937_64 rng(25);
  auto s = GridShape::domain(16);
  auto f = random_field(s, rng);
  SymbolTable m(s, "random");
  for (int k = 0; k < 16; ++k)
    for (int l = 0; l < 16; ++l) m(k, l) = 1.0 / (1.0 + k * ((16 - k) % 16) + l * ((16 - l) % 16));
  auto expected = filter_field(f, m);
  auto buf = f;
  filter_values(s, buf.values(), m.values, buf.values());
  EXPECT_LT(oracle::max_abs_diff(expected, buf), 1e-15);
}

TEST(Fft, SignedIndexWrapsUpperHalf) {
  EXPECT_EQ(signed_index(0, 8), 0);
  EXPECT_EQ(signed_index(3, 8), 3);
  EXPECT_EQ(signed_index(4, 8), -4);
  EXPECT_EQ(signed_index(7, 8), -1);
}

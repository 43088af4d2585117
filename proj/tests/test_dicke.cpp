#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "cptclock/dicke.hpp"
#include "support.hpp"

using namespace cptclock;
namespace {
constexpr double kPi = std::numbers::pi;

double sq(double x) { return x * x; }
}  // namespace

TEST(DickeState, RejectsBadLength) {
  EXPECT_THROW(DickeState(3, StateVector::Zero(3)), std::invalid_argument);
}

TEST(DickeState, RejectsUnnormalized) {
  StateVector v = StateVector::Zero(4);
  v(0) = 2.0;
  EXPECT_THROW(DickeState(3, v), std::invalid_argument);
}

TEST(DickeState, MagneticNumbersDescend) {
  const auto s = css(4, 0.0, 0.0);
  EXPECT_DOUBLE_EQ(s.magnetic_number(0), 2.0);
  EXPECT_DOUBLE_EQ(s.magnetic_number(4), -2.0);
}

TEST(Css, NorthPoleIsTopState) {
  const auto s = css(7, 0.0, 0.0);
  EXPECT_NEAR(std::abs(s[0]), 1.0, 1e-15);
  const auto ops = make_operators(7);
  EXPECT_NEAR(expect(s, ops.sz), 3.5, 1e-12);
}

TEST(Css, OppositeEquatorPointsAreOrthogonal) {
  for (int n : {1, 4, 9}) EXPECT_NEAR(fidelity(css(n, kPi / 2, 0.0), css(n, kPi / 2, kPi)), 0.0, 1e-14);
}

TEST(Css, LargeNStaysNormalized) {
  EXPECT_NEAR(css(5000, 1.1, 0.3).norm(), 1.0, 1e-12);
}

TEST(Css, RejectsNonPositiveN) { EXPECT_THROW(css(0, 0.0, 0.0), std::invalid_argument); }

TEST(Rotate, MicrowavePulseTakesPoleToEquator) {
  for (int n : {1, 2, 5, 20}) {
    EXPECT_NEAR(fidelity(rotate(css(n, 0.0, 0.0), Axis::y, -kPi / 2), css(n, kPi / 2, kPi)), 1.0, 1e-12);
  }
}

TEST(Rotate, ZShiftsAzimuth) {
  const auto s = rotate(css(6, 0.7, 0.2), Axis::z, 0.9);
  EXPECT_NEAR(fidelity(s, css(6, 0.7, 1.1)), 1.0, 1e-12);
}

TEST(Rotate, OneParameterGroup) {
  const auto s = css(9, 0.4, 1.3);
  for (Axis axis : {Axis::x, Axis::y}) {
    const auto twice = rotate(rotate(s, axis, 0.3), axis, 0.5);
    EXPECT_NEAR(fidelity(twice, rotate(s, axis, 0.8)), 1.0, 1e-12);
  }
}

TEST(Rotate, FullTurnAboutZIsIdentityForBothParities) {
  for (int n : {4, 5}) {
    const auto s = css(n, 0.9, 0.4);
    EXPECT_NEAR(fidelity(rotate(s, Axis::z, 2 * kPi), s), 1.0, 1e-12);
  }
}

TEST(Rotate, RespectsDenseLimit) {
  const int saved = dense_atom_limit();
  dense_atom_limit() = 10;
  EXPECT_THROW(rotate(css(11, 0.1, 0.0), Axis::x, 0.3), ResourceLimitError);
  EXPECT_NO_THROW(rotate(css(11, 0.1, 0.0), Axis::z, 0.3));
  EXPECT_NO_THROW(squeeze(css(11, 0.1, 0.0), 0.3));
  dense_atom_limit() = saved;
}

TEST(Squeeze, ZeroIsIdentity) {
  const auto s = css(5, 1.0, 0.5);
  EXPECT_NEAR(fidelity(squeeze(s, 0.0), s), 1.0, 1e-15);
}

TEST(Squeeze, UnsqueezeInverts) {
  const auto s = css(12, 1.2, 0.1);
  EXPECT_NEAR(fidelity(squeeze(squeeze(s, 0.37), 0.37, Twist::unsqueeze), s), 1.0, 1e-12);
}

TEST(Squeeze, TwoPiIsGlobalPhase) {
  for (int n : {6, 7}) {
    const auto s = css(n, 1.2, 0.1);
    EXPECT_NEAR(fidelity(squeeze(s, 2 * kPi), s), 1.0, 1e-12);
  }
}

TEST(Squeeze, EvenCatMatchesClosedForm) {
  for (const auto& c : testsupport::load_cat_phases()) {
    if (c.n % 2 != 0) continue;
    const auto s = squeeze(css(c.n, kPi / 2, kPi), kPi / 2);
    EXPECT_EQ(c.sign, -((c.n / 2) % 2 == 0 ? 1 : -1)) << "N=" << c.n;
    EXPECT_GE(fidelity(s, testsupport::cat_state(c, c.sign)), 1.0 - 1e-10) << "N=" << c.n;
  }
}

TEST(Squeeze, OddCatPhaseFrozenInGolden) {
  for (const auto& c : testsupport::load_cat_phases()) {
    if (c.n % 2 == 0) continue;
    const auto s = squeeze(css(c.n, kPi / 2, kPi), kPi / 2);
    EXPECT_GE(fidelity(s, testsupport::cat_state(c, c.sign)), 1.0 - 1e-10) << "N=" << c.n;
    EXPECT_LE(fidelity(s, testsupport::cat_state(c, -c.sign)), 1e-10) << "N=" << c.n;
  }
}

TEST(DarkEvolve, RotatesAboutZ) {
  const auto s = dark_evolve(css(8, kPi / 2, kPi), 0.3);
  EXPECT_NEAR(fidelity(s, css(8, kPi / 2, kPi + 0.3)), 1.0, 1e-12);
}

TEST(DarkEvolve, PoleIsInvariant) {
  const auto s = css(8, 0.0, 0.0);
  EXPECT_NEAR(fidelity(dark_evolve(s, 1.7), s), 1.0, 1e-15);
}

TEST(Expect, ConventionalSignalAndNoise) {
  const int n = 16;
  const auto ops = make_operators(n);
  for (double x : {0.0, 0.4, 1.9, 3.0}) {
    const auto s = css(n, kPi / 2, kPi + x);
    EXPECT_NEAR(expect(s, ops.sx), -0.5 * n * std::cos(x), 1e-12);
    EXPECT_NEAR(std_dev(s, ops.sx), 0.5 * std::sqrt(n) * std::abs(std::sin(x)), 1e-12);
  }
}

TEST(Expect, ZCatMoments) {
  const int n = 10;
  const auto cat = superpose({{1.0, css(n, 0.0, 0.0)}, {1.0, css(n, kPi, 0.0)}});
  const auto ops = make_operators(n);
  EXPECT_NEAR(expect(cat, ops.sz), 0.0, 1e-12);
  EXPECT_NEAR(std_dev(cat, ops.sz), 0.5 * n, 1e-12);
}

TEST(Expect, EigenstateHasNoSpread) {
  const auto ops = make_operators(5);
  EXPECT_EQ(std_dev(css(5, 0.0, 0.0), ops.sz), 0.0);
}

TEST(Expect, DimensionMismatchThrows) {
  const auto ops = make_operators(4);
  EXPECT_THROW(expect(css(5, 0.0, 0.0), ops.sx), std::invalid_argument);
  EXPECT_THROW(std_dev(css(5, 0.0, 0.0), ops.sx), std::invalid_argument);
}

TEST(Expect, NonHermitianThrows) {
  HermitianMatrix op = HermitianMatrix::Zero(2, 2);
  op(0, 1) = 1.0;
  const auto s = css(1, kPi / 2, kPi / 2);
  EXPECT_THROW(expect(s, op), std::invalid_argument);
}

TEST(SpinMoments, AgreesWithDenseOperators) {
  const auto s = squeeze(css(11, 1.0, 0.2), 0.3);
  const auto ops = make_operators(11);
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    const auto m = spin_moments(s, a);
    EXPECT_NEAR(m.mean, expect(s, ops[a]), 1e-12);
    EXPECT_NEAR(m.std_dev, std_dev(s, ops[a]), 1e-12);
  }
}

TEST(Fidelity, GlobalPhaseAndMismatch) {
  const auto s = css(4, 0.3, 0.2);
  const auto phased = superpose({{std::polar(1.0, 0.8), s}});
  EXPECT_NEAR(fidelity(s, phased), 1.0, 1e-15);
  EXPECT_THROW(fidelity(s, css(5, 0.3, 0.2)), std::invalid_argument);
}

// Random reachable states: unitarity and the Bloch-sphere bound.
TEST(DickeProperties, UnitarityAndBlochBound) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 2 * kPi);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 60);
    DickeState s = css(n, u(rng) / 2, u(rng));
    for (int k = 0; k < 6; ++k) {
      switch (rng() % 4) {
        case 0: s = rotate(s, Axis::x, u(rng)); break;
        case 1: s = rotate(s, Axis::y, u(rng)); break;
        case 2: s = squeeze(s, u(rng) / 2, rng() % 2 ? Twist::squeeze : Twist::unsqueeze); break;
        default: s = dark_evolve(s, u(rng)); break;
      }
      ASSERT_NEAR(s.norm(), 1.0, 1e-12);
    }
    const double len2 = sq(spin_moments(s, Axis::x).mean) + sq(spin_moments(s, Axis::y).mean) +
                        sq(spin_moments(s, Axis::z).mean);
    EXPECT_LE(len2, sq(0.5 * n) + 1e-9);
  }
}

TEST(DickeProperties, UnitarityAtLargeN) {
  DickeState s = css(1000, 1.0, 0.5);
  s = rotate(squeeze(rotate(s, Axis::x, 0.7), 0.01), Axis::y, 1.3);
  EXPECT_NEAR(s.norm(), 1.0, 1e-12);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ncq/specfun.hpp"
#include "oracle_values.hpp"

using namespace ncq;

namespace {

double halfOrderK(double z) { return std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z); }

}  // namespace

TEST(Quadrature, FiniteSemiInfiniteAndInfiniteRanges) {
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 0.0, 1.0), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 1.0, 0.0), -1.0 / 3.0, 1e-14);
  EXPECT_EQ(integrate([](double x) { return x; }, 2.0, 2.0), 0.0);
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_NEAR(integrate([](double t) { return std::exp(-std::cosh(t)); }, 0.0, inf), oracle::kBesselK0At1, 1e-13);
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, -inf, inf), std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_NEAR(integrate([](double x) { return std::exp(x); }, -inf, 0.0), 1.0, 1e-13);
}

TEST(Quadrature, InvalidInput) {
  const auto f = [](double x) { return x; };
  EXPECT_THROW(integrate(f, std::nan(""), 1.0), DomainError);
  QuadratureSpec q;
  q.absTol = 1e-16;
  EXPECT_THROW(integrate(f, 0.0, 1.0, q), ParameterError);
  q = {};
  q.relTol = 0.0;
  EXPECT_THROW(integrate(f, 0.0, 1.0, q), ParameterError);
  q = {};
  q.maxLevels = 0;
  EXPECT_THROW(integrate(f, 0.0, 1.0, q), ParameterError);
}

TEST(Quadrature, ReportsNonConvergence) {
  QuadratureSpec q;
  q.maxLevels = 2;
  EXPECT_THROW(integrate([](double x) { return std::sin(200.0 * x); }, 0.0, 3.0, q), ConvergenceError);
}

TEST(BesselK, OracleValues) {
  EXPECT_NEAR(besselK(0.0, 1.0).real(), oracle::kBesselK0At1, 1e-13);
  EXPECT_NEAR(besselK(0.5, 1.0).real(), oracle::kBesselKHalfAt1, 1e-13);
  const auto k = besselK({0.5, 1.0}, 2.0);
  EXPECT_NEAR(k.real(), oracle::kBesselKHalfPlusIAt2Re, 1e-13);
  EXPECT_NEAR(k.imag(), oracle::kBesselKHalfPlusIAt2Im, 1e-13);
}

TEST(BesselK, HalfOrderClosedForm) {
  for (double z : {0.01, 0.1, 1.0, 10.0, 50.0}) {
    const auto k = besselK(0.5, z);
    EXPECT_LT(std::abs(k - halfOrderK(z)) / halfOrderK(z), 1e-10) << z;
  }
}

TEST(BesselK, EvenInOrder) {
  for (std::complex<double> nu : {std::complex<double>(0.3, 0.0), {0.5, 2.0}, {1.5, -0.7}, {3.0, 4.0}}) {
    for (double z : {0.5, 2.0, 7.0}) {
      const auto a = besselK(nu, z), b = besselK(-nu, z);
      EXPECT_LT(std::abs(a - b), 1e-13 * std::max(1.0, std::abs(a)));
    }
  }
}

// K_{nu+1}(z) = K_{nu-1}(z) + (2 nu / z) K_nu(z)
TEST(BesselK, RecurrenceInOrder) {
  for (std::complex<double> nu : {std::complex<double>(0.25, 0.0), {0.5, 1.0}, {2.0, -1.5}, {-1.0, 3.0}}) {
    for (double z : {0.5, 2.0, 10.0}) {
      const auto lhs = besselK(nu + 1.0, z);
      const auto rhs = besselK(nu - 1.0, z) + 2.0 * nu / z * besselK(nu, z);
      EXPECT_LT(std::abs(lhs - rhs), 1e-9 * std::max(1.0, std::abs(lhs))) << nu << " " << z;
    }
  }
}

TEST(BesselK, DomainLimits) {
  EXPECT_THROW(besselK(0.5, 1e-4), DomainError);
  EXPECT_THROW(besselK(0.5, 51.0), DomainError);
  EXPECT_THROW(besselK({0.5, 20.5}, 1.0), DomainError);
  EXPECT_THROW(besselK(0.5, std::nan("")), DomainError);
}

TEST(Hermite, BaseCasesAndSmallValues) {
  EXPECT_EQ(hermite(0, 0.7), 1.0);
  EXPECT_EQ(hermite(1, 0.7), 1.4);
  EXPECT_EQ(hermite(3, 2.0), 40.0);
  EXPECT_EQ(hermite(4, 1.0), -20.0);
  EXPECT_THROW(hermite(-1, 0.0), ParameterError);
  EXPECT_THROW(hermite(201, 0.0), ParameterError);
}

TEST(Hermite, ExactCoefficients) {
  // H_4 = 16x^4 - 48x^2 + 12
  EXPECT_EQ(hermiteCoefficients(4), (std::vector<Rational>{12, 0, -48, 0, 16}));
  for (int n = 0; n <= 12; ++n) {
    const auto c = hermiteCoefficients(n);
    ASSERT_EQ(c.size(), static_cast<std::size_t>(n + 1));
    EXPECT_EQ(c.back(), Rational(boost::multiprecision::cpp_int(1) << n));
    // parity H_n(-x) = (-1)^n H_n(x), exactly
    const Rational x(3, 7);
    const Rational sign = n % 2 == 0 ? 1 : -1;
    EXPECT_EQ(evaluatePolynomial(c, -x), sign * evaluatePolynomial(c, x));
    EXPECT_NEAR(evaluatePolynomial(c, x).convert_to<double>(), hermite(n, 3.0 / 7.0),
                1e-12 * std::max(1.0, std::abs(hermite(n, 3.0 / 7.0))));
  }
}

TEST(Psi2, OrthonormalUpToLevelTen) {
  const double inf = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= 10; ++m) {
    for (int n = m; n <= 10; ++n) {
      const double g = integrate([&](double p) { return psi2(m, p) * psi2(n, p); }, -inf, inf);
      EXPECT_NEAR(g, m == n ? 1.0 : 0.0, 1e-10) << m << "," << n;
    }
  }
}

TEST(Psi2, LadderDerivativesAgreeWithDifferences) {
  for (int n : {0, 1, 4, 9}) {
    for (double p : {-2.5, -0.3, 0.0, 1.7}) {
      const auto v = psi2Full(n, p);
      const double h = 1e-3;
      const double d1 = (psi2(n, p + h) - psi2(n, p - h)) / (2 * h);
      const double d2 = (psi2(n, p + h) - 2 * v.value + psi2(n, p - h)) / (h * h);
      EXPECT_NEAR(v.d1, d1, 1e-5);
      EXPECT_NEAR(v.d2, d2, 1e-4);
      // oscillator equation
      EXPECT_NEAR(0.5 * (-v.d2 + p * p * v.value), (n + 0.5) * v.value, 1e-12);
    }
  }
}

TEST(Psi2, ParityAndLiteralPrefactor) {
  for (int n = 0; n <= 6; ++n) {
    const double s = n % 2 == 0 ? 1.0 : -1.0;
    EXPECT_NEAR(psi2(n, -1.3), s * psi2(n, 1.3), 1e-15);
    const double scale = std::sqrt(std::ldexp(1.0, n) * std::tgamma(n + 1.0));
    EXPECT_NEAR(psi2LiteralPrefactor(n, 0.8) * scale, psi2(n, 0.8), 1e-14);
  }
  EXPECT_THROW(psi2(61, 0.0), ParameterError);
  EXPECT_THROW(psi2(-1, 0.0), ParameterError);
}

TEST(Psi1, OracleValuesAtOrigin) {
  const auto v = psi1Full(1.0, 0.0);
  EXPECT_NEAR(v.value, oracle::kPsi1At0, 1e-12);
  EXPECT_NEAR(v.d1, oracle::kPsi1PrimeAt0, 1e-12);
  EXPECT_NEAR(v.d2, oracle::kPsi1SecondAt0, 1e-12);
}

TEST(Psi1, RealAndDecaying) {
  for (double e1 : {0.25, 1.0, 4.0}) {
    for (double x = -4.0; x <= 3.0; x += 0.5) EXPECT_LT(psi1Full(e1, x).imagResidue, 1e-12);
    // e^{x/2} K(e^x) ~ e^{-e^x}: far below the bulk amplitude by x = 3
    EXPECT_LT(std::abs(psi1(e1, 3.0)), 1e-8);
    EXPECT_LT(std::abs(psi1(e1, 3.5)), std::abs(psi1(e1, 3.0)));
  }
}

// The Liouville sector satisfies -psi'' + (e^{2x} - e^x) psi = E1 psi.
TEST(Psi1, SolvesLiouvilleOde) {
  for (double e1 : {0.5, 1.0, 2.0}) {
    for (double x : {-2.0, -0.5, 0.0, 1.0}) {
      const auto v = psi1Full(e1, x);
      const double r = -v.d2 + (std::exp(2 * x) - std::exp(x)) * v.value - e1 * v.value;
      EXPECT_LT(std::abs(r), 1e-11) << e1 << " " << x;
    }
  }
}

TEST(Psi1, ZeroEnergy) {
  EXPECT_THROW(psi1(0.0, 0.0), DomainError);
  EXPECT_THROW(psi1(-1.0, 0.0), DomainError);
  const auto u = psi1Unnormalized(0.0, 0.0);
  // 2 e^{x/2} K_{1/2}(e^x) at x = 0
  EXPECT_NEAR(u.value, 2.0 * oracle::kBesselKHalfAt1, 1e-13);
  EXPECT_THROW(psi1Unnormalized(-0.1, 0.0), DomainError);
}

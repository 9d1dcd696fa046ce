#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ncq/operator.hpp"

using namespace ncq;

namespace {

using C = QComplex;
using TF = ExactTilde;
using Op = TildeOperator<C>;
using FTF = FloatTilde;
using FOp = TildeOperator<std::complex<double>>;

const ExactParams kDefault{};
const ExactParams kGeneral{Rational(3, 2), Rational(1, 3), Rational(2), Rational(1, 2), Rational(-1, 4)};
const ExactParams kPreset = presetFromGamma(Rational(1), Rational(2));

TF t(TVar v) { return TF::variable(v); }
TF one() { return TF::constant(1); }

}  // namespace

TEST(TrigOperator, CosineOfDerivativeOnQuadratic) {
  // cos(d) x^2 = x^2 - 1
  const auto op = Op::trig(0, TrigKind::Cos, QComplex(1), one());
  EXPECT_TRUE(op.apply(t(TVar::xt1) * t(TVar::xt1)) == t(TVar::xt1) * t(TVar::xt1) - one());
}

TEST(TrigOperator, SineKillsConstants) {
  const auto op = Op::trig(1, TrigKind::Sin, QComplex(Rational(1, 2)), one());
  EXPECT_TRUE(op.apply(one()).empty());
  // sin(a d) x = a
  EXPECT_TRUE(op.apply(t(TVar::xt2)) == TF::constant(QComplex(Rational(1, 2))));
}

TEST(TrigOperator, IdentityAndIndependentDirections) {
  const auto f = TF::exponential(2, QComplex(3)) * t(TVar::pt1) + t(TVar::xt1);
  EXPECT_TRUE(Op::identity(one()).apply(f) == f);
  // cos(a d_2) on a function without x~2 dependence
  EXPECT_TRUE(Op::trig(1, TrigKind::Cos, QComplex(7), one()).apply(f) == f);
  EXPECT_TRUE(Op::trig(1, TrigKind::Sin, QComplex(7), one()).apply(f).empty());
}

TEST(TrigOperator, TaylorAndShiftFormsAgreeOnPolynomials) {
  const auto psi = t(TVar::xt2) * t(TVar::xt2) * t(TVar::xt2) * t(TVar::xt2) + t(TVar::xt1) * t(TVar::xt2);
  Op op;
  op.addTrig({1, TrigKind::Cos, QComplex(Rational(3, 2))}, t(TVar::xt1));
  op.addTrig({1, TrigKind::Sin, QComplex(Rational(1, 2))}, one());
  const auto taylor = op.applyTaylor(psi, 10);
  EXPECT_TRUE(op.apply(psi) == taylor);
  EXPECT_TRUE(op.trigToShift().apply(psi) == taylor);
}

// cos(a d) e^{kx} = cos(k a) e^{kx}, sin(a d) e^{kx} = sin(k a) e^{kx}
TEST(TrigOperator, ExponentialsAreEigenfunctions) {
  using Z = std::complex<double>;
  const ComplexPoint z{0.3, -0.4, 0.0, 0.0};
  for (int twiceK : {1, 2, 4}) {
    const double kk = twiceK / 2.0;
    for (double a : {0.5, 1.0}) {
      // exp(twiceK x~1) with x~1 -> x~1 / 2 gives exp(k x~1) at half the argument
      const auto psi = FTF::exponential(twiceK);
      const ComplexPoint zh{z[0] / 2.0, z[1], z[2], z[3]};
      const auto cosOp = FOp::trig(0, TrigKind::Cos, Z(a / 2.0), FTF::constant(1.0));
      const auto sinOp = FOp::trig(0, TrigKind::Sin, Z(a / 2.0), FTF::constant(1.0));
      const Z base = std::exp(kk * z[0]);
      const Z c = cosOp.apply(psi).evaluate(zh), s = sinOp.apply(psi).evaluate(zh);
      EXPECT_LT(std::abs(c - std::cos(kk * a) * base), 1e-12 * std::abs(base));
      EXPECT_LT(std::abs(s - std::sin(kk * a) * base), 1e-12 * std::abs(base));
    }
  }
}

TEST(TrigOperator, ExactShiftOfExponentialIsRefused) {
  const auto op = Op::trig(0, TrigKind::Cos, QComplex(1), one());
  EXPECT_THROW(op.apply(TF::exponential(1)), RepresentationError);
}

TEST(LeftStar, OracleOnLowDegreeMonomials) {
  for (const auto& p : {kDefault, kGeneral}) {
    const auto H = oscillatorHamiltonian<C>(p);
    const auto ex = expandLeftStar(H, p);
    EXPECT_TRUE(ex.terminated);
    EXPECT_TRUE(ex.hr.hasRealCoefficients());
    EXPECT_TRUE(ex.him.hasRealCoefficients());
    for (const auto& psi : phaseMonomials<C>(p, 2)) {
      EXPECT_TRUE(leftStarOracleResidual(ex, H, psi, p).isZero()) << psi.toString();
    }
  }
}

TEST(LeftStar, ConstantHamiltonianHasNoImaginaryPart) {
  const auto H = constantFunction<C>(kGeneral, QComplex(Rational(5, 2)));
  const auto ex = expandLeftStar(H, kGeneral);
  EXPECT_TRUE(ex.him.empty());
  EXPECT_TRUE(ex.hr == PhaseOperator<C>::multiplication(H));
}

TEST(LeftStar, RejectsHighDegreeAndNonPolynomialInput) {
  const auto x1 = coordinate<C>(kDefault, Var::x1);
  EXPECT_THROW(expandLeftStar(x1 * x1 * x1, kDefault), ParameterError);
  EXPECT_THROW(expandLeftStar(structureFunction<C>(kDefault).timesEPower(1), kDefault), ParameterError);
}

// The imaginary part matches its published form; three real-part entries
// (d_x2, d_x1^2, d_x2^2) differ.
TEST(LeftStar, PrintedComparisonAtDefaultParameters) {
  const auto ex = expandLeftStar(oscillatorHamiltonian<C>(kDefault), kDefault);
  EXPECT_TRUE(ex.himVersusPrinted.empty());
  ASSERT_EQ(ex.hrVersusPrinted.size(), 3u);
  std::vector<std::string> terms;
  for (const auto& m : ex.hrVersusPrinted) terms.push_back(m.term);
  std::sort(terms.begin(), terms.end());
  EXPECT_EQ(terms, (std::vector<std::string>{"d_x1 d_x1", "d_x2", "d_x2 d_x2"}));
}

TEST(Bopp, PresetOperatorMatchesPublishedForm) {
  const auto h1 = h1StarOperator<C>(kPreset);
  EXPECT_TRUE(compareOperators(h1, printedH1Star<C>()).empty());
}

TEST(Bopp, ActionOnConstant) {
  const auto r = h1StarOperator<C>(kPreset).apply(one());
  const TF expected =
      (t(TVar::xt2) * t(TVar::xt2) + TF::exponential(2) - TF::exponential(1) + TF::constant(QComplex(Rational(1, 4)))) *
      QComplex(Rational(1, 2));
  EXPECT_TRUE(r == expected) << r.toString();
}

TEST(Bopp, LinearSymbolsGiveStarProductWithGenerators) {
  // x~2 *_1 x~1 = x~1 x~2 - i g/2
  const Rational g(3);
  const auto op = boppOperator(t(TVar::xt2), g, Rational(0));
  EXPECT_TRUE(op.apply(t(TVar::xt1)) == t(TVar::xt1) * t(TVar::xt2) + TF::constant(QComplex{0, Rational(-3, 2)}));
  EXPECT_TRUE(op.apply(t(TVar::xt1)) == blockMoyal(t(TVar::xt2), t(TVar::xt1), g, Rational(0), 4).value);
}

TEST(Bopp, RejectsNonCommutingProducts) {
  EXPECT_THROW(boppOperator(t(TVar::xt1) * t(TVar::xt2), Rational(1), Rational(1)), RepresentationError);
  EXPECT_THROW(boppOperator(t(TVar::pt1) * t(TVar::pt2), Rational(1), Rational(1)), RepresentationError);
  EXPECT_THROW(boppOperator(TF::exponential(1) * t(TVar::xt1), Rational(1), Rational(1)), RepresentationError);
}

TEST(EquationOperators, RealAndImaginaryPartsRecombine) {
  const auto h1 = h1StarOperator<C>(kPreset);
  const auto im = imaginaryEquationOperator(h1);
  const auto re = realEquationOperator(h1, Rational(2));
  EXPECT_TRUE(im.hasRealCoefficients());
  EXPECT_TRUE(re.hasRealCoefficients());
  // re/2 + E1 - i im/2 == h1
  const auto back = re * QComplex(Rational(1, 2)) + Op::multiplication(TF::constant(QComplex(2))) +
                    im * QComplex{0, Rational(-1, 2)};
  EXPECT_TRUE(back == h1);
}

TEST(FiniteDifference, SecondDerivativeOfSine) {
  const ComplexFn f = [](const ComplexPoint& z) { return std::sin(z[0]); };
  FiniteDifferenceSpec fd;
  fd.step2 = 1e-3;
  for (int k = 0; k <= 20; ++k) {
    const double x = std::numbers::pi * k / 20.0;
    const auto d2 = centralDifference(f, {x, 0.0, 0.0, 0.0}, {2, 0, 0, 0}, fd);
    EXPECT_LT(std::abs(d2 + std::sin(x)), 1e-8) << x;
    const auto d1 = centralDifference(f, {x, 0.0, 0.0, 0.0}, {1, 0, 0, 0}, fd);
    EXPECT_LT(std::abs(d1 - std::cos(x)), 1e-10) << x;
  }
}

TEST(FiniteDifference, MixedDerivative) {
  const ComplexFn f = [](const ComplexPoint& z) { return std::exp(z[0]) * std::sin(z[1]); };
  const auto d = centralDifference(f, {0.2, 0.7, 0.0, 0.0}, {1, 1, 0, 0}, {});
  // truncation and round-off both sit near 1e-8 for the default steps
  EXPECT_LT(std::abs(d - std::exp(0.2) * std::cos(0.7)), 1e-7);
}

TEST(ApplyNumeric, MatchesSymbolicActionOnPolynomial) {
  // (x~2 d_1 + cos(d_2 / 2) + d_1^2) on x~1^3 x~2^2
  Op op;
  op.addDiff({1, 0, 0, 0}, t(TVar::xt2));
  op.addDiff({2, 0, 0, 0}, one());
  op.addTrig({1, TrigKind::Cos, QComplex(Rational(1, 2))}, one());
  const auto psi = t(TVar::xt1) * t(TVar::xt1) * t(TVar::xt1) * t(TVar::xt2) * t(TVar::xt2);
  const auto exact = op.apply(psi);
  AnalyticHandle h;
  h.value = [&](const ComplexPoint& z) { return psi.evaluate(z); };
  const Grid g{{Axis{"xt1", 0, -1, 1, 5}, Axis{"xt2", 1, -1, 1, 5}}, {}};
  const auto field = applyNumeric(op, h, g);
  EXPECT_GT(field.finiteDifferenceCalls, 0u);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const auto p = g.point(n);
    const auto want = exact.evaluate(ComplexPoint{p[0], p[1], p[2], p[3]});
    EXPECT_LT(std::abs(field.values[n] - want), 1e-7) << n;
  }
}

TEST(ApplyNumeric, RejectsDegenerateGrids) {
  AnalyticHandle h;
  h.value = [](const ComplexPoint&) { return std::complex<double>(1.0); };
  EXPECT_THROW(applyNumeric(Op::identity(one()), h, Grid{}), GridError);
  EXPECT_THROW(applyNumeric(Op::identity(one()), h, makeGrid1("xt1", 0, 1, 1, 5)), GridError);
  EXPECT_THROW(applyNumeric(Op::identity(one()), h, makeGrid1("xt1", 0, 0, 1, 1)), GridError);
  EXPECT_THROW(applyNumeric(Op::identity(one()), AnalyticHandle{}, makeGrid1("xt1", 0, 0, 1, 3)), ParameterError);
}

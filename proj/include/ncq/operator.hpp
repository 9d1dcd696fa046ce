#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include "ncq/diff_operator.hpp"
#include "ncq/errors.hpp"
#include "ncq/grid.hpp"
#include "ncq/params.hpp"
#include "ncq/phase_function.hpp"
#include "ncq/star_product.hpp"
#include "ncq/tilde_function.hpp"
#include "ncq/transform.hpp"

namespace ncq {

template <Coefficient C>
using PhaseOperator = DiffOperator<PhaseFunction<C>>;
template <Coefficient C>
using TildeOperator = DiffOperator<TildeFunction<C>>;

/// One differing term between an expanded operator and a reference one.
struct OperatorMismatch {
  std::string term;
  std::string computed;
  std::string reference;
};

namespace detail {

template <class F>
std::string termLabel(const MultiIndex& a) {
  std::string s;
  for (int v = 0; v < 4; ++v) {
    for (int j = 0; j < a[v]; ++j) s += std::string(s.empty() ? "" : " ") + "d_" + function_traits<F>::name(v);
  }
  return s.empty() ? "1" : s;
}

template <class F, class Key>
std::string trigLabel(const Key& k) {
  using T = coeff_traits<typename function_traits<F>::coeff_type>;
  std::ostringstream os;
  os << (k.kind == TrigKind::Cos ? "cos(" : "sin(") << T::toComplex(k.alpha).real() << " d_"
     << function_traits<F>::name(k.var) << ")";
  return os.str();
}

template <class Map, class Key>
std::string coeffString(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? "0" : it->second.toString();
}

}  // namespace detail

/// Term-by-term difference of two operators (differential and trig parts).
template <class F>
std::vector<OperatorMismatch> compareOperators(const DiffOperator<F>& computed, const DiffOperator<F>& reference) {
  std::vector<OperatorMismatch> out;
  const auto diff = computed - reference;
  for (const auto& [a, c] : diff.diffTerms()) {
    out.push_back({detail::termLabel<F>(a), detail::coeffString(computed.diffTerms(), a),
                   detail::coeffString(reference.diffTerms(), a)});
  }
  for (const auto& [k, c] : diff.trigTerms()) {
    out.push_back({detail::trigLabel<F>(k), detail::coeffString(computed.trigTerms(), k),
                   detail::coeffString(reference.trigTerms(), k)});
  }
  for (const auto& [k, c] : diff.shiftTerms()) {
    std::ostringstream os;
    os << "S_" << function_traits<F>::name(k.var) << "(" << coeff_traits<typename function_traits<F>::coeff_type>::toComplex(k.amount) << ")";
    out.push_back({os.str(), detail::coeffString(computed.shiftTerms(), k),
                   detail::coeffString(reference.shiftTerms(), k)});
  }
  return out;
}

template <Coefficient C>
struct LeftStarExpansion {
  /// O with O(psi) = H * psi.
  PhaseOperator<C> full;
  /// Real-coefficient parts with O = Hr + (i/2) Him.
  PhaseOperator<C> hr;
  PhaseOperator<C> him;
  /// False when the theta series was cut at the truncation order.
  bool terminated = true;
  int highestOrder = 0;
  std::vector<OperatorMismatch> hrVersusPrinted;
  std::vector<OperatorMismatch> himVersusPrinted;
};

/// Published form of the real part for H = (1/2)(p.p + x.x).
template <Coefficient C>
PhaseOperator<C> printedHr(const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  const auto s = structureOf<C>(p);
  auto k = [&](const R& r) { return PhaseFunction<C>::constant(s, T::fromReal(r)); };
  const auto e = structureFunction<C>(p);
  const R half(R(1) / R(2));
  PhaseOperator<C> op;
  // (1/2)[p1^2 + p2^2 + x1^2 + x2^2]
  PhaseFunction<C> pot(s);
  for (Var v : kAllVars) pot += coordinate<C>(p, v) * coordinate<C>(p, v);
  op.addDiff({0, 0, 0, 0}, pot);
  // + (thetabar hbar/2)(d_p2 d_x1 - d_p1 d_x2)
  const R tbh = p.thetabar * p.hbar / R(2);
  op.addDiff({1, 0, 0, 1}, k(tbh));
  op.addDiff({0, 1, 1, 0}, k(-tbh));
  // - (theta hbar e/2)(d_x2 d_p1 - d_x1 d_p2)
  const R thh = p.theta * p.hbar / R(2);
  op.addDiff({0, 1, 1, 0}, e * T::fromReal(-thh));
  op.addDiff({1, 0, 0, 1}, e * T::fromReal(thh));
  // - (hbar^2/4) Laplacian
  const R h2 = p.hbar * p.hbar / R(4);
  op.addDiff({2, 0, 0, 0}, k(-h2));
  op.addDiff({0, 2, 0, 0}, k(-h2));
  op.addDiff({0, 0, 2, 0}, k(-h2));
  op.addDiff({0, 0, 0, 2}, k(-h2));
  // - (thetabar^2/4)(d_p1^2 + d_p2^2)
  const R tb2 = p.thetabar * p.thetabar / R(4);
  op.addDiff({0, 0, 2, 0}, k(-tb2));
  op.addDiff({0, 0, 0, 2}, k(-tb2));
  // - (theta^2 e/4)(d_x1^2 + d_x2^2)
  const R th2 = p.theta * p.theta / R(4);
  op.addDiff({2, 0, 0, 0}, e * T::fromReal(-th2));
  op.addDiff({0, 2, 0, 0}, e * T::fromReal(-th2));
  // - (theta e/4)(w2 d_x2 + w1 d_x1)
  const R th4 = p.theta / R(4);
  op.addDiff({1, 0, 0, 0}, e * T::fromReal(-th4 * p.omega1));
  op.addDiff({0, 1, 0, 0}, e * T::fromReal(-th4 * p.omega2));
  return op * T::fromReal(half);
}

/// Published form of the imaginary part for H = (1/2)(p.p + x.x).
template <Coefficient C>
PhaseOperator<C> printedHim(const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  auto x = [&](Var v) { return coordinate<C>(p, v); };
  const auto e = structureFunction<C>(p);
  const C tb = T::fromReal(p.thetabar), th = T::fromReal(p.theta), hb = T::fromReal(p.hbar);
  PhaseOperator<C> op;
  op.addDiff({0, 0, 0, 1}, x(Var::p1) * tb);
  op.addDiff({0, 0, 1, 0}, x(Var::p2) * (-tb));
  op.addDiff({0, 1, 0, 0}, e * x(Var::x1) * th);
  op.addDiff({1, 0, 0, 0}, e * x(Var::x2) * (-th));
  op.addDiff({0, 0, 1, 0}, x(Var::x1) * hb);
  op.addDiff({0, 0, 0, 1}, x(Var::x2) * hb);
  op.addDiff({1, 0, 0, 0}, x(Var::p1) * (-hb));
  op.addDiff({0, 1, 0, 0}, x(Var::p2) * (-hb));
  return op;
}

/// Expands f -> H * f into a differential operator by running the star
/// exponentials with the right slot held symbolically.
template <Coefficient C>
LeftStarExpansion<C> expandLeftStar(const PhaseFunction<C>& H, const DeformationParams<real_t<C>>& p,
                                    const StarOptions& opts = {}) {
  using T = coeff_traits<C>;
  const auto h = H.canonical();
  if (!h.isPolynomial()) throw ParameterError("expandLeftStar: H must be a polynomial");
  for (Var v : kAllVars) {
    if (h.degree(v) > 2) throw ParameterError("expandLeftStar: H must have degree <= 2 per variable");
  }
  using Op = PhaseOperator<C>;
  using Term = TensorTerm<PhaseFunction<C>, Op, C>;
  const auto one = constantFunction<C>(p, T::one());
  std::vector<Term> terms{{h, Op::identity(one), T::one(), 0}};
  auto apply = [](const DerivOp& d, const auto& x) {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Op>) {
      return x.composeLeft(d);
    } else {
      return detail::applyDeriv<C>(d, x);
    }
  };
  auto isZero = [](const auto& x) { return x.empty(); };

  LeftStarExpansion<C> r;
  for (Sector s : opts.sectorOrder) {
    const int cap = s == Sector::Theta ? opts.order : -1;
    auto expanded = applyExponential(sectorLetters<C>(s, p, opts.convention), terms, cap, apply, isZero);
    if (s == Sector::Theta) {
      r.terminated = expanded.terminated;
      r.highestOrder = expanded.highestOrder;
    }
    terms = std::move(expanded.terms);
  }
  for (const auto& t : terms) r.full += t.right.leftMultiply((t.left * t.scale).timesEPower(t.ehalf).canonical());
  r.hr = r.full.realPart();
  r.him = r.full.imagPart() * T::fromInt(2);
  r.hrVersusPrinted = compareOperators(r.hr, printedHr<C>(p));
  r.himVersusPrinted = compareOperators(r.him, printedHim<C>(p));
  return r;
}

/// Hr(psi) + (i/2) Him(psi) - H * psi. Zero when the expansion is consistent.
template <Coefficient C>
PhaseFunction<C> leftStarOracleResidual(const LeftStarExpansion<C>& ex, const PhaseFunction<C>& H,
                                        const PhaseFunction<C>& psi, const DeformationParams<real_t<C>>& p,
                                        const StarOptions& opts = {}) {
  using T = coeff_traits<C>;
  const C halfI = T::i() / T::fromInt(2);
  const auto lhs = ex.hr.apply(psi) + ex.him.apply(psi) * halfI;
  return (lhs - starFull(H, psi, p, opts).value).canonical();
}

/// All monomials in (x1, x2, p1, p2) of total degree <= maxDegree.
template <Coefficient C>
std::vector<PhaseFunction<C>> phaseMonomials(const DeformationParams<real_t<C>>& p, int maxDegree) {
  using T = coeff_traits<C>;
  std::vector<PhaseFunction<C>> out;
  for (int a = 0; a <= maxDegree; ++a)
    for (int b = 0; a + b <= maxDegree; ++b)
      for (int c = 0; a + b + c <= maxDegree; ++c)
        for (int d = 0; a + b + c + d <= maxDegree; ++d)
          out.push_back(PhaseFunction<C>::monomial(structureOf<C>(p), {a, b, c, d, 0}, T::one()));
  return out;
}

namespace detail {

template <Coefficient C>
TildeOperator<C> operatorPower(const TildeOperator<C>& base, int n, const TildeOperator<C>& one) {
  TildeOperator<C> out = one;
  for (int j = 0; j < n; ++j) out = compose(base, out);
  return out;
}

}  // namespace detail

/// Operator of left multiplication f *_1 *_2 (.) obtained by the substitutions
///   x~1 -> x~1 + (i g/2) d_2,  x~2 -> x~2 - (i g/2) d_1,
///   p~1 -> p~1 + (i tb/2) d_p2, p~2 -> p~2 - (i tb/2) d_p1,
///   exp(k x~1) -> exp(k x~1) [cos(k g/2 d_2) + i sin(k g/2 d_2)].
/// Each monomial must be a product of mutually commuting substituted factors.
template <Coefficient C>
TildeOperator<C> boppOperator(const TildeFunction<C>& f, const real_t<C>& gamma, const real_t<C>& thetabar) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  using TF = TildeFunction<C>;
  using Op = TildeOperator<C>;
  const TF unit = TF::constant(T::one());
  const Op one = Op::identity(unit);
  const C gi = T::fromParts(R(0), gamma / R(2));
  const C ti = T::fromParts(R(0), thetabar / R(2));
  const Op X1 = Op::multiplication(TF::variable(TVar::xt1)) + Op::derivative({0, 1, 0, 0}, TF::constant(gi));
  const Op X2 = Op::multiplication(TF::variable(TVar::xt2)) + Op::derivative({1, 0, 0, 0}, TF::constant(-gi));
  const Op P1 = Op::multiplication(TF::variable(TVar::pt1)) + Op::derivative({0, 0, 0, 1}, TF::constant(ti));
  const Op P2 = Op::multiplication(TF::variable(TVar::pt2)) + Op::derivative({0, 0, 1, 0}, TF::constant(-ti));

  Op out;
  for (const auto& [k, c] : f.terms()) {
    const int m = k[0], a = k[1], b = k[2], d = k[3], ex = k[kExpSlot];
    if ((m > 0 || ex != 0) && a > 0) throw RepresentationError("bopp: x~1 and x~2 factors do not commute");
    if (b > 0 && d > 0) throw RepresentationError("bopp: p~1 and p~2 factors do not commute");
    if (m > 0 && ex != 0) throw RepresentationError("bopp: x~1^m exp(k x~1) is not supported");
    const Op momentum = compose(detail::operatorPower(P1, b, one), detail::operatorPower(P2, d, one));
    if (ex != 0) {
      if (!momentum.diffTerms().contains(MultiIndex{0, 0, 0, 0}) || momentum.diffTerms().size() != 1) {
        throw RepresentationError("bopp: exp(k x~1) combined with momenta is not supported");
      }
      const TF coef = TF::exponential(ex, c) * momentum.diffTerms().begin()->second;
      const C alpha = T::fromReal(R(ex) * gamma / R(2));
      out.addTrig({1, TrigKind::Cos, alpha}, coef);
      out.addTrig({1, TrigKind::Sin, alpha}, coef * T::i());
      continue;
    }
    const Op position = compose(detail::operatorPower(X1, m, one), detail::operatorPower(X2, a, one));
    out += compose(position, momentum) * c;
  }
  return out;
}

/// H1 *_1 (.) for the position sector of the transformed oscillator. The
/// Moyal parameter defaults to the table value gamma = theta * omega2.
template <Coefficient C>
TildeOperator<C> h1StarOperator(const DeformationParams<real_t<C>>& p,
                                std::optional<real_t<C>> moyal = std::nullopt) {
  using R = real_t<C>;
  const auto fact = transformHamiltonian<C>(p);
  const R g = moyal ? *moyal : p.theta * p.omega2;
  return boppOperator(fact.h1, g, R(0));
}

/// Published display of H1 *_1, stated for gamma = 1.
template <Coefficient C>
TildeOperator<C> printedH1Star() {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  using TF = TildeFunction<C>;
  const C half = T::fromReal(R(1) / R(2));
  const C i = T::i();
  TildeOperator<C> op;
  op.addDiff({0, 0, 0, 0}, TF::monomial({0, 2, 0, 0, 0}, T::one()) + TF::constant(T::fromReal(R(1) / R(4))));
  op.addDiff({1, 0, 0, 0}, TF::variable(TVar::xt2) * (-i));
  op.addDiff({2, 0, 0, 0}, TF::constant(T::fromReal(R(-1) / R(4))));
  op.addTrig({1, TrigKind::Cos, T::one()}, TF::exponential(2));
  op.addTrig({1, TrigKind::Sin, T::one()}, TF::exponential(2, i));
  op.addTrig({1, TrigKind::Cos, half}, TF::exponential(1, -T::one()));
  op.addTrig({1, TrigKind::Sin, half}, TF::exponential(1, -i));
  return op * half;
}

/// Operator of the imaginary-part equation: -2 Im(H1 *_1).
template <Coefficient C>
TildeOperator<C> imaginaryEquationOperator(const TildeOperator<C>& h1star) {
  return h1star.imagPart() * coeff_traits<C>::fromInt(-2);
}

/// Operator of the real-part equation: 2 (Re(H1 *_1) - E1).
template <Coefficient C>
TildeOperator<C> realEquationOperator(const TildeOperator<C>& h1star, const real_t<C>& e1) {
  using T = coeff_traits<C>;
  const auto shifted = h1star.realPart() - TildeOperator<C>::multiplication(TildeFunction<C>::constant(T::fromReal(e1)));
  return shifted * T::fromInt(2);
}

// ---------------------------------------------------------------------------
// Numeric application

using ComplexFn = std::function<std::complex<double>(const ComplexPoint&)>;

/// Function with complex-argument evaluation and optional analytic
/// derivatives (return nullopt for unsupported multi-indices).
struct AnalyticHandle {
  ComplexFn value;
  std::function<std::optional<std::complex<double>>(const MultiIndex&, const ComplexPoint&)> derivative;
};

struct FiniteDifferenceSpec {
  double step1 = 1e-4;
  double step2 = 1e-3;
  double scale = 1.0;
};

/// Nested fourth-order central differences. Second derivatives use the
/// five-point second-derivative stencil, first derivatives the five-point
/// first-derivative stencil.
inline std::complex<double> centralDifference(const ComplexFn& f, const ComplexPoint& z, MultiIndex a,
                                              const FiniteDifferenceSpec& fd) {
  int v = -1;
  for (int k = 0; k < 4; ++k) {
    if (a[k] > 0) {
      v = k;
      break;
    }
  }
  if (v < 0) return f(z);
  auto at = [&](double off, const MultiIndex& rest) {
    ComplexPoint w = z;
    w[v] += off;
    return centralDifference(f, w, rest, fd);
  };
  MultiIndex rest = a;
  if (a[v] >= 2) {
    rest[v] -= 2;
    const double h = fd.step2 * fd.scale;
    return (-at(2 * h, rest) + 16.0 * at(h, rest) - 30.0 * at(0, rest) + 16.0 * at(-h, rest) - at(-2 * h, rest)) /
           (12.0 * h * h);
  }
  rest[v] -= 1;
  const double h = fd.step1 * fd.scale;
  return (-at(2 * h, rest) + 8.0 * at(h, rest) - 8.0 * at(-h, rest) + at(-2 * h, rest)) / (12.0 * h);
}

struct NumericField {
  std::vector<std::complex<double>> values;
  /// Largest |D(h) - D(h/2)| over finite-difference evaluations (0 if none).
  double richardsonEstimate = 0.0;
  std::size_t finiteDifferenceCalls = 0;
};

namespace detail {

template <class F>
std::complex<double> evaluateCoefficient(const F& c, const ComplexPoint& z) {
  if constexpr (requires { c.evaluate(z); }) {
    return c.evaluate(z);
  } else {
    return c.evaluate(PhasePoint{z[0].real(), z[1].real(), z[2].real(), z[3].real()});
  }
}

}  // namespace detail

/// Pointwise application of op to psi on every grid point. Trig terms are
/// evaluated through their complex-shift form.
template <class F>
NumericField applyNumeric(const DiffOperator<F>& op, const AnalyticHandle& psi, const Grid& grid,
                          const FiniteDifferenceSpec& fd = {}) {
  grid.validate();
  if (!psi.value) throw ParameterError("applyNumeric: psi has no evaluator");
  using T = coeff_traits<typename function_traits<F>::coeff_type>;
  const auto shifted = op.trigToShift();
  NumericField out;
  out.values.resize(grid.size());
  FiniteDifferenceSpec half = fd;
  half.scale *= 0.5;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto p = grid.point(n);
    const ComplexPoint z{p[0], p[1], p[2], p[3]};
    std::complex<double> acc = 0.0;
    for (const auto& [a, c] : shifted.diffTerms()) {
      std::complex<double> d;
      std::optional<std::complex<double>> exact;
      if (a == MultiIndex{0, 0, 0, 0}) {
        exact = psi.value(z);
      } else if (psi.derivative) {
        exact = psi.derivative(a, z);
      }
      if (exact) {
        d = *exact;
      } else {
        d = centralDifference(psi.value, z, a, fd);
        const auto d2 = centralDifference(psi.value, z, a, half);
        out.richardsonEstimate = std::max(out.richardsonEstimate, std::abs(d - d2));
        ++out.finiteDifferenceCalls;
      }
      acc += detail::evaluateCoefficient(c, z) * d;
    }
    // Opposite shifts are summed pairwise first so that cos/sin pairs acting
    // on a psi independent of that variable cancel exactly.
    const auto& shiftTerms = shifted.shiftTerms();
    auto term = [&](const auto& key, const F& c) {
      ComplexPoint w = z;
      w[key.var] += T::toComplex(key.amount);
      return detail::evaluateCoefficient(c, z) * psi.value(w);
    };
    for (const auto& [k, c] : shiftTerms) {
      auto mirror = shiftTerms.find({k.var, -k.amount});
      if (mirror == shiftTerms.end() || T::isZero(k.amount)) {
        acc += term(k, c);
      } else if (T::less(mirror->first.amount, k.amount)) {
        acc += term(mirror->first, mirror->second) + term(k, c);
      }
    }
    out.values[n] = acc;
  }
  return out;
}

}  // namespace ncq

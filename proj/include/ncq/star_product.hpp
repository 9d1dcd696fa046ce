#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ncq/params.hpp"
#include "ncq/phase_function.hpp"
#include "ncq/star_engine.hpp"

namespace ncq {

/// How sqrt(e) enters the n-th term of the position-sector exponential.
enum class ThetaConvention {
  /// e(x)^n (d^n f)(d^n g): the structure function multiplies after m[...],
  /// derivatives never act on it.
  Frozen,
  /// n-fold composition of (sqrt(e) d_i) (x) (sqrt(e) d_j); derivatives of
  /// later applications act on the sqrt(e) factors of earlier ones.
  Nested,
};

enum class Sector { Theta, Hbar, Thetabar };

inline const char* conventionName(ThetaConvention c) {
  return c == ThetaConvention::Frozen ? "frozen" : "nested";
}
inline const char* sectorName(Sector s) {
  switch (s) {
    case Sector::Theta: return "theta";
    case Sector::Hbar: return "hbar";
    case Sector::Thetabar: return "thetabar";
  }
  return "?";
}

struct StarOptions {
  /// Truncation order of the theta sector; the other two sectors are exact.
  int order = 8;
  ThetaConvention convention = ThetaConvention::Frozen;
  /// Application order of the three exponentials (first entry acts first).
  std::array<Sector, 3> sectorOrder{Sector::Theta, Sector::Hbar, Sector::Thetabar};
};

template <Coefficient C>
struct StarResult {
  PhaseFunction<C> value;
  /// True when the theta series vanished identically below the truncation order.
  bool terminated = true;
  int highestOrder = 0;
};

template <Coefficient C>
typename PhaseFunction<C>::Structure structureOf(const DeformationParams<real_t<C>>& p) {
  return {p.omega1, p.omega2};
}

template <Coefficient C>
PhaseFunction<C> coordinate(const DeformationParams<real_t<C>>& p, Var v) {
  return PhaseFunction<C>::variable(structureOf<C>(p), v);
}

template <Coefficient C>
PhaseFunction<C> constantFunction(const DeformationParams<real_t<C>>& p, const C& c) {
  return PhaseFunction<C>::constant(structureOf<C>(p), c);
}

/// e(x) itself.
template <Coefficient C>
PhaseFunction<C> structureFunction(const DeformationParams<real_t<C>>& p) {
  return PhaseFunction<C>::ePower(structureOf<C>(p), 2);
}

namespace detail {

template <Coefficient C>
PhaseFunction<C> applyDeriv(const DerivOp& op, const PhaseFunction<C>& f) {
  const auto v = static_cast<Var>(op.var);
  return (op.weighted ? f.weightedDerivative(v) : f.derivative(v)).canonical();
}

template <Coefficient C>
C halfI(const real_t<C>& scale) {
  using T = coeff_traits<C>;
  return T::fromParts(real_t<C>(0), scale / real_t<C>(2));
}

}  // namespace detail

/// Letters of one sector: B = (i/2) lambda^{ab} D_a (x) D_b.
template <Coefficient C>
std::vector<Letter<C>> sectorLetters(Sector s, const DeformationParams<real_t<C>>& p,
                                     ThetaConvention convention) {
  using R = real_t<C>;
  const int x1 = 0, x2 = 1, p1 = 2, p2 = 3;
  std::vector<Letter<C>> letters;
  switch (s) {
    case Sector::Theta: {
      if (p.theta == R(0)) break;
      const bool nested = convention == ThetaConvention::Nested;
      const int w = nested ? 0 : 2;
      const C plus = detail::halfI<C>(p.theta);
      letters.push_back({{x1, nested}, {x2, nested}, plus, w});
      letters.push_back({{x2, nested}, {x1, nested}, -plus, w});
      break;
    }
    case Sector::Hbar: {
      if (p.hbar == R(0)) break;
      const C plus = detail::halfI<C>(p.hbar);
      letters.push_back({{x1, false}, {p1, false}, plus, 0});
      letters.push_back({{p1, false}, {x1, false}, -plus, 0});
      letters.push_back({{x2, false}, {p2, false}, plus, 0});
      letters.push_back({{p2, false}, {x2, false}, -plus, 0});
      break;
    }
    case Sector::Thetabar: {
      if (p.thetabar == R(0)) break;
      const C plus = detail::halfI<C>(p.thetabar);
      letters.push_back({{p1, false}, {p2, false}, plus, 0});
      letters.push_back({{p2, false}, {p1, false}, -plus, 0});
      break;
    }
  }
  return letters;
}

/// m[ exp(B_{s_k}) ... exp(B_{s_1}) (f (x) g) ] for the listed sectors in order.
template <Coefficient C>
StarResult<C> starSectors(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                          const DeformationParams<real_t<C>>& p, const std::vector<Sector>& sectors,
                          const StarOptions& opts) {
  using T = coeff_traits<C>;
  using Term = TensorTerm<PhaseFunction<C>, PhaseFunction<C>, C>;
  StarResult<C> result;
  std::vector<Term> terms{{f.canonical(), g.canonical(), T::one(), 0}};
  auto apply = [](const DerivOp& op, const PhaseFunction<C>& x) { return detail::applyDeriv(op, x); };
  auto isZero = [](const PhaseFunction<C>& x) { return x.empty(); };
  for (Sector s : sectors) {
    const int cap = s == Sector::Theta ? opts.order : -1;
    auto expanded = applyExponential(sectorLetters<C>(s, p, opts.convention), terms, cap, apply, isZero);
    if (s == Sector::Theta) {
      result.terminated = expanded.terminated;
      result.highestOrder = expanded.highestOrder;
    }
    terms = std::move(expanded.terms);
  }
  PhaseFunction<C> sum(structureOf<C>(p));
  for (const auto& t : terms) sum += ((t.left * t.right) * t.scale).timesEPower(t.ehalf);
  result.value = sum.canonical();
  return result;
}

template <Coefficient C>
StarResult<C> starTheta(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                        const DeformationParams<real_t<C>>& p, int order,
                        ThetaConvention convention = ThetaConvention::Frozen) {
  StarOptions opts;
  opts.order = order;
  opts.convention = convention;
  return starSectors(f, g, p, {Sector::Theta}, opts);
}

template <Coefficient C>
PhaseFunction<C> starHbar(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                          const DeformationParams<real_t<C>>& p) {
  return starSectors(f, g, p, {Sector::Hbar}, StarOptions{}).value;
}

template <Coefficient C>
PhaseFunction<C> starThetabar(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                              const DeformationParams<real_t<C>>& p) {
  return starSectors(f, g, p, {Sector::Thetabar}, StarOptions{}).value;
}

template <Coefficient C>
StarResult<C> starFull(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                       const DeformationParams<real_t<C>>& p, const StarOptions& opts = {}) {
  return starSectors(f, g, p, {opts.sectorOrder.begin(), opts.sectorOrder.end()}, opts);
}

template <Coefficient C>
StarResult<C> starCommutator(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                             const DeformationParams<real_t<C>>& p, const StarOptions& opts = {}) {
  auto fg = starFull(f, g, p, opts);
  auto gf = starFull(g, f, p, opts);
  return {(fg.value - gf.value).canonical(), fg.terminated && gf.terminated,
          std::max(fg.highestOrder, gf.highestOrder)};
}

/// Right-hand side of the closed-form left actions of the generators,
///   x1*f = x1 f + (i theta e/2) d_x2 f + (i hbar/2) d_p1 f, etc.
template <Coefficient C>
PhaseFunction<C> generatorLeftAction(Var generator, const PhaseFunction<C>& f,
                                     const DeformationParams<real_t<C>>& p) {
  const auto e = structureFunction<C>(p);
  const C th = detail::halfI<C>(p.theta);
  const C hb = detail::halfI<C>(p.hbar);
  const C tb = detail::halfI<C>(p.thetabar);
  PhaseFunction<C> out = coordinate<C>(p, generator) * f;
  switch (generator) {
    case Var::x1:
      out += e * f.derivative(Var::x2) * th + f.derivative(Var::p1) * hb;
      break;
    case Var::x2:
      out += e * f.derivative(Var::x1) * (-th) + f.derivative(Var::p2) * hb;
      break;
    case Var::p1:
      out += f.derivative(Var::p2) * tb + f.derivative(Var::x1) * (-hb);
      break;
    case Var::p2:
      out += f.derivative(Var::p1) * (-tb) + f.derivative(Var::x2) * (-hb);
      break;
  }
  return out.canonical();
}

/// Right actions obtained from the left ones through f*g = conj(g*f):
///   f*x1 = x1 f - (i theta e/2) d_x2 f - (i hbar/2) d_p1 f, etc.
template <Coefficient C>
PhaseFunction<C> generatorRightAction(Var generator, const PhaseFunction<C>& f,
                                      const DeformationParams<real_t<C>>& p) {
  const auto prod = coordinate<C>(p, generator) * f;
  const auto left = generatorLeftAction(generator, f, p);
  return (prod + prod - left).canonical();
}

/// Canonical commutator of two generators: i theta e, i hbar delta, i thetabar.
template <Coefficient C>
PhaseFunction<C> expectedCommutator(Var a, Var b, const DeformationParams<real_t<C>>& p) {
  using R = real_t<C>;
  using T = coeff_traits<C>;
  const auto s = structureOf<C>(p);
  const C i = T::i();
  auto eps = [](int u, int v) { return u == v ? 0 : (u < v ? 1 : -1); };
  const int ia = static_cast<int>(a), ib = static_cast<int>(b);
  PhaseFunction<C> out(s);
  if (isPosition(a) && isPosition(b)) {
    out = structureFunction<C>(p) * (i * T::fromReal(p.theta * R(eps(ia, ib))));
  } else if (!isPosition(a) && !isPosition(b)) {
    out = PhaseFunction<C>::constant(s, i * T::fromReal(p.thetabar * R(eps(ia, ib))));
  } else if (isPosition(a) && ia + 2 == ib) {
    out = PhaseFunction<C>::constant(s, i * T::fromReal(p.hbar));
  } else if (isPosition(b) && ib + 2 == ia) {
    out = PhaseFunction<C>::constant(s, -(i * T::fromReal(p.hbar)));
  }
  return out.canonical();
}

template <Coefficient C>
struct JacobiResult {
  PhaseFunction<C> nested;
  PhaseFunction<C> closedForm;
  bool terminated = true;
};

/// J(mu,nu,rho) = [x^mu,[x^nu,x^rho]] + [x^rho,[x^mu,x^nu]] + [x^nu,[x^rho,x^mu]]
/// alongside -e omega_s (th^{nu rho} th^{mu s} + th^{mu nu} th^{rho s} + th^{rho mu} th^{nu s}).
/// Indices are 1-based position indices.
template <Coefficient C>
JacobiResult<C> jacobiator(int mu, int nu, int rho, const DeformationParams<real_t<C>>& p,
                           const StarOptions& opts = {}) {
  using R = real_t<C>;
  using T = coeff_traits<C>;
  for (int idx : {mu, nu, rho}) {
    if (idx != 1 && idx != 2) throw ParameterError("jacobiator: indices must be 1 or 2");
  }
  auto x = [&](int k) { return coordinate<C>(p, k == 1 ? Var::x1 : Var::x2); };
  JacobiResult<C> r;
  r.nested = PhaseFunction<C>(structureOf<C>(p));
  for (auto [a, b, c] : {std::array{mu, nu, rho}, std::array{rho, mu, nu}, std::array{nu, rho, mu}}) {
    auto inner = starCommutator(x(b), x(c), p, opts);
    auto outer = starCommutator(x(a), inner.value, p, opts);
    r.terminated = r.terminated && inner.terminated && outer.terminated;
    r.nested += outer.value;
  }
  r.nested = r.nested.canonical();

  auto th = [&](int u, int v) { return u == v ? R(0) : (u < v ? p.theta : R(-p.theta)); };
  const std::array<R, 3> omega{R(0), p.omega1, p.omega2};
  R sum(0);
  for (int s = 1; s <= 2; ++s) {
    sum += omega[s] * (th(nu, rho) * th(mu, s) + th(mu, nu) * th(rho, s) + th(rho, mu) * th(nu, s));
  }
  r.closedForm = (structureFunction<C>(p) * T::fromReal(-sum)).canonical();
  return r;
}

template <Coefficient C>
struct AssociativityResult {
  PhaseFunction<C> residual;
  bool terminated = true;
  /// Lowest total power of the deformation parameters (theta, hbar,
  /// thetabar) carried by the residual, if it is nonzero at or below the
  /// truncation order. Only computed for exact coefficients.
  std::optional<int> lowestResidualOrder;
};

namespace detail {

inline int momentumDegree(const auto& f) {
  int d = 0;
  for (const auto& [k, c] : f.terms()) d = std::max(d, k[2] + k[3]);
  return d;
}

/// Lowest power of lambda with a nonzero coefficient in a polynomial known
/// through its values at lambda = 0, 1, ..., n. Newton divided differences,
/// then conversion to the monomial basis.
inline std::optional<int> lowestPower(const std::vector<QComplex>& values) {
  const int n = static_cast<int>(values.size());
  std::vector<QComplex> dd = values;
  for (int j = 1; j < n; ++j)
    for (int i = n - 1; i >= j; --i) dd[i] = (dd[i] - dd[i - 1]) / QComplex(Rational(j));
  // Horner on the Newton form with nodes 0..n-1.
  std::vector<QComplex> poly{dd[n - 1]};
  for (int i = n - 2; i >= 0; --i) {
    std::vector<QComplex> next(poly.size() + 1);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      next[k + 1] += poly[k];
      next[k] -= poly[k] * QComplex(Rational(i));
    }
    next[0] += dd[i];
    poly = std::move(next);
  }
  for (int k = 0; k < static_cast<int>(poly.size()); ++k)
    if (!coeff_traits<QComplex>::isZero(poly[k])) return k;
  return std::nullopt;
}

}  // namespace detail

/// (f*g)*h - f*(g*h).
///
/// For exact coefficients the residual is also graded: scaling theta, hbar
/// and thetabar by lambda turns each coefficient into a polynomial in lambda,
/// recovered by exact interpolation, and the lowest nonvanishing power is
/// reported. Powers above opts.order are truncation artifacts and ignored.
template <Coefficient C>
AssociativityResult<C> associativityResidual(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                                             const PhaseFunction<C>& h,
                                             const DeformationParams<real_t<C>>& p,
                                             const StarOptions& opts = {}) {
  auto at = [&](const DeformationParams<real_t<C>>& q) {
    auto fg = starFull(f, g, q, opts);
    auto left = starFull(fg.value, h, q, opts);
    auto gh = starFull(g, h, q, opts);
    auto right = starFull(f, gh.value, q, opts);
    AssociativityResult<C> r;
    r.residual = (left.value - right.value).canonical();
    r.terminated = fg.terminated && left.terminated && gh.terminated && right.terminated;
    return r;
  };
  AssociativityResult<C> result = at(p);
  if constexpr (coeff_traits<C>::exact) {
    if (result.residual.empty()) return result;
    const int degree =
        2 * opts.order + 2 * (detail::momentumDegree(f) + detail::momentumDegree(g) + detail::momentumDegree(h));
    std::vector<PhaseFunction<C>> samples{PhaseFunction<C>(result.residual.structure())};
    for (int l = 1; l <= degree; ++l) {
      auto q = p;
      q.theta *= l;
      q.hbar *= l;
      q.thetabar *= l;
      samples.push_back(l == 1 ? result.residual : at(q).residual);
    }
    std::set<PhaseKey> keys;
    for (const auto& s : samples)
      for (const auto& [k, c] : s.terms()) keys.insert(k);
    std::optional<int> lowest;
    for (const auto& k : keys) {
      std::vector<QComplex> values;
      for (const auto& s : samples) {
        auto it = s.terms().find(k);
        values.push_back(it == s.terms().end() ? QComplex{} : it->second);
      }
      const auto n = detail::lowestPower(values);
      if (n && *n <= opts.order && (!lowest || *n < *lowest)) lowest = n;
    }
    result.lowestResidualOrder = lowest;
  }
  return result;
}

/// Nested-minus-frozen theta products: surfaces the convention ambiguity.
template <Coefficient C>
PhaseFunction<C> conventionDiscrepancy(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                                       const DeformationParams<real_t<C>>& p, int order) {
  auto nested = starTheta(f, g, p, order, ThetaConvention::Nested);
  auto frozen = starTheta(f, g, p, order, ThetaConvention::Frozen);
  return (nested.value - frozen.value).canonical();
}

/// starFull with the given sector order minus starFull with the default order.
template <Coefficient C>
PhaseFunction<C> sectorOrderDiscrepancy(const PhaseFunction<C>& f, const PhaseFunction<C>& g,
                                        const DeformationParams<real_t<C>>& p, const StarOptions& opts,
                                        std::array<Sector, 3> alternative) {
  StarOptions alt = opts;
  alt.sectorOrder = alternative;
  return (starFull(f, g, p, alt).value - starFull(f, g, p, opts).value).canonical();
}

}  // namespace ncq

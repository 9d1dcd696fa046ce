#pragma once

// The coordinate change x(x~) that trades the position-dependent bracket
// [x1,x2] = i theta e(x) for constant-coefficient blocks, and the resulting
// factorization of the oscillator Hamiltonian.

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ncq/errors.hpp"
#include "ncq/params.hpp"
#include "ncq/phase_function.hpp"
#include "ncq/star_product.hpp"
#include "ncq/tilde_function.hpp"

namespace ncq {

namespace detail {

template <class R>
double toDouble(const R& r) {
  if constexpr (std::is_same_v<R, double>) {
    return r;
  } else {
    return r.template convert_to<double>();
  }
}

template <class R>
void requireInvertible(const DeformationParams<R>& p) {
  if (!(p.theta > R(0))) throw ParameterError("transformation requires theta > 0");
  if (p.omega1 == R(0) && p.omega2 == R(0)) {
    throw ParameterError("transformation undefined for omega1 = omega2 = 0");
  }
}

template <class R>
void requireOmega1Zero(const DeformationParams<R>& p) {
  requireInvertible(p);
  if (p.omega1 != R(0)) throw ParameterError("factorized sector requires omega1 = 0");
}

/// Exact square root of a rational when it is a perfect square.
inline std::optional<Rational> exactSqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  using boost::multiprecision::cpp_int;
  const cpp_int n = boost::multiprecision::numerator(r);
  const cpp_int d = boost::multiprecision::denominator(r);
  const cpp_int sn = boost::multiprecision::sqrt(n);
  const cpp_int sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rational(sn, sd);
}

}  // namespace detail

/// x -> x~ : x~1 = ln(e(x) / (theta W)), x~2 = (-w2 x1 + w1 x2) / (theta W),
/// p~ = p, with W = w1^2 + w2^2.
template <class R>
TildePoint forward(const PhasePoint& q, const DeformationParams<R>& params) {
  detail::requireInvertible(params);
  const double th = detail::toDouble(params.theta);
  const double w1 = detail::toDouble(params.omega1);
  const double w2 = detail::toDouble(params.omega2);
  const double e = 1.0 + w1 * q.x1 + w2 * q.x2;
  if (!(e > 0.0)) throw DomainError("forward: e(x) <= 0");
  const double s = th * (w1 * w1 + w2 * w2);
  return {std::log(e / s), (-w2 * q.x1 + w1 * q.x2) / s, q.p1, q.p2};
}

/// x~ -> x : x1 = theta w1 e^{x~1} - theta w2 x~2 - w1/W,
///           x2 = theta w2 e^{x~1} + theta w1 x~2 - w2/W.
template <class R>
PhasePoint backward(const TildePoint& t, const DeformationParams<R>& params) {
  detail::requireInvertible(params);
  const double th = detail::toDouble(params.theta);
  const double w1 = detail::toDouble(params.omega1);
  const double w2 = detail::toDouble(params.omega2);
  const double W = w1 * w1 + w2 * w2;
  const double ex = std::exp(t.xt1);
  return {th * w1 * ex - th * w2 * t.xt2 - w1 / W, th * w2 * ex + th * w1 * t.xt2 - w2 / W, t.pt1, t.pt2};
}

/// e(backward(t)) = theta W e^{x~1}.
template <class R>
double structureAtImage(const TildePoint& t, const DeformationParams<R>& params) {
  detail::requireInvertible(params);
  const double w1 = detail::toDouble(params.omega1);
  const double w2 = detail::toDouble(params.omega2);
  return detail::toDouble(params.theta) * (w1 * w1 + w2 * w2) * std::exp(t.xt1);
}

/// Brackets of the transformed generators:
///   [x~1,x~2] = i gamma, [x~1,p~1] = i hbar1(x), [x~2,p~2] = i hbar2, [p~1,p~2] = i thetabar,
/// with gamma = theta sqrt(w1^2+w2^2), hbar1 = hbar w1 / e(x), hbar2 = w1 hbar / (theta W).
template <Coefficient C>
struct CommutatorTable {
  using R = real_t<C>;
  double gamma = 0.0;
  /// gamma in the coefficient ring when it is representable (always for omega1 = 0).
  std::optional<R> gammaExact;
  PhaseFunction<C> hbar1;
  R hbar2{0};
  R thetabar{0};

  bool hbar1Constant() const {
    return std::all_of(hbar1.terms().begin(), hbar1.terms().end(),
                       [](const auto& t) { return t.first == PhaseKey{0, 0, 0, 0, 0}; });
  }
};

template <Coefficient C>
CommutatorTable<C> tildeCommutatorTable(const DeformationParams<real_t<C>>& p) {
  using R = real_t<C>;
  using T = coeff_traits<C>;
  detail::requireInvertible(p);
  CommutatorTable<C> table;
  const R W = p.omega1 * p.omega1 + p.omega2 * p.omega2;
  if (p.omega1 == R(0)) {
    // gamma = theta omega2 as in the omega1 = 0 reduction x1 = -gamma x~2.
    table.gammaExact = p.theta * p.omega2;
  } else if constexpr (T::exact) {
    if (auto root = detail::exactSqrt(W)) table.gammaExact = p.theta * *root;
  } else {
    table.gammaExact = p.theta * std::sqrt(W);
  }
  table.gamma = table.gammaExact ? detail::toDouble(*table.gammaExact)
                                 : detail::toDouble(p.theta) * std::sqrt(detail::toDouble(W));
  table.hbar1 = PhaseFunction<C>::ePower(structureOf<C>(p), -2, T::fromReal(p.hbar * p.omega1)).canonical();
  table.hbar2 = p.omega1 * p.hbar / (p.theta * W);
  table.thetabar = p.thetabar;
  return table;
}

/// Gradient of a transformed generator as functions of (x, p); x~1 is not a
/// PhaseFunction itself but its gradient w_i / e(x) is.
template <Coefficient C>
std::array<PhaseFunction<C>, 4> tildeGradient(TVar v, const DeformationParams<real_t<C>>& p) {
  using R = real_t<C>;
  using T = coeff_traits<C>;
  const auto s = structureOf<C>(p);
  const R W = p.omega1 * p.omega1 + p.omega2 * p.omega2;
  std::array<PhaseFunction<C>, 4> g{PhaseFunction<C>(s), PhaseFunction<C>(s), PhaseFunction<C>(s),
                                    PhaseFunction<C>(s)};
  switch (v) {
    case TVar::xt1:
      g[0] = PhaseFunction<C>::ePower(s, -2, T::fromReal(p.omega1));
      g[1] = PhaseFunction<C>::ePower(s, -2, T::fromReal(p.omega2));
      break;
    case TVar::xt2:
      g[0] = PhaseFunction<C>::constant(s, T::fromReal(-p.omega2 / (p.theta * W)));
      g[1] = PhaseFunction<C>::constant(s, T::fromReal(p.omega1 / (p.theta * W)));
      break;
    case TVar::pt1:
      g[2] = PhaseFunction<C>::constant(s, T::one());
      break;
    case TVar::pt2:
      g[3] = PhaseFunction<C>::constant(s, T::one());
      break;
  }
  for (auto& f : g) f = f.canonical();
  return g;
}

/// i * Pi(df, dg) with Pi the bracket bivector
/// theta e (d1 (x) d2 - d2 (x) d1) + hbar (dx (x) dp - dp (x) dx) + thetabar (dp1 (x) dp2 - dp2 (x) dp1).
/// Equals the full star commutator whenever one argument is linear.
template <Coefficient C>
PhaseFunction<C> bracketFromGradients(const std::array<PhaseFunction<C>, 4>& df,
                                      const std::array<PhaseFunction<C>, 4>& dg,
                                      const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  const auto e = structureFunction<C>(p);
  PhaseFunction<C> out(structureOf<C>(p));
  out += e * (df[0] * dg[1] - df[1] * dg[0]) * T::fromReal(p.theta);
  out += (df[0] * dg[2] - df[2] * dg[0] + df[1] * dg[3] - df[3] * dg[1]) * T::fromReal(p.hbar);
  out += (df[2] * dg[3] - df[3] * dg[2]) * T::fromReal(p.thetabar);
  return (out * T::i()).canonical();
}

/// Directly computed brackets of the transformed generators, for cross-checking the table.
template <Coefficient C>
struct DirectBrackets {
  PhaseFunction<C> xt1xt2, xt1pt1, xt2pt2, pt1pt2, xt1pt2, xt2pt1;
};

template <Coefficient C>
DirectBrackets<C> directTildeBrackets(const DeformationParams<real_t<C>>& p) {
  detail::requireInvertible(p);
  auto grad = [&](TVar v) { return tildeGradient<C>(v, p); };
  auto br = [&](TVar a, TVar b) { return bracketFromGradients(grad(a), grad(b), p); };
  return {br(TVar::xt1, TVar::xt2), br(TVar::xt1, TVar::pt1), br(TVar::xt2, TVar::pt2),
          br(TVar::pt1, TVar::pt2), br(TVar::xt1, TVar::pt2), br(TVar::xt2, TVar::pt1)};
}

/// Per-entry agreement between the table and the direct brackets.
template <Coefficient C>
struct TableCrossCheck {
  bool gamma = false;
  bool hbar1 = false;
  bool hbar2 = false;
  bool thetabar = false;
  bool crossTermsVanish = false;
  /// Direct [x~1,x~2] / i (a constant).
  std::complex<double> directGamma;
};

template <Coefficient C>
TableCrossCheck<C> crossCheckTable(const CommutatorTable<C>& table, const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  const auto s = structureOf<C>(p);
  const auto d = directTildeBrackets<C>(p);
  const C i = T::i();
  TableCrossCheck<C> r;
  r.directGamma = d.xt1xt2.evaluate({}) / std::complex<double>(0.0, 1.0);
  if (table.gammaExact) {
    r.gamma = (d.xt1xt2 - PhaseFunction<C>::constant(s, i * T::fromReal(*table.gammaExact))).isZero();
  } else {
    r.gamma = d.xt1xt2.isPolynomial() && d.xt1xt2.totalDegree() == 0 &&
              std::abs(r.directGamma - table.gamma) < 1e-12;
  }
  r.hbar1 = (d.xt1pt1 - table.hbar1 * i).isZero();
  r.hbar2 = (d.xt2pt2 - PhaseFunction<C>::constant(s, i * T::fromReal(table.hbar2))).isZero();
  r.thetabar = (d.pt1pt2 - PhaseFunction<C>::constant(s, i * T::fromReal(table.thetabar))).isZero();
  r.crossTermsVanish = d.xt1pt2.isZero() && d.xt2pt1.isZero();
  return r;
}

/// H = (1/2)(p1^2 + p2^2 + x1^2 + x2^2)
template <Coefficient C>
PhaseFunction<C> oscillatorHamiltonian(const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  PhaseFunction<C> h(structureOf<C>(p));
  for (Var v : kAllVars) {
    PhaseKey k{0, 0, 0, 0, 0};
    k[static_cast<int>(v)] = 2;
    h.addTerm(k, T::fromReal(R(1) / R(2)));
  }
  return h;
}

/// Substitutes x~(x) into a tilde function. Supports exp(k x~1) for any k and
/// polynomial x~2, p~; bare powers of x~1 (logarithms of e) are rejected.
template <Coefficient C>
PhaseFunction<C> pullback(const TildeFunction<C>& f, const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  detail::requireInvertible(p);
  const auto s = structureOf<C>(p);
  const R scale = p.theta * (p.omega1 * p.omega1 + p.omega2 * p.omega2);
  PhaseFunction<C> xt2(s);
  xt2.addTerm({1, 0, 0, 0, 0}, T::fromReal(-p.omega2 / scale));
  xt2.addTerm({0, 1, 0, 0, 0}, T::fromReal(p.omega1 / scale));
  PhaseFunction<C> out(s);
  for (const auto& [k, c] : f.terms()) {
    if (k[0] != 0) throw RepresentationError("pullback: powers of xt1 are not PhaseFunctions");
    R factor(1);
    const int kexp = k[kExpSlot];
    for (int j = 0; j < std::abs(kexp); ++j) factor = kexp > 0 ? R(factor / scale) : R(factor * scale);
    PhaseFunction<C> term = PhaseFunction<C>::monomial(s, {0, 0, k[2], k[3], 2 * kexp}, c * T::fromReal(factor));
    for (int j = 0; j < k[1]; ++j) term = term * xt2;
    out += term;
  }
  return out.canonical();
}

/// Substitutes x(x~) for omega1 = 0: x1 = -gamma x~2, x2 = gamma e^{x~1} - 1/omega2,
/// e(x) = gamma omega2 e^{x~1}. Odd powers of sqrt(e) are rejected.
template <Coefficient C>
TildeFunction<C> pushforward(const PhaseFunction<C>& f, const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  detail::requireOmega1Zero(p);
  const R gamma = p.theta * p.omega2;
  const auto x1 = TildeFunction<C>::variable(TVar::xt2) * T::fromReal(-gamma);
  const auto x2 = TildeFunction<C>::exponential(1, T::fromReal(gamma)) +
                  TildeFunction<C>::constant(T::fromReal(-R(1) / p.omega2));
  TildeFunction<C> out;
  for (const auto& [k, c] : f.terms()) {
    if (k[kEHalf] % 2 != 0) throw RepresentationError("pushforward: odd powers of sqrt(e)");
    const int ePow = k[kEHalf] / 2;
    R factor(1);
    for (int j = 0; j < std::abs(ePow); ++j) {
      factor = ePow > 0 ? R(factor * gamma * p.omega2) : R(factor / (gamma * p.omega2));
    }
    TildeFunction<C> term = TildeFunction<C>::monomial({0, 0, k[2], k[3], ePow}, c * T::fromReal(factor));
    for (int j = 0; j < k[0]; ++j) term = term * x1;
    for (int j = 0; j < k[1]; ++j) term = term * x2;
    out += term;
  }
  return out;
}

template <Coefficient C>
struct FactorizedHamiltonian {
  TildeFunction<C> h1;
  TildeFunction<C> h2;
  /// (1/2)[g^2 (x~2)^2 + g^2 e^{2x~1} - (2g/w2) e^{x~1} + 1/w2^2]
  TildeFunction<C> h1ClosedForm;
  /// (1/2)[(p~1)^2 + (p~2)^2]
  TildeFunction<C> h2ClosedForm;
  /// pullback(h1 + h2) - H, canonical.
  PhaseFunction<C> pullbackResidual;
};

/// Rewrites the oscillator Hamiltonian in transformed variables and splits it
/// into a position part and a momentum part.
template <Coefficient C>
FactorizedHamiltonian<C> transformHamiltonian(const DeformationParams<real_t<C>>& p) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  detail::requireOmega1Zero(p);
  const auto h = oscillatorHamiltonian<C>(p);
  const auto pushed = pushforward(h, p);
  FactorizedHamiltonian<C> r;
  for (const auto& [k, c] : pushed.terms()) {
    const bool hasX = k[0] != 0 || k[1] != 0 || k[kExpSlot] != 0;
    const bool hasP = k[2] != 0 || k[3] != 0;
    if (hasX && hasP) throw RepresentationError("transformHamiltonian: mixed position/momentum term");
    (hasP ? r.h2 : r.h1).addTerm(k, c);
  }
  const R g = p.theta * p.omega2;
  const R half = R(1) / R(2);
  r.h1ClosedForm = TildeFunction<C>::monomial({0, 2, 0, 0, 0}, T::fromReal(half * g * g)) +
                   TildeFunction<C>::exponential(2, T::fromReal(half * g * g)) +
                   TildeFunction<C>::exponential(1, T::fromReal(-g / p.omega2)) +
                   TildeFunction<C>::constant(T::fromReal(half / (p.omega2 * p.omega2)));
  r.h2ClosedForm = TildeFunction<C>::monomial({0, 0, 2, 0, 0}, T::fromReal(half)) +
                   TildeFunction<C>::monomial({0, 0, 0, 2, 0}, T::fromReal(half));
  r.pullbackResidual = (pullback(r.h1 + r.h2, p) - h).canonical();
  return r;
}

/// Parameters realizing a (gamma, omega2) preset with omega1 = 0: theta = gamma / omega2.
template <class R>
DeformationParams<R> presetFromGamma(const R& gamma, const R& omega2, const R& thetabar = R(1),
                                     const R& hbar = R(1)) {
  if (omega2 == R(0)) throw ParameterError("preset requires omega2 != 0");
  return {gamma / omega2, thetabar, hbar, R(0), omega2};
}

template <Coefficient C>
struct SectorCheck {
  TildeFunction<C> h1h2;
  TildeFunction<C> h1h1;
  /// [x~a, p~b] for a, b in {1, 2} under the block product.
  std::array<TildeFunction<C>, 4> crossBrackets;
  bool terminated = true;

  bool allZero() const {
    return h1h2.empty() && h1h1.empty() &&
           std::all_of(crossBrackets.begin(), crossBrackets.end(), [](const auto& f) { return f.empty(); });
  }
};

/// [H1,H2], [H1,H1] and the cross-sector generator brackets under the block
/// Moyal product diag(gamma J, thetabar J), gamma from the table.
template <Coefficient C>
SectorCheck<C> sectorCommutatorCheck(const DeformationParams<real_t<C>>& p, int order = 8) {
  detail::requireOmega1Zero(p);
  const auto table = tildeCommutatorTable<C>(p);
  const auto gamma = *table.gammaExact;
  const auto fh = transformHamiltonian<C>(p);
  SectorCheck<C> r;
  auto a = blockMoyalCommutator(fh.h1, fh.h2, gamma, p.thetabar, order);
  auto b = blockMoyalCommutator(fh.h1, fh.h1, gamma, p.thetabar, order);
  r.h1h2 = a.value;
  r.h1h1 = b.value;
  r.terminated = a.terminated;
  int idx = 0;
  for (TVar x : {TVar::xt1, TVar::xt2}) {
    for (TVar q : {TVar::pt1, TVar::pt2}) {
      auto c = blockMoyalCommutator(TildeFunction<C>::variable(x), TildeFunction<C>::variable(q), gamma,
                                    p.thetabar, order);
      r.crossBrackets[idx++] = c.value;
    }
  }
  return r;
}

}  // namespace ncq

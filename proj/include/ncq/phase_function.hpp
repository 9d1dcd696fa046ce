#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ncq/errors.hpp"
#include "ncq/scalar.hpp"

namespace ncq {

/// Commuting phase-space coordinates.
enum class Var : int { x1 = 0, x2 = 1, p1 = 2, p2 = 3 };

inline constexpr std::array<Var, 4> kAllVars{Var::x1, Var::x2, Var::p1, Var::p2};

inline const char* varName(Var v) {
  static constexpr const char* names[] = {"x1", "x2", "p1", "p2"};
  return names[static_cast<int>(v)];
}

inline constexpr bool isPosition(Var v) { return v == Var::x1 || v == Var::x2; }

struct PhasePoint {
  double x1 = 0.0;
  double x2 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  double operator[](Var v) const {
    switch (v) {
      case Var::x1: return x1;
      case Var::x2: return x2;
      case Var::p1: return p1;
      case Var::p2: return p2;
    }
    return 0.0;
  }
};

/// Exponents (x1, x2, p1, p2) followed by s, the power of e(x)^{s/2}.
/// s is stored doubled so half-integer powers of e stay integral.
using PhaseKey = std::array<int, 5>;
inline constexpr int kEHalf = 4;

/// Finite sum of monomials x1^a x2^b p1^c p2^d e(x)^{s/2} with complex
/// coefficients, where e(x) = 1 + omega1 x1 + omega2 x2.
///
/// Arithmetic keeps a merged but otherwise loose term map. canonical()
/// produces the unique normal form: for each parity of s the terms are
/// brought to a single power of e, positive powers are multiplied out and
/// negative ones are reduced until the numerator is no longer divisible by
/// e. Two functions are equal iff their canonical term maps coincide.
template <Coefficient C>
class PhaseFunction {
 public:
  using Traits = coeff_traits<C>;
  using R = real_t<C>;
  using Terms = std::map<PhaseKey, C>;

  struct Structure {
    R omega1{0};
    R omega2{0};
    bool trivial() const { return omega1 == R(0) && omega2 == R(0); }
    friend bool operator==(const Structure&, const Structure&) = default;
  };

  PhaseFunction() = default;
  explicit PhaseFunction(Structure s) : structure_(std::move(s)) {}

  static PhaseFunction constant(const Structure& s, const C& c) {
    PhaseFunction f(s);
    f.addTerm({0, 0, 0, 0, 0}, c);
    return f;
  }
  static PhaseFunction variable(const Structure& s, Var v) {
    PhaseKey k{0, 0, 0, 0, 0};
    k[static_cast<int>(v)] = 1;
    return monomial(s, k, Traits::one());
  }
  /// e(x)^{s/2}
  static PhaseFunction ePower(const Structure& s, int ehalf, const C& c = Traits::one()) {
    return monomial(s, {0, 0, 0, 0, ehalf}, c);
  }
  static PhaseFunction monomial(const Structure& s, const PhaseKey& k, const C& c) {
    PhaseFunction f(s);
    f.addTerm(k, c);
    return f;
  }

  const Structure& structure() const { return structure_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Symbolically zero: canonical form has no terms.
  bool isZero() const {
    if (terms_.empty()) return true;
    return canonical().terms_.empty();
  }

  void addTerm(const PhaseKey& k, const C& c) {
    if (Traits::isZero(c)) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (Traits::isZero(it->second)) terms_.erase(it);
    }
  }

  PhaseFunction& operator+=(const PhaseFunction& o) {
    adoptStructure(o);
    for (const auto& [k, c] : o.terms_) addTerm(k, c);
    return *this;
  }
  PhaseFunction& operator-=(const PhaseFunction& o) {
    adoptStructure(o);
    for (const auto& [k, c] : o.terms_) addTerm(k, -c);
    return *this;
  }
  PhaseFunction& operator*=(const C& s) {
    if (Traits::isZero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }

  friend PhaseFunction operator+(PhaseFunction a, const PhaseFunction& b) { return a += b; }
  friend PhaseFunction operator-(PhaseFunction a, const PhaseFunction& b) { return a -= b; }
  friend PhaseFunction operator-(PhaseFunction a) { return a *= -Traits::one(); }
  friend PhaseFunction operator*(PhaseFunction a, const C& s) { return a *= s; }
  friend PhaseFunction operator*(const C& s, PhaseFunction a) { return a *= s; }

  friend PhaseFunction operator*(const PhaseFunction& a, const PhaseFunction& b) {
    PhaseFunction out(a.terms_.empty() ? b.structure_ : a.structure_);
    a.checkStructure(b);
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        PhaseKey k;
        for (int i = 0; i < 5; ++i) k[i] = ka[i] + kb[i];
        out.addTerm(k, ca * cb);
      }
    }
    return out;
  }

  /// Symbolic equality (difference canonicalizes to zero).
  friend bool operator==(const PhaseFunction& a, const PhaseFunction& b) { return (a - b).isZero(); }

  /// Exact partial derivative. d/dx_i e^{s/2} = (s/2) omega_i e^{(s-2)/2}.
  PhaseFunction derivative(Var v) const {
    const int idx = static_cast<int>(v);
    PhaseFunction out(structure_);
    for (const auto& [k, c] : terms_) {
      if (k[idx] > 0) {
        PhaseKey d = k;
        d[idx] -= 1;
        out.addTerm(d, c * Traits::fromInt(k[idx]));
      }
      if (isPosition(v) && k[kEHalf] != 0) {
        const R& om = v == Var::x1 ? structure_.omega1 : structure_.omega2;
        if (om != R(0)) {
          PhaseKey d = k;
          d[kEHalf] -= 2;
          out.addTerm(d, c * Traits::fromReal(om * R(k[kEHalf]) / R(2)));
        }
      }
    }
    return out;
  }

  /// Multiplies by e(x)^{ehalf/2}.
  PhaseFunction timesEPower(int ehalf) const {
    if (ehalf == 0) return *this;
    PhaseFunction out(structure_);
    for (const auto& [k, c] : terms_) {
      PhaseKey s = k;
      s[kEHalf] += ehalf;
      out.addTerm(s, c);
    }
    return out;
  }

  /// sqrt(e) * d/dv
  PhaseFunction weightedDerivative(Var v) const { return derivative(v).timesEPower(1); }

  PhaseFunction conj() const {
    PhaseFunction out(structure_);
    for (const auto& [k, c] : terms_) out.addTerm(k, Traits::conj(c));
    return out;
  }
  /// Coefficient-wise real part (basis functions are real on e(x) > 0).
  PhaseFunction realPart() const {
    PhaseFunction out(structure_);
    for (const auto& [k, c] : terms_) out.addTerm(k, Traits::fromReal(Traits::re(c)));
    return out;
  }
  PhaseFunction imagPart() const {
    PhaseFunction out(structure_);
    for (const auto& [k, c] : terms_) out.addTerm(k, Traits::fromReal(Traits::im(c)));
    return out;
  }
  bool hasRealCoefficients() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return Traits::isRealZero(Traits::im(t.second)); });
  }

  int degree(Var v) const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k[static_cast<int>(v)]);
    return d;
  }
  int totalDegree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k[0] + k[1] + k[2] + k[3]);
    return d;
  }
  bool isPolynomial() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first[kEHalf] == 0; });
  }

  std::complex<double> evaluate(const PhasePoint& q) const {
    const double e = 1.0 + Traits::toDouble(structure_.omega1) * q.x1 +
                     Traits::toDouble(structure_.omega2) * q.x2;
    std::complex<double> sum = 0.0;
    for (const auto& [k, c] : terms_) {
      std::complex<double> t = Traits::toComplex(c);
      for (int i = 0; i < 4; ++i) t *= std::pow(q[static_cast<Var>(i)], k[i]);
      if (k[kEHalf] != 0) t *= std::pow(std::complex<double>(e), 0.5 * k[kEHalf]);
      sum += t;
    }
    return sum;
  }

  PhaseFunction canonical() const;

  std::string toString() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << Traits::toComplex(c);
      for (int i = 0; i < 4; ++i) {
        if (k[i] == 0) continue;
        os << "*" << varName(static_cast<Var>(i));
        if (k[i] > 1) os << "^" << k[i];
      }
      if (k[kEHalf] != 0) os << "*e^(" << k[kEHalf] << "/2)";
    }
    return os.str();
  }

 private:
  void checkStructure(const PhaseFunction& o) const {
    if (!(structure_ == o.structure_) && !terms_.empty() && !o.terms_.empty()) {
      throw ParameterError("PhaseFunction: mismatched structure functions");
    }
  }
  void adoptStructure(const PhaseFunction& o) {
    if (terms_.empty()) {
      structure_ = o.structure_;
    } else {
      checkStructure(o);
    }
  }

  Structure structure_{};
  Terms terms_{};
};

namespace detail {

template <Coefficient C>
using PolyTerms = std::map<PhaseKey, C>;

template <Coefficient C>
void polyAdd(PolyTerms<C>& into, const PhaseKey& k, const C& c) {
  if (coeff_traits<C>::isZero(c)) return;
  auto [it, inserted] = into.try_emplace(k, c);
  if (!inserted) {
    it->second += c;
    if (coeff_traits<C>::isZero(it->second)) into.erase(it);
  }
}

template <Coefficient C>
PolyTerms<C> polyMul(const PolyTerms<C>& a, const PolyTerms<C>& b) {
  PolyTerms<C> out;
  for (const auto& [ka, ca] : a) {
    for (const auto& [kb, cb] : b) {
      PhaseKey k{};
      for (int i = 0; i < 4; ++i) k[i] = ka[i] + kb[i];
      polyAdd(out, k, ca * cb);
    }
  }
  return out;
}

/// e(x) as a polynomial (key slot kEHalf unused, kept at zero).
template <Coefficient C>
PolyTerms<C> structurePoly(const real_t<C>& w1, const real_t<C>& w2) {
  using T = coeff_traits<C>;
  PolyTerms<C> e;
  polyAdd(e, {0, 0, 0, 0, 0}, T::one());
  polyAdd(e, {1, 0, 0, 0, 0}, T::fromReal(w1));
  polyAdd(e, {0, 1, 0, 0, 0}, T::fromReal(w2));
  return e;
}

/// Exact division by e(x); returns false when e does not divide n.
template <Coefficient C>
bool divideByStructure(const PolyTerms<C>& n, const real_t<C>& w1, const real_t<C>& w2,
                       PolyTerms<C>& quotient) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  const int pivot = w2 != R(0) ? 1 : 0;
  const int other = 1 - pivot;
  const R wp = pivot == 1 ? w2 : w1;
  const R wo = pivot == 1 ? w1 : w2;
  quotient.clear();
  PolyTerms<C> rem = n;
  while (!rem.empty()) {
    int d = 0;
    for (const auto& [k, c] : rem) d = std::max(d, k[pivot]);
    if (d == 0) return false;
    std::vector<std::pair<PhaseKey, C>> top;
    for (const auto& [k, c] : rem) {
      if (k[pivot] == d) top.emplace_back(k, c);
    }
    for (const auto& [k, c] : top) {
      rem.erase(k);
      PhaseKey q = k;
      q[pivot] -= 1;
      const C qc = c / T::fromReal(wp);
      polyAdd(quotient, q, qc);
      // rem -= qc * x^q * (1 + wo*other); the pivot part cancels the erased top term.
      polyAdd(rem, q, -qc);
      if (wo != R(0)) {
        PhaseKey qo = q;
        qo[other] += 1;
        polyAdd(rem, qo, -qc * T::fromReal(wo));
      }
    }
  }
  return true;
}

}  // namespace detail

template <Coefficient C>
PhaseFunction<C> PhaseFunction<C>::canonical() const {
  using detail::PolyTerms;
  PhaseFunction out(structure_);
  if (structure_.trivial()) {
    for (const auto& [k, c] : terms_) {
      PhaseKey z = k;
      z[kEHalf] = 0;
      out.addTerm(z, c);
    }
    return out;
  }
  const auto ePoly = detail::structurePoly<C>(structure_.omega1, structure_.omega2);
  std::vector<PolyTerms<C>> ePowers{PolyTerms<C>{{PhaseKey{0, 0, 0, 0, 0}, Traits::one()}}};
  auto ePow = [&](int n) -> const PolyTerms<C>& {
    while (static_cast<int>(ePowers.size()) <= n) ePowers.push_back(detail::polyMul(ePowers.back(), ePoly));
    return ePowers[n];
  };

  for (int parity = 0; parity < 2; ++parity) {
    int target = parity;
    bool any = false;
    for (const auto& [k, c] : terms_) {
      if (((k[kEHalf] % 2) + 2) % 2 != parity) continue;
      any = true;
      target = std::min(target, k[kEHalf]);
    }
    if (!any) continue;
    PolyTerms<C> numer;
    for (const auto& [k, c] : terms_) {
      if (((k[kEHalf] % 2) + 2) % 2 != parity) continue;
      const int lift = (k[kEHalf] - target) / 2;
      PhaseKey base = k;
      base[kEHalf] = 0;
      for (const auto& [ek, ec] : ePow(lift)) {
        PhaseKey m{};
        for (int i = 0; i < 4; ++i) m[i] = base[i] + ek[i];
        detail::polyAdd(numer, m, c * ec);
      }
    }
    PolyTerms<C> q;
    while (target < parity && !numer.empty() &&
           detail::divideByStructure(numer, structure_.omega1, structure_.omega2, q)) {
      numer = std::move(q);
      target += 2;
    }
    if (numer.empty()) continue;
    for (const auto& [k, c] : numer) {
      PhaseKey m = k;
      m[kEHalf] = target;
      out.addTerm(m, c);
    }
  }
  return out;
}

using ExactPhase = PhaseFunction<QComplex>;
using FloatPhase = PhaseFunction<std::complex<double>>;

}  // namespace ncq

#pragma once

#include <array>
#include <map>
#include <sstream>
#include <string>
#include <type_traits>

#include "ncq/errors.hpp"
#include "ncq/phase_function.hpp"
#include "ncq/scalar.hpp"
#include "ncq/star_engine.hpp"
#include "ncq/tilde_function.hpp"

namespace ncq {

using MultiIndex = std::array<int, 4>;

template <class F>
struct function_traits;

template <Coefficient C>
struct function_traits<PhaseFunction<C>> {
  using coeff_type = C;
  using var_type = Var;
  static const char* name(int v) { return varName(static_cast<Var>(v)); }
};

template <Coefficient C>
struct function_traits<TildeFunction<C>> {
  using coeff_type = C;
  using var_type = TVar;
  static const char* name(int v) { return tvarName(static_cast<TVar>(v)); }
};

template <class F>
F derivativeOf(const F& f, int var) {
  return f.derivative(static_cast<typename function_traits<F>::var_type>(var)).canonical();
}

enum class TrigKind : int { Cos = 0, Sin = 1 };

/// Linear operator on functions of class F:
///   sum c_a(.) d^a  +  sum c(.) {cos|sin}(alpha d_v)  +  sum c(.) S_v(s),
/// where S_v(s) psi = psi(..., v + s, ...). Coefficients are functions of F.
template <class F>
class DiffOperator {
 public:
  using C = typename function_traits<F>::coeff_type;
  using Traits = coeff_traits<C>;

  struct TrigKey {
    int var;
    TrigKind kind;
    C alpha;
    bool operator<(const TrigKey& o) const {
      if (var != o.var) return var < o.var;
      if (kind != o.kind) return kind < o.kind;
      return Traits::less(alpha, o.alpha);
    }
  };
  struct ShiftKey {
    int var;
    C amount;
    bool operator<(const ShiftKey& o) const {
      if (var != o.var) return var < o.var;
      return Traits::less(amount, o.amount);
    }
  };

  DiffOperator() = default;

  static DiffOperator identity(const F& one) { return multiplication(one); }
  static DiffOperator multiplication(const F& c) {
    DiffOperator op;
    op.addDiff({0, 0, 0, 0}, c);
    return op;
  }
  static DiffOperator derivative(const MultiIndex& a, const F& c) {
    DiffOperator op;
    op.addDiff(a, c);
    return op;
  }
  static DiffOperator trig(int var, TrigKind kind, const C& alpha, const F& c) {
    DiffOperator op;
    op.addTrig({var, kind, alpha}, c);
    return op;
  }
  static DiffOperator shift(int var, const C& amount, const F& c) {
    DiffOperator op;
    op.addShift({var, amount}, c);
    return op;
  }

  const std::map<MultiIndex, F>& diffTerms() const { return diff_; }
  const std::map<TrigKey, F>& trigTerms() const { return trig_; }
  const std::map<ShiftKey, F>& shiftTerms() const { return shift_; }
  bool empty() const { return diff_.empty() && trig_.empty() && shift_.empty(); }
  bool pureDifferential() const { return trig_.empty() && shift_.empty(); }

  void addDiff(const MultiIndex& a, const F& c) { addTo(diff_, a, c); }
  void addTrig(const TrigKey& k, const F& c) { addTo(trig_, k, c); }
  void addShift(const ShiftKey& k, const F& c) { addTo(shift_, k, c); }

  DiffOperator& operator+=(const DiffOperator& o) {
    for (const auto& [k, c] : o.diff_) addDiff(k, c);
    for (const auto& [k, c] : o.trig_) addTrig(k, c);
    for (const auto& [k, c] : o.shift_) addShift(k, c);
    return *this;
  }
  DiffOperator& operator-=(const DiffOperator& o) { return *this += o * (-Traits::one()); }
  friend DiffOperator operator+(DiffOperator a, const DiffOperator& b) { return a += b; }
  friend DiffOperator operator-(DiffOperator a, const DiffOperator& b) { return a -= b; }
  friend DiffOperator operator*(const DiffOperator& a, const C& s) {
    return a.mapCoefficients([&](const F& c) { return c * s; });
  }
  friend bool operator==(const DiffOperator& a, const DiffOperator& b) { return (a - b).empty(); }

  /// f . O
  DiffOperator leftMultiply(const F& f) const {
    return mapCoefficients([&](const F& c) { return (f * c).canonical(); });
  }

  /// D . O for D = d_v or sqrt(e) d_v (the latter only for phase functions).
  DiffOperator composeLeft(const DerivOp& d) const {
    if (!pureDifferential()) {
      throw RepresentationError("composeLeft: only differential terms can be composed");
    }
    DiffOperator out;
    for (const auto& [a, c] : diff_) {
      MultiIndex b = a;
      b[d.var] += 1;
      F dc = derivativeOf(c, d.var);
      F cc = c;
      if (d.weighted) {
        if constexpr (std::is_same_v<F, PhaseFunction<C>>) {
          dc = dc.timesEPower(1).canonical();
          cc = cc.timesEPower(1).canonical();
        } else {
          throw RepresentationError("weighted derivative needs phase functions");
        }
      }
      out.addDiff(a, dc);
      out.addDiff(b, cc);
    }
    return out;
  }

  /// A . B where A is purely differential.
  friend DiffOperator compose(const DiffOperator& a, const DiffOperator& b) {
    if (!a.pureDifferential()) throw RepresentationError("compose: left factor must be differential");
    DiffOperator out;
    for (const auto& [idx, c] : a.diff_) {
      DiffOperator inner = b;
      for (int v = 0; v < 4; ++v) {
        for (int j = 0; j < idx[v]; ++j) inner = inner.composeLeft({v, false});
      }
      out += inner.leftMultiply(c);
    }
    return out;
  }

  /// Coefficient-wise real / imaginary parts. Differential and trig
  /// operators with real alpha map real functions to real functions, so for
  /// real psi: O psi = Re(O) psi + i Im(O) psi.
  DiffOperator realPart() const {
    requireNoShifts();
    return mapCoefficients([](const F& c) { return c.realPart(); });
  }
  DiffOperator imagPart() const {
    requireNoShifts();
    return mapCoefficients([](const F& c) { return c.imagPart(); });
  }
  bool hasRealCoefficients() const {
    bool ok = true;
    forEachCoefficient([&](const F& c) { ok = ok && c.hasRealCoefficients(); });
    return ok;
  }

  /// cos(a d) -> (S(+ia) + S(-ia))/2,  sin(a d) -> (S(+ia) - S(-ia))/(2i).
  DiffOperator trigToShift() const {
    DiffOperator out;
    for (const auto& [k, c] : diff_) out.addDiff(k, c);
    for (const auto& [k, c] : shift_) out.addShift(k, c);
    const C half = Traits::one() / Traits::fromInt(2);
    const C i = Traits::i();
    for (const auto& [k, c] : trig_) {
      const C up = i * k.alpha;
      if (k.kind == TrigKind::Cos) {
        out.addShift({k.var, up}, c * half);
        out.addShift({k.var, -up}, c * half);
      } else {
        const C w = half / i;
        out.addShift({k.var, up}, c * w);
        out.addShift({k.var, -up}, c * (-w));
      }
    }
    return out;
  }

  /// Symbolic action on psi. Trig terms use their Taylor series when it
  /// terminates on psi and the shift form otherwise.
  F apply(const F& psi) const {
    F out;
    for (const auto& [a, c] : diff_) {
      F d = psi;
      for (int v = 0; v < 4; ++v) {
        for (int j = 0; j < a[v]; ++j) d = derivativeOf(d, v);
      }
      out += c * d;
    }
    for (const auto& [k, c] : trig_) out += c * applyTrig(k, psi);
    for (const auto& [k, c] : shift_) out += c * applyShift(k.var, k.amount, psi);
    return out.canonical();
  }

  /// Taylor series of the trig terms applied to psi, truncated after `maxOrder`
  /// derivatives; used as an independent check of the shift form.
  F applyTaylor(const F& psi, int maxOrder) const {
    F out;
    for (const auto& [a, c] : diff_) {
      F d = psi;
      for (int v = 0; v < 4; ++v) {
        for (int j = 0; j < a[v]; ++j) d = derivativeOf(d, v);
      }
      out += c * d;
    }
    for (const auto& [k, c] : trig_) out += c * trigSeries(k, psi, maxOrder).first;
    if (!shift_.empty()) throw RepresentationError("applyTaylor: shift terms present");
    return out.canonical();
  }

  template <class Fn>
  void forEachCoefficient(Fn&& fn) const {
    for (const auto& [k, c] : diff_) fn(c);
    for (const auto& [k, c] : trig_) fn(c);
    for (const auto& [k, c] : shift_) fn(c);
  }

  std::string toString() const {
    std::ostringstream os;
    for (const auto& [a, c] : diff_) {
      os << "[" << c.toString() << "]";
      for (int v = 0; v < 4; ++v) {
        if (a[v] > 0) os << " d_" << function_traits<F>::name(v) << (a[v] > 1 ? "^" + std::to_string(a[v]) : "");
      }
      os << "\n";
    }
    for (const auto& [k, c] : trig_) {
      os << "[" << c.toString() << "] " << (k.kind == TrigKind::Cos ? "cos" : "sin") << "("
         << Traits::toComplex(k.alpha) << " d_" << function_traits<F>::name(k.var) << ")\n";
    }
    for (const auto& [k, c] : shift_) {
      os << "[" << c.toString() << "] S_" << function_traits<F>::name(k.var) << "("
         << Traits::toComplex(k.amount) << ")\n";
    }
    return os.str();
  }

 private:
  template <class Map, class Key>
  static void addTo(Map& m, const Key& k, const F& c) {
    F cc = c.canonical();
    if (cc.empty()) return;
    auto it = m.find(k);
    if (it == m.end()) {
      m.emplace(k, std::move(cc));
      return;
    }
    it->second = (it->second + cc).canonical();
    if (it->second.empty()) m.erase(it);
  }

  template <class Fn>
  DiffOperator mapCoefficients(Fn&& fn) const {
    DiffOperator out;
    for (const auto& [k, c] : diff_) out.addDiff(k, fn(c));
    for (const auto& [k, c] : trig_) out.addTrig(k, fn(c));
    for (const auto& [k, c] : shift_) out.addShift(k, fn(c));
    return out;
  }

  void requireNoShifts() const {
    if (!shift_.empty()) throw RepresentationError("real/imag split is undefined for complex shifts");
  }

  /// Taylor series of cos/sin(alpha d_v) psi; second = true when it terminated.
  static std::pair<F, bool> trigSeries(const TrigKey& k, const F& psi, int maxOrder) {
    F out;
    F d = psi;
    C coef = Traits::one();  // alpha^n / n!
    for (int n = 0; n <= maxOrder; ++n) {
      if (d.empty()) return {out, true};
      const bool even = n % 2 == 0;
      if ((k.kind == TrigKind::Cos) == even) {
        const int m = k.kind == TrigKind::Cos ? n / 2 : (n - 1) / 2;
        out += d * (m % 2 == 0 ? coef : -coef);
      }
      d = derivativeOf(d, k.var);
      coef = coef * k.alpha / Traits::fromInt(n + 1);
    }
    return {out, d.empty()};
  }

  static F applyTrig(const TrigKey& k, const F& psi) {
    constexpr int kTaylorLimit = 64;
    // exp(k x~1) never runs out of x~1 derivatives.
    if (!(k.var == 0 && hasExp(psi))) {
      auto [series, done] = trigSeries(k, psi, kTaylorLimit);
      if (done) return series;
    }
    const C half = Traits::one() / Traits::fromInt(2);
    const C up = Traits::i() * k.alpha;
    const F plus = applyShift(k.var, up, psi);
    const F minus = applyShift(k.var, -up, psi);
    if (k.kind == TrigKind::Cos) return (plus + minus) * half;
    return (plus - minus) * (half / Traits::i());
  }

  static bool hasExp(const F& psi) {
    if constexpr (std::is_same_v<F, TildeFunction<C>>) {
      for (const auto& [key, c] : psi.terms()) {
        if (key[kExpSlot] != 0) return true;
      }
    }
    return false;
  }

  static F applyShift(int var, const C& amount, const F& psi) {
    if constexpr (std::is_same_v<F, TildeFunction<C>>) {
      return psi.shifted(static_cast<TVar>(var), amount);
    } else {
      throw RepresentationError("shift operators act on tilde functions only");
    }
  }

  std::map<MultiIndex, F> diff_;
  std::map<TrigKey, F> trig_;
  std::map<ShiftKey, F> shift_;
};

}  // namespace ncq

#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ncq/errors.hpp"
#include "ncq/scalar.hpp"
#include "ncq/star_engine.hpp"

namespace ncq {

/// Transformed coordinates (x~1, x~2, p~1, p~2).
enum class TVar : int { xt1 = 0, xt2 = 1, pt1 = 2, pt2 = 3 };

inline const char* tvarName(TVar v) {
  static constexpr const char* names[] = {"xt1", "xt2", "pt1", "pt2"};
  return names[static_cast<int>(v)];
}

struct TildePoint {
  double xt1 = 0.0;
  double xt2 = 0.0;
  double pt1 = 0.0;
  double pt2 = 0.0;

  double operator[](TVar v) const {
    switch (v) {
      case TVar::xt1: return xt1;
      case TVar::xt2: return xt2;
      case TVar::pt1: return pt1;
      case TVar::pt2: return pt2;
    }
    return 0.0;
  }
};

using ComplexPoint = std::array<std::complex<double>, 4>;

/// Exponents (x~1, x~2, p~1, p~2) followed by k of exp(k x~1).
using TildeKey = std::array<int, 5>;
inline constexpr int kExpSlot = 4;

/// Finite sum of x~1^m x~2^a p~1^b p~2^c exp(k x~1). The monomials are
/// linearly independent, so the merged term map is already canonical.
template <Coefficient C>
class TildeFunction {
 public:
  using Traits = coeff_traits<C>;
  using R = real_t<C>;
  using Terms = std::map<TildeKey, C>;

  TildeFunction() = default;

  static TildeFunction constant(const C& c) { return monomial({0, 0, 0, 0, 0}, c); }
  static TildeFunction variable(TVar v) {
    TildeKey k{0, 0, 0, 0, 0};
    k[static_cast<int>(v)] = 1;
    return monomial(k, Traits::one());
  }
  /// c * exp(k x~1)
  static TildeFunction exponential(int k, const C& c = Traits::one()) { return monomial({0, 0, 0, 0, k}, c); }
  static TildeFunction monomial(const TildeKey& k, const C& c) {
    TildeFunction f;
    f.addTerm(k, c);
    return f;
  }

  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  bool isZero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  TildeFunction canonical() const { return *this; }

  void addTerm(const TildeKey& k, const C& c) {
    if (Traits::isZero(c)) return;
    auto [it, inserted] = terms_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (Traits::isZero(it->second)) terms_.erase(it);
    }
  }

  TildeFunction& operator+=(const TildeFunction& o) {
    for (const auto& [k, c] : o.terms_) addTerm(k, c);
    return *this;
  }
  TildeFunction& operator-=(const TildeFunction& o) {
    for (const auto& [k, c] : o.terms_) addTerm(k, -c);
    return *this;
  }
  TildeFunction& operator*=(const C& s) {
    if (Traits::isZero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend TildeFunction operator+(TildeFunction a, const TildeFunction& b) { return a += b; }
  friend TildeFunction operator-(TildeFunction a, const TildeFunction& b) { return a -= b; }
  friend TildeFunction operator-(TildeFunction a) { return a *= -Traits::one(); }
  friend TildeFunction operator*(TildeFunction a, const C& s) { return a *= s; }
  friend TildeFunction operator*(const C& s, TildeFunction a) { return a *= s; }
  friend TildeFunction operator*(const TildeFunction& a, const TildeFunction& b) {
    TildeFunction out;
    for (const auto& [ka, ca] : a.terms_) {
      for (const auto& [kb, cb] : b.terms_) {
        TildeKey k;
        for (int i = 0; i < 5; ++i) k[i] = ka[i] + kb[i];
        out.addTerm(k, ca * cb);
      }
    }
    return out;
  }
  friend bool operator==(const TildeFunction& a, const TildeFunction& b) { return (a - b).empty(); }

  TildeFunction derivative(TVar v) const {
    const int idx = static_cast<int>(v);
    TildeFunction out;
    for (const auto& [k, c] : terms_) {
      if (k[idx] > 0) {
        TildeKey d = k;
        d[idx] -= 1;
        out.addTerm(d, c * Traits::fromInt(k[idx]));
      }
      if (v == TVar::xt1 && k[kExpSlot] != 0) out.addTerm(k, c * Traits::fromInt(k[kExpSlot]));
    }
    return out;
  }

  /// f with `v` replaced by v + amount. Polynomial dependence expands
  /// binomially (exact); exp(k x~1) picks up exp(k amount), which needs
  /// floating coefficients.
  TildeFunction shifted(TVar v, const C& amount) const {
    const int idx = static_cast<int>(v);
    TildeFunction out;
    for (const auto& [k, c] : terms_) {
      C factor = c;
      if (v == TVar::xt1 && k[kExpSlot] != 0) {
        if constexpr (Traits::exact) {
          throw RepresentationError("exact shift of exp(k xt1) is not representable");
        } else {
          factor *= std::exp(static_cast<double>(k[kExpSlot]) * amount);
        }
      }
      // (v + a)^n = sum_j binom(n,j) v^j a^{n-j}
      const int n = k[idx];
      C binom = Traits::one();
      std::vector<C> powers(n + 1, Traits::one());
      for (int j = 1; j <= n; ++j) powers[j] = powers[j - 1] * amount;
      for (int j = n; j >= 0; --j) {
        TildeKey s = k;
        s[idx] = j;
        out.addTerm(s, factor * binom * powers[n - j]);
        binom = binom * Traits::fromInt(j) / Traits::fromInt(n - j + 1);
      }
    }
    return out;
  }

  TildeFunction conj() const {
    TildeFunction out;
    for (const auto& [k, c] : terms_) out.addTerm(k, Traits::conj(c));
    return out;
  }
  TildeFunction realPart() const {
    TildeFunction out;
    for (const auto& [k, c] : terms_) out.addTerm(k, Traits::fromReal(Traits::re(c)));
    return out;
  }
  TildeFunction imagPart() const {
    TildeFunction out;
    for (const auto& [k, c] : terms_) out.addTerm(k, Traits::fromReal(Traits::im(c)));
    return out;
  }
  bool hasRealCoefficients() const {
    return std::all_of(terms_.begin(), terms_.end(),
                       [](const auto& t) { return Traits::isRealZero(Traits::im(t.second)); });
  }

  int degree(TVar v) const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k[static_cast<int>(v)]);
    return d;
  }
  bool dependsOn(TVar v) const {
    const int idx = static_cast<int>(v);
    return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) {
      return t.first[idx] != 0 || (v == TVar::xt1 && t.first[kExpSlot] != 0);
    });
  }

  std::complex<double> evaluate(const ComplexPoint& z) const {
    std::complex<double> sum = 0.0;
    for (const auto& [k, c] : terms_) {
      std::complex<double> t = Traits::toComplex(c);
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < k[i]; ++j) t *= z[i];
      }
      if (k[kExpSlot] != 0) t *= std::exp(static_cast<double>(k[kExpSlot]) * z[0]);
      sum += t;
    }
    return sum;
  }
  std::complex<double> evaluate(const TildePoint& q) const {
    return evaluate(ComplexPoint{q.xt1, q.xt2, q.pt1, q.pt2});
  }

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
        os << "*" << tvarName(static_cast<TVar>(i));
        if (k[i] > 1) os << "^" << k[i];
      }
      if (k[kExpSlot] != 0) os << "*exp(" << k[kExpSlot] << "*xt1)";
    }
    return os.str();
  }

 private:
  Terms terms_{};
};

template <Coefficient C>
struct TildeStarResult {
  TildeFunction<C> value;
  bool terminated = true;
  int highestOrder = 0;
};

/// Letters of the block Moyal product with tensor diag(gamma J, thetabar J).
template <Coefficient C>
std::vector<Letter<C>> blockMoyalLetters(const real_t<C>& gamma, const real_t<C>& thetabar) {
  using T = coeff_traits<C>;
  using R = real_t<C>;
  std::vector<Letter<C>> letters;
  if (gamma != R(0)) {
    const C g = T::fromParts(R(0), gamma / R(2));
    letters.push_back({{0, false}, {1, false}, g, 0});
    letters.push_back({{1, false}, {0, false}, -g, 0});
  }
  if (thetabar != R(0)) {
    const C t = T::fromParts(R(0), thetabar / R(2));
    letters.push_back({{2, false}, {3, false}, t, 0});
    letters.push_back({{3, false}, {2, false}, -t, 0});
  }
  return letters;
}

/// Constant-coefficient Moyal product *_1 *_2 on tilde functions, truncated
/// at `order` (exp(k x~1) factors never run out of x~1 derivatives).
template <Coefficient C>
TildeStarResult<C> blockMoyal(const TildeFunction<C>& f, const TildeFunction<C>& g,
                              const real_t<C>& gamma, const real_t<C>& thetabar, int order) {
  using T = coeff_traits<C>;
  using Term = TensorTerm<TildeFunction<C>, TildeFunction<C>, C>;
  std::vector<Term> terms{{f, g, T::one(), 0}};
  auto apply = [](const DerivOp& op, const TildeFunction<C>& x) { return x.derivative(static_cast<TVar>(op.var)); };
  auto isZero = [](const TildeFunction<C>& x) { return x.empty(); };
  auto expanded = applyExponential(blockMoyalLetters<C>(gamma, thetabar), terms, order, apply, isZero);
  TildeStarResult<C> r;
  r.terminated = expanded.terminated;
  r.highestOrder = expanded.highestOrder;
  for (const auto& t : expanded.terms) r.value += (t.left * t.right) * t.scale;
  return r;
}

template <Coefficient C>
TildeStarResult<C> blockMoyalCommutator(const TildeFunction<C>& f, const TildeFunction<C>& g,
                                        const real_t<C>& gamma, const real_t<C>& thetabar, int order) {
  auto fg = blockMoyal(f, g, gamma, thetabar, order);
  auto gf = blockMoyal(g, f, gamma, thetabar, order);
  return {fg.value - gf.value, fg.terminated && gf.terminated, std::max(fg.highestOrder, gf.highestOrder)};
}

using ExactTilde = TildeFunction<QComplex>;
using FloatTilde = TildeFunction<std::complex<double>>;

}  // namespace ncq

#pragma once

// Exponentials of bidifferential operators acting on tensor products.
//
// A sector is a sum of "letters" B = sum_k c_k A_k (x) B_k, where A_k and B_k
// are first-order derivative operators acting on the left and right slot.
// exp(B) applied to f (x) g expands as sum_n (1/n!) sum_{|w|=n} c_w (A_w f) (x) (B_w g),
// where A_w = A_{w_n} ... A_{w_1} is the n-fold composition in word order.
// Branches are pruned as soon as either slot vanishes, so the expansion
// terminates exactly whenever the derivatives run out.

#include <stdexcept>
#include <vector>

#include "ncq/phase_function.hpp"
#include "ncq/scalar.hpp"

namespace ncq {

/// d/dvar, optionally premultiplied by sqrt(e(x)).
struct DerivOp {
  int var = 0;
  bool weighted = false;
};

template <Coefficient C>
struct Letter {
  DerivOp left;
  DerivOp right;
  C scale;
  /// Power of e^{1/2} attached to the product after multiplication (frozen coefficients).
  int weightEHalf = 0;
};

template <class L, class Rt, Coefficient C>
struct TensorTerm {
  L left;
  Rt right;
  C scale;
  int ehalf = 0;
};

template <class L, class Rt, Coefficient C>
struct ExpansionResult {
  std::vector<TensorTerm<L, Rt, C>> terms;
  bool terminated = true;
  int highestOrder = 0;
};

/// Hard cap for sectors expected to terminate on their own.
inline constexpr int kUnboundedOrderCap = 64;

/// Applies exp(sum of letters) to every tensor term. maxOrder < 0 means the
/// series must terminate by itself (std::logic_error past kUnboundedOrderCap).
/// `apply(DerivOp, x)` returns the derivative of a slot value in canonical form;
/// `isZero(x)` tests a slot.
template <class L, class Rt, Coefficient C, class Apply, class IsZero>
ExpansionResult<L, Rt, C> applyExponential(const std::vector<Letter<C>>& letters,
                                           const std::vector<TensorTerm<L, Rt, C>>& input,
                                           int maxOrder, Apply&& apply, IsZero&& isZero) {
  using T = coeff_traits<C>;
  ExpansionResult<L, Rt, C> out;
  out.terms = input;
  if (letters.empty()) return out;
  std::vector<TensorTerm<L, Rt, C>> frontier = input;
  int order = 0;
  while (!frontier.empty()) {
    const bool capped = maxOrder >= 0 && order >= maxOrder;
    if (!capped && maxOrder < 0 && order >= kUnboundedOrderCap) {
      throw std::logic_error("bidifferential series failed to terminate");
    }
    std::vector<TensorTerm<L, Rt, C>> next;
    const C invN = T::one() / T::fromInt(order + 1);
    for (const auto& term : frontier) {
      for (const auto& letter : letters) {
        L left = apply(letter.left, term.left);
        if (isZero(left)) continue;
        Rt right = apply(letter.right, term.right);
        if (isZero(right)) continue;
        if (capped) {
          // A surviving branch past the cap: the series was truncated.
          out.terminated = false;
          return out;
        }
        next.push_back({std::move(left), std::move(right), term.scale * letter.scale * invN,
                        term.ehalf + letter.weightEHalf});
      }
    }
    if (next.empty()) break;
    ++order;
    out.highestOrder = order;
    out.terms.insert(out.terms.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  return out;
}

}  // namespace ncq

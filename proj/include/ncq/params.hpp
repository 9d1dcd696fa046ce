#pragma once

#include <string>

#include "ncq/scalar.hpp"

namespace ncq {

/// Structure constants of the deformed phase-space algebra
///   [x1,x2] = i theta e(x),  [x^i,p^j] = i hbar delta^ij,  [p1,p2] = i thetabar,
/// with structure function e(x) = 1 + omega1 x1 + omega2 x2.
template <class R>
struct DeformationParams {
  R theta{1};
  R thetabar{1};
  R hbar{1};
  R omega1{0};
  R omega2{1};

  /// True when e(x) == 1 identically (plain Moyal plane).
  bool isMoyal() const { return omega1 == R(0) && omega2 == R(0); }

  double structureAt(double x1, double x2) const {
    return 1.0 + toD(omega1) * x1 + toD(omega2) * x2;
  }

  template <class R2>
  DeformationParams<R2> as() const {
    return {R2(toD(theta)), R2(toD(thetabar)), R2(toD(hbar)), R2(toD(omega1)), R2(toD(omega2))};
  }

  friend bool operator==(const DeformationParams&, const DeformationParams&) = default;

 private:
  static double toD(const R& r) {
    if constexpr (std::is_same_v<R, double>) {
      return r;
    } else {
      return r.template convert_to<double>();
    }
  }
};

using ExactParams = DeformationParams<Rational>;
using FloatParams = DeformationParams<double>;

}  // namespace ncq

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "ncq/errors.hpp"
#include "ncq/scalar.hpp"

namespace ncq {

struct QuadratureSpec {
  double absTol = 1e-14;
  double relTol = 1e-12;
  int maxLevels = 15;

  void validate() const {
    if (!(absTol >= 1e-14)) throw ParameterError("quadrature absTol must be >= 1e-14");
    if (!(relTol > 0.0)) throw ParameterError("quadrature relTol must be positive");
    if (maxLevels < 1) throw ParameterError("quadrature maxLevels must be >= 1");
  }
};

struct QuadratureResult {
  double value = 0.0;
  double errorEstimate = 0.0;
  double l1 = 0.0;
};

/// Double-exponential quadrature over [a, b]; either end may be infinite.
inline QuadratureResult integrateDetailed(const std::function<double(double)>& f, double a, double b,
                                          const QuadratureSpec& q = {}) {
  q.validate();
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integrate: NaN bound");
  if (a == b) return {};
  if (a > b) {
    auto r = integrateDetailed(f, b, a, q);
    r.value = -r.value;
    return r;
  }
  const auto levels = static_cast<std::size_t>(q.maxLevels);
  QuadratureResult r;
  try {
    if (std::isinf(a) && std::isinf(b)) {
      boost::math::quadrature::sinh_sinh<double> integrator(levels);
      r.value = integrator.integrate(f, q.relTol, &r.errorEstimate, &r.l1);
    } else if (std::isinf(b)) {
      boost::math::quadrature::exp_sinh<double> integrator(levels);
      r.value = integrator.integrate(f, a, b, q.relTol, &r.errorEstimate, &r.l1);
    } else if (std::isinf(a)) {
      boost::math::quadrature::exp_sinh<double> integrator(levels);
      r.value = integrator.integrate([&](double t) { return f(-t); }, -b, -a, q.relTol, &r.errorEstimate, &r.l1);
    } else {
      // Mapped onto the native interval [-1, 1]: general finite intervals can
      // round an abscissa onto the endpoint.
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      boost::math::quadrature::tanh_sinh<double> integrator(levels);
      r.value = half * integrator.integrate([&](double u) { return f(mid + half * u); }, -1.0, 1.0, q.relTol,
                                            &r.errorEstimate, &r.l1);
      r.errorEstimate *= half;
      r.l1 *= half;
    }
  } catch (const std::domain_error& e) {
    throw ConvergenceError(std::string("integrate: ") + e.what());
  }
  if (!std::isfinite(r.value)) throw ConvergenceError("integrate: non-finite result");
  if (r.errorEstimate > std::max(q.absTol, q.relTol * std::max(std::abs(r.value), r.l1))) {
    std::ostringstream os;
    os << "integrate: error estimate " << r.errorEstimate << " above tolerance after " << q.maxLevels << " levels";
    throw ConvergenceError(os.str());
  }
  return r;
}

inline double integrate(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& q = {}) {
  return integrateDetailed(f, a, b, q).value;
}

/// Upper limit T with exp(-z (cosh T - 1) + |Re nu| T) < bound on the decreasing branch.
inline double besselTruncation(double reNu, double z, double bound) {
  const double logBound = std::log(bound);
  double t = 0.0;
  while (true) {
    const bool decreasing = z * std::sinh(t) > reNu;
    if (decreasing && -z * (std::cosh(t) - 1.0) + reNu * t < logBound) return t;
    t += 0.01;
  }
}

/// K_nu(z) = int_0^inf exp(-z cosh t) cosh(nu t) dt for complex order nu and
/// real z in [1e-3, 50], |nu| <= 20. The integral is carried out on the
/// scaled integrand exp(-z (cosh t - 1)) and the tail bound is applied there,
/// which is stricter than bounding exp(-z cosh T) itself.
inline std::complex<double> besselK(std::complex<double> nu, double z, const QuadratureSpec& q = {}) {
  q.validate();
  if (!(z >= 1e-3 && z <= 50.0)) throw DomainError("besselK: z outside [1e-3, 50]");
  if (!(std::abs(nu) <= 20.0)) throw DomainError("besselK: |nu| > 20");
  const double a = std::abs(nu.real());
  // cosh((a + ib)t) = cosh(at)cos(bt) + i sinh(at)sin(bt); K is even in nu,
  // so a negative real part flips the sign of b.
  const double b = nu.real() < 0 ? -nu.imag() : nu.imag();
  const double T = besselTruncation(a, z, q.absTol / 10.0);
  // Panels of about half an oscillation keep each tanh-sinh call smooth.
  const double freq = std::max({a, std::abs(b), 1.0});
  const int panels = static_cast<int>(std::ceil(T * freq / std::numbers::pi));
  const double width = T / panels;
  auto re = [&](double t) { return std::exp(-z * (std::cosh(t) - 1.0)) * std::cosh(a * t) * std::cos(b * t); };
  auto im = [&](double t) { return std::exp(-z * (std::cosh(t) - 1.0)) * std::sinh(a * t) * std::sin(b * t); };
  QuadratureSpec panelSpec = q;
  panelSpec.absTol = std::max(q.absTol / panels, 1e-14);
  double vr = 0.0, vi = 0.0, err = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = k * width, hi = k + 1 == panels ? T : (k + 1) * width;
    const auto pr = integrateDetailed(re, lo, hi, panelSpec);
    vr += pr.value;
    err += pr.errorEstimate;
    if (b != 0.0) {
      const auto pi = integrateDetailed(im, lo, hi, panelSpec);
      vi += pi.value;
      err += pi.errorEstimate;
    }
  }
  const std::complex<double> scaled(vr, vi);
  if (err > std::max(q.absTol, q.relTol * std::abs(scaled))) {
    std::ostringstream os;
    os << "besselK: error estimate " << err << " above tolerance";
    throw ConvergenceError(os.str());
  }
  return scaled * std::exp(-z);
}

/// Physicists' Hermite polynomial by the three-term recurrence.
inline double hermite(int n, double x) {
  if (n < 0 || n > 200) throw ParameterError("hermite: n must be in [0, 200]");
  double h0 = 1.0;
  if (n == 0) return h0;
  double h1 = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double h2 = 2.0 * x * h1 - 2.0 * k * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

/// Exact coefficients of H_n (index = power of x).
inline std::vector<Rational> hermiteCoefficients(int n) {
  if (n < 0 || n > 200) throw ParameterError("hermite: n must be in [0, 200]");
  std::vector<Rational> h0{Rational(1)};
  if (n == 0) return h0;
  std::vector<Rational> h1{Rational(0), Rational(2)};
  for (int k = 1; k < n; ++k) {
    std::vector<Rational> h2(k + 2, Rational(0));
    for (int j = 0; j <= k; ++j) h2[j + 1] += 2 * h1[j];
    for (int j = 0; j < static_cast<int>(h0.size()); ++j) h2[j] -= Rational(2 * k) * h0[j];
    h0 = std::move(h1);
    h1 = std::move(h2);
  }
  return h1;
}

inline Rational evaluatePolynomial(const std::vector<Rational>& coeffs, const Rational& x) {
  Rational acc(0);
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

/// Normalized Hermite functions psi_0..psi_{nmax} at p, via the stable
/// recurrence psi_{k+1} = sqrt(2/(k+1)) p psi_k - sqrt(k/(k+1)) psi_{k-1}.
inline std::vector<double> hermiteFunctions(int nmax, double p) {
  if (nmax < 0) throw ParameterError("hermiteFunctions: nmax must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(nmax) + 1);
  out[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * p * p);
  if (nmax >= 1) out[1] = std::sqrt(2.0) * p * out[0];
  for (int k = 1; k < nmax; ++k) {
    out[k + 1] = std::sqrt(2.0 / (k + 1)) * p * out[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * out[k - 1];
  }
  return out;
}

struct Psi2Value {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

inline void requirePsi2Level(int n) {
  if (n < 0 || n > 60) throw ParameterError("psi2: n must be in [0, 60]");
}

/// Unit-norm oscillator eigenfunction pi^{-1/4} (2^n n!)^{-1/2} H_n(p) e^{-p^2/2}
/// with derivatives from the ladder relations
///   psi' = sqrt(n/2) psi_{n-1} - sqrt((n+1)/2) psi_{n+1},
///   psi'' = (sqrt(n(n-1)) psi_{n-2} - (2n+1) psi_n + sqrt((n+1)(n+2)) psi_{n+2}) / 2.
inline Psi2Value psi2Full(int n, double p) {
  requirePsi2Level(n);
  const auto f = hermiteFunctions(n + 2, p);
  auto at = [&](int k) { return k < 0 ? 0.0 : f[k]; };
  const double dn = n;
  Psi2Value v;
  v.value = f[n];
  v.d1 = std::sqrt(dn / 2.0) * at(n - 1) - std::sqrt((dn + 1.0) / 2.0) * at(n + 1);
  v.d2 = 0.5 * (std::sqrt(dn * (dn - 1.0)) * at(n - 2) - (2.0 * dn + 1.0) * f[n] +
                std::sqrt((dn + 1.0) * (dn + 2.0)) * f[n + 2]);
  return v;
}

inline double psi2(int n, double p) { return psi2Full(n, p).value; }

/// The literal prefactor pi^{-1/4} / (2^n n!) (not unit norm for n > 0).
inline double psi2LiteralPrefactor(int n, double p) {
  requirePsi2Level(n);
  return std::pow(std::numbers::pi, -0.25) / (std::ldexp(1.0, n) * std::tgamma(n + 1.0)) * hermite(n, p) *
         std::exp(-0.5 * p * p);
}

struct Psi1Value {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  /// |Im(K_{1/2-ik} + K_{1/2+ik})| before it was discarded.
  double imagResidue = 0.0;
};

inline constexpr double kPsi1ImagTolerance = 1e-12;

namespace detail {

/// e^{x/2} S(x) and derivatives, S = K_{nu}(e^x) + K_{conj nu}(e^x), nu = 1/2 + i k.
inline Psi1Value liouvilleCore(double kappa, double x, const QuadratureSpec& q) {
  const double z = std::exp(x);
  const std::complex<double> nu(0.5, kappa);
  const auto kp = besselK(nu, z, q);
  const auto km = besselK(std::conj(nu), z, q);
  const auto sum = kp + km;
  Psi1Value v;
  v.imagResidue = std::abs(sum.imag());
  if (v.imagResidue > kPsi1ImagTolerance * std::max(1.0, std::abs(sum.real()))) {
    throw AssertionFailure("psi1: imaginary residue above tolerance");
  }
  const double S = sum.real();
  // d/dx K_nu(e^x) = -z K_{nu-1}(z) - nu K_nu(z), and K_{nu-1} = K_{1-nu} = conj(K_nu) here.
  const double S1 = 2.0 * (-z * std::conj(kp) - nu * kp).real();
  // d^2/dx^2 K_nu(e^x) = (z^2 + nu^2) K_nu(z).
  const double S2 = 2.0 * ((z * z + nu * nu) * kp).real();
  const double w = std::exp(0.5 * x);
  v.value = w * S;
  v.d1 = w * (0.5 * S + S1);
  v.d2 = w * (0.25 * S + S1 + S2);
  return v;
}

}  // namespace detail

/// Liouville-sector eigenfunction
///   ((cosh(pi k) e^x)/(4 pi^2 k))^{1/2} (K_{1/2-ik}(e^x) + K_{1/2+ik}(e^x)), k = sqrt(E1),
/// with analytic first and second x-derivatives. E1 must be positive.
inline Psi1Value psi1Full(double e1, double x, const QuadratureSpec& q = {}) {
  if (!(e1 > 0.0)) throw DomainError("psi1: E1 must be > 0 (use psi1Unnormalized for E1 = 0)");
  const double kappa = std::sqrt(e1);
  auto v = detail::liouvilleCore(kappa, x, q);
  const double a = std::sqrt(std::cosh(std::numbers::pi * kappa) / (4.0 * std::numbers::pi * std::numbers::pi * kappa));
  v.value *= a;
  v.d1 *= a;
  v.d2 *= a;
  return v;
}

inline double psi1(double e1, double x, const QuadratureSpec& q = {}) { return psi1Full(e1, x, q).value; }

/// Same function without the E1-dependent prefactor: e^{x/2}(K_{1/2-ik} + K_{1/2+ik})(e^x).
/// Defined for E1 >= 0; `orderScale` multiplies k (k = orderScale * sqrt(E1)).
inline Psi1Value psi1Unnormalized(double e1, double x, const QuadratureSpec& q = {}, double orderScale = 1.0) {
  if (!(e1 >= 0.0)) throw DomainError("psi1Unnormalized: E1 must be >= 0");
  return detail::liouvilleCore(orderScale * std::sqrt(e1), x, q);
}

}  // namespace ncq

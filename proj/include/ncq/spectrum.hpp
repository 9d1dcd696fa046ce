#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "ncq/errors.hpp"
#include "ncq/grid.hpp"
#include "ncq/operator.hpp"
#include "ncq/specfun.hpp"
#include "ncq/transform.hpp"

namespace ncq {

struct EigenSolution {
  double e1 = 0.0;
  int n = 0;
  double e = 0.0;
};

/// E = E1 + E2 with E2 = n + 1/2.
inline EigenSolution assemble(double e1, int n) {
  if (!(e1 > 0.0)) throw DomainError("assemble: E1 must be > 0");
  if (n < 0) throw DomainError("assemble: n must be >= 0");
  return {e1, n, e1 + (n + 0.5)};
}

/// Oscillator energy n + 1/2 and the total, computed in exact arithmetic.
inline Rational exactTotalEnergy(const Rational& e1, int n) { return e1 + Rational(2 * n + 1, 2); }

struct ResidualPoint {
  std::vector<double> coords;
  std::complex<double> value;
};

struct ResidualReport {
  std::string equationId;
  Grid grid;
  double l2 = 0.0;
  double sup = 0.0;
  std::vector<double> worstPoint;
  std::string notes;
  std::vector<ResidualPoint> points;
  std::size_t skippedPoints = 0;
  /// Auxiliary scalar diagnostics (sorted by name).
  std::map<std::string, double> metrics;
};

namespace detail {

/// Fills l2 = sqrt(dV sum |r|^2), sup and worstPoint from `points`.
inline void finalizeReport(ResidualReport& r) {
  double sum = 0.0;
  r.sup = 0.0;
  r.worstPoint.clear();
  for (const auto& p : r.points) {
    const double a = std::abs(p.value);
    sum += a * a;
    if (r.worstPoint.empty() || a > r.sup) {
      r.sup = a;
      r.worstPoint = p.coords;
    }
  }
  r.l2 = std::sqrt(r.grid.cellVolume() * sum);
}

inline void requireAxes(const Grid& g, std::size_t n, const char* who) {
  g.validate();
  if (g.axes.size() != n) throw GridError(std::string(who) + ": wrong number of axes");
}

/// psi1(E1, .) as a function of the transformed coordinates, with analytic
/// x~1 derivatives up to second order. Evaluations are cached per x~1.
class LiouvilleHandle {
 public:
  LiouvilleHandle(double e1, QuadratureSpec q) : e1_(e1), q_(q) {}

  const Psi1Value& at(double x) {
    auto it = cache_.find(x);
    if (it == cache_.end()) it = cache_.emplace(x, psi1Full(e1_, x, q_)).first;
    return it->second;
  }

  AnalyticHandle handle() {
    AnalyticHandle h;
    h.value = [this](const ComplexPoint& z) -> std::complex<double> {
      if (z[0].imag() != 0.0) throw DomainError("psi1 handle: complex xt1 not supported");
      return at(z[0].real()).value;
    };
    h.derivative = [this](const MultiIndex& a, const ComplexPoint& z) -> std::optional<std::complex<double>> {
      if (z[0].imag() != 0.0) return std::nullopt;
      if (a[2] != 0 || a[3] != 0) return std::complex<double>(0.0);
      if (a[1] != 0) return std::complex<double>(0.0);
      if (a[0] == 1) return at(z[0].real()).d1;
      if (a[0] == 2) return at(z[0].real()).d2;
      return std::nullopt;
    };
    return h;
  }

 private:
  double e1_;
  QuadratureSpec q_;
  std::map<double, Psi1Value> cache_;
};

inline ExactParams liouvillePreset() { return presetFromGamma<Rational>(Rational(1), Rational(2)); }

inline FloatTilde toFloat(const ExactTilde& f) {
  FloatTilde out;
  for (const auto& [k, c] : f.terms()) out.addTerm(k, coeff_traits<QComplex>::toComplex(c));
  return out;
}

inline TildeOperator<std::complex<double>> toFloat(const TildeOperator<QComplex>& op) {
  using T = coeff_traits<QComplex>;
  TildeOperator<std::complex<double>> out;
  for (const auto& [a, c] : op.diffTerms()) out.addDiff(a, toFloat(c));
  for (const auto& [k, c] : op.trigTerms()) out.addTrig({k.var, k.kind, T::toComplex(k.alpha)}, toFloat(c));
  for (const auto& [k, c] : op.shiftTerms()) out.addShift({k.var, T::toComplex(k.amount)}, toFloat(c));
  return out;
}

/// Splits an operator into its differential and shift parts after trig conversion.
template <class F>
std::pair<DiffOperator<F>, DiffOperator<F>> splitShiftPart(const DiffOperator<F>& op) {
  const auto s = op.trigToShift();
  DiffOperator<F> diff, shift;
  for (const auto& [a, c] : s.diffTerms()) diff.addDiff(a, c);
  for (const auto& [k, c] : s.shiftTerms()) shift.addShift(k, c);
  return {diff, shift};
}

inline ResidualReport reportFromField(const std::string& id, const Grid& g, const std::vector<std::complex<double>>& v) {
  ResidualReport r;
  r.equationId = id;
  r.grid = g;
  for (std::size_t n = 0; n < g.size(); ++n) r.points.push_back({g.coordinates(n), v[n]});
  finalizeReport(r);
  return r;
}

/// Largest deviation of each fixed-x~1 column from its least-squares line in x~2.
inline double columnLinearityDefect(const ResidualReport& r) {
  if (r.grid.axes.size() != 2) return 0.0;
  const int n1 = r.grid.axes[0].count, n2 = r.grid.axes[1].count;
  double worst = 0.0;
  for (int i = 0; i < n1; ++i) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int j = 0; j < n2; ++j) {
      const auto& p = r.points[static_cast<std::size_t>(i) * n2 + j];
      const double x = p.coords[1], y = p.value.real();
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (n2 * sxy - sx * sy) / (n2 * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n2;
    for (int j = 0; j < n2; ++j) {
      const auto& p = r.points[static_cast<std::size_t>(i) * n2 + j];
      worst = std::max(worst, std::abs(p.value - std::complex<double>(slope * p.coords[1] + icpt, 0.0)));
    }
  }
  return worst;
}

}  // namespace detail

/// Default grid over (x~1, x~2) used by the two-dimensional residuals.
inline Grid liouvilleGrid(double x1min = -3, double x1max = 3, int n1 = 61, double x2min = -2, double x2max = 2,
                          int n2 = 41) {
  return Grid{{Axis{"xt1", 0, x1min, x1max, n1}, Axis{"xt2", 1, x2min, x2max, n2}}, {}};
}

/// Residual of the imaginary-part equation (x~2 d_1 - e^{2x~1} sin d_2 + e^{x~1} sin(d_2/2)) psi1.
inline ResidualReport residualIm(double e1, const Grid& grid, const QuadratureSpec& q = {}) {
  detail::requireAxes(grid, 2, "residualIm");
  const auto op = detail::toFloat(imaginaryEquationOperator<QComplex>(h1StarOperator<QComplex>(detail::liouvillePreset())));
  const auto [diffPart, shiftPart] = detail::splitShiftPart(op);
  detail::LiouvilleHandle psi(e1, q);
  const auto h = psi.handle();
  const auto total = applyNumeric(op, h, grid);
  const auto shifts = applyNumeric(shiftPart, h, grid);
  auto r = detail::reportFromField("im", grid, total.values);
  double shiftMax = 0.0;
  for (const auto& v : shifts.values) shiftMax = std::max(shiftMax, std::abs(v));
  r.metrics["shiftTermsMax"] = shiftMax;
  r.metrics["columnLinearityDefect"] = detail::columnLinearityDefect(r);
  r.metrics["finiteDifferenceCalls"] = static_cast<double>(total.finiteDifferenceCalls);
  r.notes = "psi1 does not depend on xt2: the shifted differences cancel and the residual is xt2 * d_xt1 psi1";
  return r;
}

/// Literal expanded real-part equation at one point (x~2 != 0).
inline std::complex<double> expandedRealEquation(const ComplexFn& psi, double x1, double x2, double e1) {
  using cd = std::complex<double>;
  const cd i(0.0, 1.0);
  auto at = [&](cd s) { return psi(ComplexPoint{x1, cd(x2) + s, 0.0, 0.0}); };
  const double ex = std::exp(x1), e2x = std::exp(2 * x1), e4x = std::exp(4 * x1);
  const cd p0 = at(0.0), pi = at(i), mi = at(-i), ph = at(0.5 * i), mh = at(-0.5 * i), p2 = at(2.0 * i);
  const cd bracket = e2x / (i * x2) * (pi - mi) - ex / (2.0 * i * x2) * (ph - mh) -
                     e4x / (4.0 * x2 * x2) * (p2 - p0) + e2x / (4.0 * x2 * x2) * (pi - p0 + 2.0 * mi);
  return (x2 * x2 + 0.25 - 2.0 * e1) * p0 - 0.25 * bracket - e2x / 2.0 * (pi + mi) + ex / 2.0 * (ph + mh);
}

struct RealResiduals {
  ResidualReport real;
  ResidualReport realnew;
};

/// Residuals of the real-part equation
///   ((x~2)^2 - d_1^2/4 + e^{2x~1} cos d_2 - e^{x~1} cos(d_2/2) + 1/4 - 2E1) psi1
/// and of its expanded shift form (rows with x~2 = 0 are skipped and counted).
inline RealResiduals residualReal(double e1, const Grid& grid, const QuadratureSpec& q = {}) {
  detail::requireAxes(grid, 2, "residualReal");
  const auto op =
      detail::toFloat(realEquationOperator<QComplex>(h1StarOperator<QComplex>(detail::liouvillePreset()), Rational(0)));
  detail::LiouvilleHandle psi(e1, q);
  const auto h = psi.handle();
  // The E1 term is added numerically so that any real E1 is accepted.
  auto field = applyNumeric(op, h, grid);
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto p = grid.point(n);
    field.values[n] -= 2.0 * e1 * h.value(ComplexPoint{p[0], p[1], p[2], p[3]});
  }
  RealResiduals out;
  out.real = detail::reportFromField("real", grid, field.values);
  out.real.notes = "cos shifts act as the identity on xt2-independent psi1";

  auto& lit = out.realnew;
  lit.equationId = "realnew";
  lit.grid = grid;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const auto p = grid.point(n);
    if (std::abs(p[1]) < 1e-12) {
      ++lit.skippedPoints;
      continue;
    }
    lit.points.push_back({grid.coordinates(n), expandedRealEquation(h.value, p[0], p[1], e1)});
  }
  detail::finalizeReport(lit);
  lit.metrics["singularPointsSkipped"] = static_cast<double>(lit.skippedPoints);
  lit.notes = "expanded shift form evaluated as printed; xt2 = 0 points skipped";
  return out;
}

struct OdeConvention {
  double a = 0.5;
  double b = 0.5;
  double c = -0.5;
  double d = 0.125;
};

/// Residual of [-a d^2 + b e^{2x} + c e^{x} + d - E1] psi1 on a grid over x~1.
/// `orderScale` replaces sqrt(E1) by orderScale * sqrt(E1) in the Bessel order
/// (the normalization prefactor is dropped when orderScale != 1).
inline ResidualReport odeResidual1(double e1, const Grid& grid, const OdeConvention& cv = {},
                                   const QuadratureSpec& q = {}, double orderScale = 1.0) {
  detail::requireAxes(grid, 1, "odeResidual1");
  std::vector<std::complex<double>> values(grid.size());
  for (std::size_t n = 0; n < grid.size(); ++n) {
    const double x = grid.point(n)[grid.axes[0].var];
    const auto p = orderScale == 1.0 ? psi1Full(e1, x, q) : psi1Unnormalized(e1, x, q, orderScale);
    values[n] = -cv.a * p.d2 + (cv.b * std::exp(2 * x) + cv.c * std::exp(x) + cv.d - e1) * p.value;
  }
  auto r = detail::reportFromField("ode1", grid, values);
  r.notes = "Schroedinger form of the Liouville sector; reported, not asserted";
  r.metrics["a"] = cv.a;
  r.metrics["b"] = cv.b;
  r.metrics["c"] = cv.c;
  r.metrics["d"] = cv.d;
  r.metrics["orderScale"] = orderScale;
  return r;
}

inline constexpr double kOscillatorTolerance = 1e-6;

/// Residual of [(-d^2 + p^2)/2 - (n + 1/2)] psi2_n; throws AssertionFailure
/// when the sup norm exceeds 1e-6.
inline ResidualReport odeResidual2(int n, const Grid& grid) {
  detail::requireAxes(grid, 1, "odeResidual2");
  if (n < 0 || n > 40) throw DomainError("odeResidual2: n must be in [0, 40]");
  if (grid.axes[0].min < -8.0 || grid.axes[0].max > 8.0) throw DomainError("odeResidual2: grid must lie in [-8, 8]");
  std::vector<std::complex<double>> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double p = grid.point(k)[grid.axes[0].var];
    const auto v = psi2Full(n, p);
    values[k] = 0.5 * (-v.d2 + p * p * v.value) - (n + 0.5) * v.value;
  }
  auto r = detail::reportFromField("ode2", grid, values);
  r.metrics["n"] = n;
  r.notes = "oscillator sector, second derivative from the ladder relations";
  if (r.sup > kOscillatorTolerance) throw AssertionFailure("odeResidual2: sup residual above 1e-6");
  return r;
}

struct ConventionScanEntry {
  OdeConvention convention;
  double orderScale = 1.0;
  double relativeL2 = 0.0;
};

struct ConventionScan {
  std::vector<ConventionScanEntry> entries;
  ConventionScanEntry best;
};

/// Grid search over factor conventions (a, b, c, d) and Bessel order scale
/// m in {1, 2}; ranks by ||residual|| / ||psi||.
inline ConventionScan conventionScan(double e1, const Grid& grid, const QuadratureSpec& q = {}) {
  detail::requireAxes(grid, 1, "conventionScan");
  ConventionScan scan;
  for (double m : {1.0, 2.0}) {
    std::vector<Psi1Value> cache;
    for (std::size_t n = 0; n < grid.size(); ++n) cache.push_back(psi1Unnormalized(e1, grid.point(n)[grid.axes[0].var], q, m));
    double norm = 0.0;
    for (const auto& p : cache) norm += p.value * p.value;
    for (double a : {0.125, 0.25, 0.5, 1.0})
      for (double b : {0.5, 1.0})
        for (double c : {-0.5, -1.0})
          for (double d : {0.0, 0.125, 0.25}) {
            double sum = 0.0;
            for (std::size_t n = 0; n < grid.size(); ++n) {
              const double x = grid.point(n)[grid.axes[0].var];
              const auto& p = cache[n];
              const double r = -a * p.d2 + (b * std::exp(2 * x) + c * std::exp(x) + d - e1) * p.value;
              sum += r * r;
            }
            ConventionScanEntry e{{a, b, c, d}, m, std::sqrt(sum / norm)};
            if (scan.entries.empty() || e.relativeL2 < scan.best.relativeL2) scan.best = e;
            scan.entries.push_back(e);
          }
  }
  return scan;
}

}  // namespace ncq

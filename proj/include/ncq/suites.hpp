#pragma once

// Check suites shared by the command-line tool and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "ncq/json_io.hpp"
#include "ncq/operator.hpp"
#include "ncq/star_product.hpp"
#include "ncq/transform.hpp"

namespace ncq {

struct CheckResult {
  CheckResult() = default;
  explicit CheckResult(std::string n) : name(std::move(n)) {}

  std::string name;
  bool passed = true;
  /// Non-gating checks are reported but do not affect the suite verdict.
  bool gating = true;
  bool skipped = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  Json data = Json::object();

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const CheckResult& c) { return c.skipped || !c.gating || c.passed; });
  }
  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
  Json toJson() const {
    Json j;
    j["suite"] = suite;
    j["passed"] = passed();
    Json cs = Json::array();
    for (const auto& c : checks) {
      cs.push_back({{"name", c.name}, {"passed", c.passed}, {"gating", c.gating}, {"skipped", c.skipped},
                    {"detail", c.detail}});
    }
    j["checks"] = cs;
    j["data"] = data;
    return j;
  }
};

inline Json paramsJson(const ExactParams& p) {
  using T = coeff_traits<QComplex>;
  return {{"theta", T::realToString(p.theta)},
          {"thetabar", T::realToString(p.thetabar)},
          {"hbar", T::realToString(p.hbar)},
          {"omega1", T::realToString(p.omega1)},
          {"omega2", T::realToString(p.omega2)}};
}

/// Basic commutators, generator actions, Jacobi identity; associativity and
/// convention differences as diagnostics.
inline SuiteReport algebraSuite(const ExactParams& p, const StarOptions& opts = {}) {
  using C = QComplex;
  SuiteReport rep;
  rep.suite = "algebra";
  rep.data["params"] = paramsJson(p);
  rep.data["order"] = opts.order;
  rep.data["convention"] = conventionName(opts.convention);

  {
    CheckResult c{"commutatorTable"};
    Json entries = Json::array();
    for (int a = 0; a < 4; ++a) {
      for (int b = a + 1; b < 4; ++b) {
        const auto va = static_cast<Var>(a), vb = static_cast<Var>(b);
        auto got = starCommutator(coordinate<C>(p, va), coordinate<C>(p, vb), p, opts);
        const auto diff = (got.value - expectedCommutator<C>(va, vb, p)).canonical();
        const bool ok = diff.empty() && got.terminated;
        entries.push_back({{"pair", std::string(varName(va)) + "," + varName(vb)},
                           {"commutator", got.value.toString()},
                           {"ok", ok}});
        if (!ok) {
          c.passed = false;
          c.detail += std::string("[") + varName(va) + "," + varName(vb) + "] ";
        }
      }
    }
    if (c.passed) c.detail = "6 pairs, zero difference";
    rep.data["commutators"] = entries;
    rep.checks.push_back(c);
  }

  {
    CheckResult left{"leftActions"}, right{"rightActions"};
    int count = 0;
    for (const auto& m : phaseMonomials<C>(p, 3)) {
      for (Var g : kAllVars) {
        const auto gen = coordinate<C>(p, g);
        const auto l = starFull(gen, m, p, opts);
        const auto r = starFull(m, gen, p, opts);
        ++count;
        if (!(l.terminated && (l.value - generatorLeftAction(g, m, p)).canonical().empty())) {
          left.passed = false;
          left.detail += std::string(varName(g)) + "*(" + m.toString() + ") ";
        }
        if (!(r.terminated && (r.value - generatorRightAction(g, m, p)).canonical().empty())) {
          right.passed = false;
          right.detail += "(" + m.toString() + ")*" + varName(g) + " ";
        }
      }
    }
    if (left.passed) left.detail = std::to_string(count) + " products, exact";
    if (right.passed) right.detail = std::to_string(count) + " products, exact";
    rep.checks.push_back(left);
    rep.checks.push_back(right);
  }

  {
    CheckResult c{"jacobi"};
    Json entries = Json::array();
    for (int mu = 1; mu <= 2; ++mu)
      for (int nu = 1; nu <= 2; ++nu)
        for (int rho = 1; rho <= 2; ++rho) {
          const auto j = jacobiator<C>(mu, nu, rho, p, opts);
          const bool ok = j.terminated && j.nested.empty() && j.closedForm.empty();
          entries.push_back({{"triple", {mu, nu, rho}}, {"nested", j.nested.toString()},
                             {"closedForm", j.closedForm.toString()}, {"ok", ok}});
          if (!ok) c.passed = false;
        }
    c.detail = c.passed ? "8 triples vanish and match the closed form" : "nonzero jacobiator";
    rep.data["jacobi"] = entries;
    rep.checks.push_back(c);
  }

  {
    CheckResult c{"associativity"};
    c.gating = false;
    Json entries = Json::array();
    int failures = 0;
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k) {
          auto x = [&](int n) { return coordinate<C>(p, n == 1 ? Var::x1 : Var::x2); };
          const auto a = associativityResidual(x(i), x(j), x(k), p, opts);
          const bool ok = a.residual.empty();
          if (!ok) ++failures;
          Json e{{"triple", {i, j, k}}, {"residual", a.residual.toString()}, {"terminated", a.terminated}};
          if (a.lowestResidualOrder) e["lowestResidualOrder"] = *a.lowestResidualOrder;
          entries.push_back(e);
        }
    c.passed = failures == 0;
    c.detail = std::to_string(failures) + " of 8 coordinate triples non-associative";
    rep.data["associativity"] = entries;
    rep.checks.push_back(c);
  }

  {
    CheckResult c{"conventionDiscrepancy"};
    c.gating = false;
    const auto x1 = coordinate<C>(p, Var::x1), x2 = coordinate<C>(p, Var::x2);
    const auto d = conventionDiscrepancy(x1, x1 * x2, p, opts.order);
    c.passed = d.empty();
    c.detail = "nested - frozen on x1*(x1 x2): " + d.toString();
    rep.checks.push_back(c);
  }
  return rep;
}

/// Round trip and positivity of the coordinate change, bracket tables,
/// factorization of the oscillator and commutation of the two sectors.
inline SuiteReport transformSuite(const ExactParams& p, const StarOptions& opts = {}, unsigned seed = 20240611u,
                                  int samples = 10000) {
  using C = QComplex;
  using T = coeff_traits<C>;
  detail::requireInvertible(p);
  SuiteReport rep;
  rep.suite = "transform";
  rep.data["params"] = paramsJson(p);
  rep.data["seed"] = seed;
  rep.data["samples"] = samples;

  const double w1 = detail::toDouble(p.omega1), w2 = detail::toDouble(p.omega2);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> box(-5.0, 5.0);
  {
    CheckResult c{"roundTrip"};
    double worst = 0.0;
    for (int n = 0; n < samples;) {
      PhasePoint q{box(rng), box(rng), box(rng), box(rng)};
      if (!(1.0 + w1 * q.x1 + w2 * q.x2 > 0.0)) continue;
      ++n;
      const auto back = backward(forward(q, p), p);
      for (Var v : kAllVars) worst = std::max(worst, std::abs(back[v] - q[v]));
    }
    c.passed = worst < 1e-12;
    c.detail = "max |backward(forward(x)) - x| = " + formatDouble(worst);
    rep.data["roundTripMaxError"] = worst;
    rep.checks.push_back(c);
  }
  {
    CheckResult c{"imagePositivity"};
    double minE = std::numeric_limits<double>::infinity();
    for (int n = 0; n < samples; ++n) {
      const TildePoint t{box(rng), box(rng), box(rng), box(rng)};
      const auto x = backward(t, p);
      minE = std::min(minE, 1.0 + w1 * x.x1 + w2 * x.x2);
    }
    c.passed = minE > 0.0;
    c.detail = "min e(backward(t)) = " + formatDouble(minE);
    rep.data["imageMinStructure"] = minE;
    rep.checks.push_back(c);
  }

  const auto table = tildeCommutatorTable<C>(p);
  rep.data["table"] = toJson(table);
  const auto s = structureOf<C>(p);
  {
    CheckResult c{"table"};
    const Rational W = p.omega1 * p.omega1 + p.omega2 * p.omega2;
    if (p.omega1 == 0) {
      const bool ok = table.hbar1.empty() && table.hbar2 == 0 && table.thetabar == p.thetabar &&
                      table.gammaExact && *table.gammaExact == p.theta * p.omega2;
      c.passed = ok;
      c.detail = "omega1 = 0: {hbar1, hbar2, gamma, thetabar} = {0, 0, " + T::realToString(*table.gammaExact) +
                 ", " + T::realToString(table.thetabar) + "}";
    } else {
      const auto hb1 = PhaseFunction<C>::ePower(s, -2, T::fromReal(p.hbar * p.omega1));
      const bool ok = (table.hbar1 - hb1).isZero() && table.hbar2 == p.omega1 * p.hbar / (p.theta * W) &&
                      table.thetabar == p.thetabar &&
                      std::abs(table.gamma - detail::toDouble(p.theta) * std::sqrt(detail::toDouble(W))) < 1e-15;
      c.passed = ok;
      c.detail = "general table: hbar1 = hbar w1 / e, hbar2 = w1 hbar / (theta W), gamma = theta sqrt(W)";
    }
    rep.checks.push_back(c);
  }
  {
    const auto cross = crossCheckTable(table, p);
    CheckResult c{"directBrackets"};
    c.passed = cross.hbar1 && cross.hbar2 && cross.thetabar;
    c.detail = "hbar1, hbar2 and thetabar recomputed from the coordinate change";
    rep.checks.push_back(c);
    // The original product mixes x~ and p~ through the hbar block; the split
    // only holds for the block product checked under crossBrackets.
    const auto d = directTildeBrackets<C>(p);
    CheckResult m{"directCrossBrackets"};
    m.gating = false;
    m.passed = cross.crossTermsVanish;
    m.detail = "direct [xt1,pt2] = " + d.xt1pt2.toString() + ", [xt2,pt1] = " + d.xt2pt1.toString();
    rep.data["directCrossBrackets"] = {{"xt1pt2", toJson(d.xt1pt2)}, {"xt2pt1", toJson(d.xt2pt1)}};
    rep.checks.push_back(m);
    CheckResult g{"directGamma"};
    g.gating = false;
    g.passed = cross.gamma;
    g.detail = "direct [xt1,xt2]/i = " + formatDouble(cross.directGamma.real()) + ", table gamma = " +
               formatDouble(table.gamma);
    rep.data["directGamma"] = cross.directGamma.real();
    rep.checks.push_back(g);
  }

  if (p.omega1 != 0) {
    for (const char* name : {"factorization", "sectorCommute"}) {
      CheckResult c{name};
      c.skipped = true;
      c.detail = "requires omega1 = 0; skipped";
      rep.checks.push_back(c);
    }
    return rep;
  }
  {
    const auto f = transformHamiltonian<C>(p);
    CheckResult c{"factorization"};
    c.passed = f.pullbackResidual.empty() && f.h1 == f.h1ClosedForm && f.h2 == f.h2ClosedForm;
    c.detail = "H1 = " + f.h1.toString() + "; H2 = " + f.h2.toString();
    rep.data["h1"] = toJson(f.h1);
    rep.data["h2"] = toJson(f.h2);
    rep.data["pullbackResidual"] = f.pullbackResidual.toString();
    rep.checks.push_back(c);
  }
  {
    const auto sc = sectorCommutatorCheck<C>(p, opts.order);
    CheckResult c{"sectorCommute"};
    c.passed = sc.h1h2.empty() && sc.terminated;
    c.detail = "[H1,H2] = " + sc.h1h2.toString();
    rep.checks.push_back(c);
    CheckResult x{"crossBrackets"};
    x.passed = sc.allZero();
    x.detail = "[xt_a, pt_b] and [H1,H1] vanish under the block product";
    rep.checks.push_back(x);
  }
  return rep;
}

/// Expansion of H * (.) into Hr and Him, its self-consistency against the
/// star product, the H1 *_1 operator and comparisons with the published forms.
inline SuiteReport hamiltonianSuite(const ExactParams& p, const StarOptions& opts = {}, bool compare = true) {
  using C = QComplex;
  SuiteReport rep;
  rep.suite = "hamiltonian";
  rep.data["params"] = paramsJson(p);
  const auto H = oscillatorHamiltonian<C>(p);
  const auto ex = expandLeftStar(H, p, opts);
  rep.data["hr"] = toJson(ex.hr);
  rep.data["him"] = toJson(ex.him);
  rep.data["terminated"] = ex.terminated;
  rep.data["imaginaryScale"] = "H*psi = Hr(psi) + (i/2) Him(psi)";
  {
    CheckResult c{"truncation"};
    c.gating = false;
    c.passed = ex.terminated;
    c.detail = ex.terminated ? "theta series terminated" : "TruncationWarning: theta series cut at order " +
                                                              std::to_string(opts.order);
    rep.checks.push_back(c);
  }
  {
    CheckResult c{"starOracle"};
    int n = 0;
    for (const auto& psi : phaseMonomials<C>(p, 2)) {
      ++n;
      const auto r = leftStarOracleResidual(ex, H, psi, p, opts);
      if (!r.empty()) {
        c.passed = false;
        c.detail += "(" + psi.toString() + ") ";
      }
    }
    if (c.passed) c.detail = std::to_string(n) + " monomials of degree <= 2 reproduced exactly";
    rep.checks.push_back(c);
  }
  {
    CheckResult c{"realCoefficients"};
    c.passed = ex.hr.hasRealCoefficients() && ex.him.hasRealCoefficients();
    c.detail = c.passed ? "Hr and Him have real coefficients" : "complex coefficient in Hr or Him";
    rep.checks.push_back(c);
  }
  if (compare) {
    Json diff;
    diff["hr"] = toJson(ex.hrVersusPrinted);
    diff["him"] = toJson(ex.himVersusPrinted);
    CheckResult c{"printedComparison"};
    c.gating = false;
    c.passed = ex.hrVersusPrinted.empty() && ex.himVersusPrinted.empty();
    c.detail = std::to_string(ex.hrVersusPrinted.size()) + " Hr and " + std::to_string(ex.himVersusPrinted.size()) +
               " Him terms differ from the published forms";
    rep.checks.push_back(c);
    rep.data["comparison"] = diff;
  }
  if (p.omega1 == 0 && p.theta > 0 && p.omega2 != 0) {
    const auto h1 = h1StarOperator<C>(p);
    rep.data["h1Star"] = toJson(h1);
  }
  if (compare) {
    // The published H1 *_1 is written for gamma = 1, omega2 = 2.
    {
      const auto mism = compareOperators(h1StarOperator<C>(presetFromGamma(Rational(1), Rational(2))),
                                         printedH1Star<C>());
      CheckResult c{"h1StarComparison"};
      c.gating = false;
      c.passed = mism.empty();
      c.detail = std::to_string(mism.size()) + " terms differ from the published H1 *_1 (gamma = 1, omega2 = 2)";
      rep.data["comparison"]["h1Star"] = toJson(mism);
      rep.checks.push_back(c);
    }
  }
  return rep;
}

}  // namespace ncq

// Acceptance runner: one PASS/FAIL line per criterion 1..14.
//
// usage: ncq_acceptance <path-to-ncq-cli>
// Exit status is 0 only when every criterion passes.

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "ncq/json_io.hpp"
#include "ncq/operator.hpp"
#include "ncq/specfun.hpp"
#include "ncq/spectrum.hpp"
#include "ncq/suites.hpp"
#include "oracle_values.hpp"

namespace fs = std::filesystem;
using namespace ncq;

namespace {

// Tolerances, fixed here and nowhere else.
constexpr double kRoundTripTol = 1e-12;
constexpr double kShiftRelTol = 1e-12;
constexpr double kBesselHalfTol = 1e-10;
constexpr double kBesselRecurrenceTol = 1e-9;
constexpr double kOscillatorSupTol = 1e-6;
constexpr double kGramTol = 1e-8;
constexpr double kPsi1ImagTol = 1e-12;
constexpr double kLinearityTol = 1e-8;
constexpr double kOracleTol = 1e-8;
constexpr int kSamples = 10000;

using C = QComplex;

struct Verdict {
  bool pass = true;
  std::string detail;
};

const ExactParams kDefault{};
const ExactParams kTilted{Rational(3, 2), Rational(1, 3), Rational(2), Rational(1, 2), Rational(-1, 4)};
const ExactParams kPreset = presetFromGamma(Rational(1), Rational(2));

std::string gatingFailures(const SuiteReport& r, std::initializer_list<const char*> names) {
  std::string out;
  for (const char* n : names) {
    const auto* c = r.find(n);
    if (!c || c->skipped || !c->passed) out += std::string(out.empty() ? "" : "; ") + r.suite + "." + n;
  }
  return out;
}

Verdict fromSuites(const std::vector<SuiteReport>& reps, std::initializer_list<const char*> names,
                   const std::string& okText) {
  Verdict v;
  std::string bad;
  for (const auto& r : reps) {
    const auto f = gatingFailures(r, names);
    if (!f.empty()) bad += (bad.empty() ? "" : "; ") + f;
  }
  v.pass = bad.empty();
  v.detail = v.pass ? okText : "failing: " + bad;
  return v;
}

Verdict commutators() {
  return fromSuites({algebraSuite(kDefault), algebraSuite(kTilted)}, {"commutatorTable"},
                    "6 commutators, zero difference at default and tilted parameters");
}

Verdict leftActions() {
  return fromSuites({algebraSuite(kDefault), algebraSuite(kTilted)}, {"leftActions", "rightActions"},
                    "8 generator rules on all monomials of degree <= 3, exact");
}

Verdict jacobi() {
  return fromSuites({algebraSuite(kDefault), algebraSuite(kTilted)}, {"jacobi"},
                    "8 coordinate triples: nested jacobiator and closed form both zero");
}

Verdict associativity() {
  Verdict v;
  int failing = 0;
  std::string example;
  for (const auto& p : {kDefault, kTilted}) {
    for (int i = 1; i <= 2; ++i)
      for (int j = 1; j <= 2; ++j)
        for (int k = 1; k <= 2; ++k) {
          auto x = [&](int n) { return coordinate<C>(p, n == 1 ? Var::x1 : Var::x2); };
          const auto a = associativityResidual(x(i), x(j), x(k), p);
          if (!a.terminated || !a.residual.isZero()) {
            ++failing;
            if (example.empty()) {
              example = "(" + std::to_string(i) + std::to_string(j) + std::to_string(k) + ") residual " +
                        a.residual.toString();
            }
          }
        }
  }
  v.pass = failing == 0;
  v.detail = v.pass ? "16 triples associative"
                    : std::to_string(failing) + " of 16 triples non-associative, e.g. " + example;
  return v;
}

Verdict transformation() {
  const std::vector<SuiteReport> reps{transformSuite(kDefault, {}, 20240611u, kSamples),
                                      transformSuite(kTilted, {}, 7u, kSamples)};
  Verdict v = fromSuites(reps, {"roundTrip", "imagePositivity"}, "");
  double worst = 0.0, minE = std::numeric_limits<double>::infinity();
  for (const auto& r : reps) {
    worst = std::max(worst, r.data["roundTripMaxError"].get<double>());
    minE = std::min(minE, r.data["imageMinStructure"].get<double>());
  }
  v.pass = v.pass && worst < kRoundTripTol && minE > 0.0;
  if (v.detail.empty()) {
    v.detail = "round trip max error " + formatDouble(worst) + ", min e over image " + formatDouble(minE) +
               ", 1e4 points per parameter set";
  }
  return v;
}

Verdict tables() {
  return fromSuites({transformSuite(kDefault, {}, 1u, 10), transformSuite(kTilted, {}, 1u, 10)},
                    {"table", "directBrackets"},
                    "omega1 = 0 table {0, 0, i gamma, i thetabar} exact; general table symbolic");
}

Verdict factorization() {
  Verdict v = fromSuites({transformSuite(kPreset, {}, 1u, 10)}, {"factorization", "sectorCommute"},
                         "pullback residual 0, H1 = (1/2)[(xt2)^2 + e^{2xt1} - e^{xt1} + 1/4], [H1,H2] = 0");
  const auto f = transformHamiltonian<C>(kPreset);
  using TF = ExactTilde;
  const TF h1 = (TF::monomial({0, 2, 0, 0, 0}, 1) + TF::exponential(2) - TF::exponential(1) +
                 TF::constant(QComplex(Rational(1, 4)))) *
                QComplex(Rational(1, 2));
  if (!(f.h1 == h1)) {
    v.pass = false;
    v.detail = "H1 = " + f.h1.toString();
  }
  return v;
}

Verdict operatorOracle() {
  const auto rep = hamiltonianSuite(kDefault, {}, true);
  Verdict v = fromSuites({rep, hamiltonianSuite(kTilted, {}, true)}, {"starOracle", "realCoefficients"}, "");
  const bool report = rep.data.contains("comparison") && rep.data["comparison"].contains("hr") &&
                      rep.data["comparison"].contains("him");
  if (!report) v.pass = false;
  if (v.pass) {
    v.detail = "Hr + (i/2) Him reproduces H * psi on 15 monomials; comparison report: " +
               std::to_string(rep.data["comparison"]["hr"].size()) + " Hr, " +
               std::to_string(rep.data["comparison"]["him"].size()) + " Him mismatches documented";
  }
  return v;
}

Verdict shiftIdentities() {
  Verdict v;
  using TF = ExactTilde;
  using Op = TildeOperator<C>;
  const TF x = TF::variable(TVar::xt1);
  const bool quadratic = Op::trig(0, TrigKind::Cos, QComplex(1), TF::constant(1)).apply(x * x) == x * x - TF::constant(1);
  // cos/sin(d_x) e^{kx}: with u = x/2 this is cos/sin((1/2) d_u) e^{2k u},
  // which keeps the exponent integral for k = 1/2.
  using Z = std::complex<double>;
  double worst = 0.0;
  for (int twiceK : {1, 2, 4}) {
    const double k = twiceK / 2.0;
    const auto psi = FloatTilde::exponential(twiceK);
    for (double x0 : {-1.0, 0.0, 0.7}) {
      const ComplexPoint u{x0 / 2.0, 0.0, 0.0, 0.0};
      const Z base = std::exp(k * x0);
      for (TrigKind kind : {TrigKind::Cos, TrigKind::Sin}) {
        const auto op = TildeOperator<Z>::trig(0, kind, Z(0.5), FloatTilde::constant(1.0));
        const Z want = (kind == TrigKind::Cos ? std::cos(k) : std::sin(k)) * base;
        worst = std::max(worst, std::abs(op.apply(psi).evaluate(u) - want) / std::abs(want));
      }
    }
  }
  v.pass = quadratic && worst < kShiftRelTol;
  v.detail = std::string("cos d x^2 = x^2 - 1 ") + (quadratic ? "exact" : "WRONG") +
             "; max relative error on e^{kx}, k in {1/2, 1, 2}: " + formatDouble(worst);
  return v;
}

Verdict bessel() {
  Verdict v;
  double half = 0.0;
  for (double z : {0.1, 1.0, 10.0}) {
    half = std::max(half, std::abs(besselK(0.5, z) - std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z)));
  }
  double rec = 0.0;
  int count = 0;
  for (double re : {-4.0, -2.5, -1.0, 0.0, 0.5, 1.5, 3.0, 4.5}) {
    for (double im : {-2.0, 0.0, 1.0, 3.0}) {
      const std::complex<double> nu(re, im);
      if (std::abs(nu) > 5.0) continue;
      for (double z : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
        const auto k = besselK(nu, z);
        const auto r = besselK(nu + 1.0, z) - besselK(nu - 1.0, z) - 2.0 * nu / z * k;
        rec = std::max(rec, std::abs(r) / std::max(1.0, std::abs(k)));
        ++count;
      }
    }
  }
  v.pass = half < kBesselHalfTol && rec < kBesselRecurrenceTol;
  v.detail = "half order max error " + formatDouble(half) + "; recurrence max " + formatDouble(rec) + " over " +
             std::to_string(count) + " (nu, z) points";
  return v;
}

Verdict oscillator() {
  Verdict v;
  const auto g = makeGrid1("pt1", 2, -6, 6, 121);
  double worst = 0.0;
  bool energies = true;
  try {
    for (int n = 0; n <= 10; ++n) {
      worst = std::max(worst, odeResidual2(n, g).sup);
      energies = energies && exactTotalEnergy(Rational(3, 7), n) == Rational(3, 7) + Rational(2 * n + 1, 2) &&
                 assemble(1.0, n).e == 1.0 + n + 0.5;
    }
  } catch (const Error& e) {
    v.pass = false;
    v.detail = e.what();
    return v;
  }
  v.pass = worst < kOscillatorSupTol && energies;
  v.detail = "sup residual " + formatDouble(worst) + " for n <= 10 on [-6, 6]; E2 = n + 1/2 " +
             (energies ? "exact" : "WRONG");
  return v;
}

Verdict gram() {
  Verdict v;
  const double inf = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int m = 0; m <= 10; ++m) {
    for (int n = 0; n <= 10; ++n) {
      const double g = integrate([&](double p) { return psi2(m, p) * psi2(n, p); }, -inf, inf);
      worst = std::max(worst, std::abs(g - (m == n ? 1.0 : 0.0)));
    }
  }
  v.pass = worst < kGramTol;
  v.detail = "max |G - I| = " + formatDouble(worst) + " for n <= 10";
  return v;
}

Verdict liouville() {
  Verdict v;
  std::vector<std::string> problems;
  double imag = 0.0;
  for (double e1 : {0.5, 1.0, 3.0}) {
    for (double x = -4.0; x <= 3.0; x += 0.25) imag = std::max(imag, psi1Full(e1, x).imagResidue);
  }
  if (!(imag < kPsi1ImagTol)) problems.push_back("imaginary residue " + formatDouble(imag));
  const double a = std::abs(psi1(1.0, 2.5)), b = std::abs(psi1(1.0, 3.0)), c = std::abs(psi1(1.0, 3.5));
  if (!(c < b && b < a && c < 1e-12)) problems.push_back("no decay at +infinity");

  const auto grid = liouvilleGrid();
  const auto im = residualIm(1.0, grid);
  const double shift = im.metrics.at("shiftTermsMax"), lin = im.metrics.at("columnLinearityDefect");
  if (shift != 0.0) problems.push_back("shift terms " + formatDouble(shift));
  if (!(lin < kLinearityTol)) problems.push_back("row linearity defect " + formatDouble(lin));

  const auto re = residualReal(1.0, grid);
  const auto ode = odeResidual1(1.0, makeGrid1("xt1", 0, -4, 2, 61));
  const std::vector<std::tuple<const char*, double, double>> pinned{
      {"im.l2", im.l2, oracle::kResidualImL2},
      {"im.sup", im.sup, oracle::kResidualImSup},
      {"real.l2", re.real.l2, oracle::kResidualRealL2},
      {"real.sup", re.real.sup, oracle::kResidualRealSup},
      {"realnew.l2", re.realnew.l2, oracle::kResidualRealnewL2},
      {"realnew.sup", re.realnew.sup, oracle::kResidualRealnewSup},
      {"ode1.l2", ode.l2, oracle::kOde1L2},
      {"ode1.sup", ode.sup, oracle::kOde1Sup}};
  double worstOracle = 0.0;
  for (const auto& [name, got, want] : pinned) {
    const double d = std::abs(got - want);
    worstOracle = std::max(worstOracle, d);
    if (!(d < kOracleTol)) problems.push_back(std::string(name) + " off by " + formatDouble(d));
  }
  const auto again = residualReal(1.0, grid);
  if (canonicalDump(toJson(again.real)) != canonicalDump(toJson(re.real)) ||
      canonicalDump(toJson(odeResidual1(1.0, makeGrid1("xt1", 0, -4, 2, 61)))) != canonicalDump(toJson(ode))) {
    problems.push_back("reports not deterministic");
  }
  v.pass = problems.empty();
  if (v.pass) {
    v.detail = "psi1 imaginary residue " + formatDouble(imag) + ", shift terms 0, linearity defect " +
               formatDouble(lin) + ", max oracle deviation " + formatDouble(worstOracle);
  } else {
    for (const auto& p : problems) v.detail += (v.detail.empty() ? "" : "; ") + p;
  }
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const std::string& cli) {
  Verdict v;
  if (cli.empty()) {
    v.pass = false;
    v.detail = "no CLI path given";
    return v;
  }
  const auto root = fs::temp_directory_path() / "ncq_acceptance_determinism";
  fs::remove_all(root);
  const std::vector<std::string> subs{"algebra-verify", "transform-verify", "hamiltonian-expand --compare",
                                      "spectrum --e1 1 --n 3", "residuals"};
  for (const char* run : {"a", "b"}) {
    for (const auto& sub : subs) {
      const std::string cmd =
          cli + " --out " + (root / run).string() + " " + sub + " > " + (root / "log.txt").string() + " 2>&1";
      fs::create_directories(root);
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) == 2) {
        v.pass = false;
        v.detail = "command failed: " + sub;
        return v;
      }
    }
  }
  int files = 0;
  for (const auto& e : fs::directory_iterator(root / "a")) {
    if (e.path().extension() != ".json") continue;
    ++files;
    if (slurp(e.path()) != slurp(root / "b" / e.path().filename())) {
      v.pass = false;
      v.detail = "differs: " + e.path().filename().string();
      return v;
    }
  }
  v.pass = files == static_cast<int>(subs.size());
  v.detail = std::to_string(files) + " JSON reports byte-identical across two runs";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"commutator table", commutators},
      {"left-action closed forms", leftActions},
      {"jacobiator", jacobi},
      {"associativity on coordinate triples", associativity},
      {"transformation round trip and positivity", transformation},
      {"transformed commutator tables", tables},
      {"factorization and [H1,H2] = 0", factorization},
      {"operator oracle and comparison report", operatorOracle},
      {"shift identities", shiftIdentities},
      {"Bessel K checks", bessel},
      {"oscillator sector", oscillator},
      {"psi2 orthonormality", gram},
      {"Liouville sector properties and pinned residuals", liouville},
      {"CLI determinism", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " [" << (k + 1) << "] " << criteria[k].first << ": " << v.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}

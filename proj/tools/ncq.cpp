// ncq: verification suites, spectra and residual reports.
//
// Exit codes: 0 success, 1 check failure, 2 usage or configuration error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "ncq/config.hpp"
#include "ncq/json_io.hpp"
#include "ncq/spectrum.hpp"
#include "ncq/suites.hpp"

namespace fs = std::filesystem;
using namespace ncq;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool wantJson(const RunConfig& c) { return c.format != OutputFormat::Csv; }
bool wantCsv(const RunConfig& c) { return c.format != OutputFormat::Json; }

void writeFile(const RunConfig& cfg, const std::string& name, const std::string& content) {
  std::ofstream out(fs::path(cfg.outputDir) / name, std::ios::binary);
  if (!out) throw UsageError("cannot write " + (fs::path(cfg.outputDir) / name).string());
  out << content;
}

void printSuite(const SuiteReport& rep) {
  for (const auto& c : rep.checks) {
    const char* status = c.skipped ? "SKIP" : (c.passed ? "ok  " : (c.gating ? "FAIL" : "note"));
    std::cout << "  [" << status << "] " << rep.suite << "." << c.name << ": " << c.detail << "\n";
  }
  std::cout << rep.suite << ": " << (rep.passed() ? "passed" : "FAILED") << "\n";
}

std::string checksCsv(const SuiteReport& rep) {
  std::string s = "check,passed,gating,skipped\n";
  for (const auto& c : rep.checks) {
    s += c.name + "," + (c.passed ? "1" : "0") + "," + (c.gating ? "1" : "0") + "," + (c.skipped ? "1" : "0") + "\n";
  }
  return s;
}

int emitSuite(const RunConfig& cfg, const SuiteReport& rep) {
  printSuite(rep);
  if (wantJson(cfg)) writeFile(cfg, rep.suite + ".json", canonicalDump(rep.toJson()));
  if (wantCsv(cfg)) writeFile(cfg, rep.suite + "_checks.csv", checksCsv(rep));
  return rep.passed() ? kOk : kCheckFailed;
}

std::string csvOf(const ResidualReport& r) {
  std::ostringstream os;
  writeCsv(os, r);
  return os.str();
}

int cmdSpectrum(const RunConfig& cfg, double e1, int n) {
  const auto sol = assemble(e1, n);
  requirePsi2Level(n);
  Json j;
  j["E1"] = sol.e1;
  j["n"] = sol.n;
  j["E2"] = n + 0.5;
  j["E"] = sol.e;
  std::string c1 = "xt1,psi1\n", c2 = "pt1,psi2\n";
  Json p1 = Json::array(), p2 = Json::array();
  const auto& g1 = cfg.grids.at("ode1");
  for (std::size_t k = 0; k < g1.size(); ++k) {
    const double x = g1.point(k)[g1.axes[0].var];
    const double v = psi1(e1, x, cfg.quad);
    p1.push_back({x, v});
    c1 += formatDouble(x) + "," + formatDouble(v) + "\n";
  }
  const auto& g2 = cfg.grids.at("ode2");
  for (std::size_t k = 0; k < g2.size(); ++k) {
    const double p = g2.point(k)[g2.axes[0].var];
    const double v = psi2(n, p);
    p2.push_back({p, v});
    c2 += formatDouble(p) + "," + formatDouble(v) + "\n";
  }
  j["psi1"] = p1;
  j["psi2"] = p2;
  j["psi2Normalization"] = "pi^{-1/4} (2^n n!)^{-1/2} (unit L2 norm)";
  std::cout << "E1 = " << formatDouble(e1) << ", E2 = " << formatDouble(n + 0.5) << ", E = " << formatDouble(sol.e)
            << "\n";
  if (wantJson(cfg)) writeFile(cfg, "spectrum.json", canonicalDump(j));
  if (wantCsv(cfg)) {
    writeFile(cfg, "spectrum_psi1.csv", c1);
    writeFile(cfg, "spectrum_psi2.csv", c2);
  }
  return kOk;
}

int cmdResiduals(const RunConfig& cfg, const std::set<std::string>& which, double e1, int nmax) {
  Json j;
  j["E1"] = e1;
  int status = kOk;
  auto emit = [&](const ResidualReport& r, const std::string& key) {
    j[key] = toJson(r);
    std::cout << "  " << key << ": l2 = " << formatDouble(r.l2) << ", sup = " << formatDouble(r.sup) << "\n";
    if (wantCsv(cfg)) writeFile(cfg, "residual_" + key + ".csv", csvOf(r));
  };
  if (which.count("im")) emit(residualIm(e1, cfg.grids.at("liouville"), cfg.quad), "im");
  if (which.count("real")) {
    const auto r = residualReal(e1, cfg.grids.at("liouville"), cfg.quad);
    emit(r.real, "real");
    emit(r.realnew, "realnew");
  }
  if (which.count("ode1")) {
    const auto& g = cfg.grids.at("ode1");
    emit(odeResidual1(e1, g, {}, cfg.quad), "ode1");
    const auto scan = conventionScan(e1, g, cfg.quad);
    const auto& b = scan.best;
    j["ode1ConventionScan"] = {{"a", b.convention.a},     {"b", b.convention.b},
                               {"c", b.convention.c},     {"d", b.convention.d},
                               {"orderScale", b.orderScale}, {"relativeL2", b.relativeL2},
                               {"candidates", scan.entries.size()}};
    std::cout << "  ode1 best convention: a=" << formatDouble(b.convention.a) << " b=" << formatDouble(b.convention.b)
              << " c=" << formatDouble(b.convention.c) << " d=" << formatDouble(b.convention.d)
              << " m=" << formatDouble(b.orderScale) << " rel=" << formatDouble(b.relativeL2) << "\n";
  }
  if (which.count("ode2")) {
    Json levels = Json::array();
    for (int n = 0; n <= nmax; ++n) {
      try {
        const auto r = odeResidual2(n, cfg.grids.at("ode2"));
        levels.push_back(toJson(r));
        if (wantCsv(cfg)) writeFile(cfg, "residual_ode2_n" + std::to_string(n) + ".csv", csvOf(r));
      } catch (const AssertionFailure& e) {
        std::cout << "  ode2 n=" << n << ": FAILED (" << e.what() << ")\n";
        levels.push_back({{"n", n}, {"error", e.what()}});
        status = kCheckFailed;
      }
    }
    j["ode2"] = levels;
    std::cout << "  ode2: n = 0.." << nmax << (status == kOk ? " within 1e-6" : " failed") << "\n";
  }
  if (wantJson(cfg)) writeFile(cfg, "residuals.json", canonicalDump(j));
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Twisted phase-space star products: verification suites and spectra"};
  app.require_subcommand(1);
  std::string paramList, configPath, outDir, format, convention;
  int order = -1;
  std::optional<double> tol;
  app.add_option("--config", configPath, "flat key = value configuration file");
  app.add_option("--params", paramList, "deformation parameters, e.g. theta=1,omega2=1/2");
  app.add_option("--order", order, "theta-sector truncation order (1..16)");
  app.add_option("--tol", tol, "relative quadrature tolerance");
  app.add_option("--out", outDir, "output directory");
  app.add_option("--format", format, "json, csv or both");
  app.add_option("--convention", convention, "frozen or nested");

  auto* algebra = app.add_subcommand("algebra-verify", "commutators, generator actions, Jacobi identity");
  auto* transform = app.add_subcommand("transform-verify", "coordinate change, tables, factorization");
  auto* hamiltonian = app.add_subcommand("hamiltonian-expand", "Hr, Him and H1 *_1 operators");
  bool compare = false;
  hamiltonian->add_flag("--compare", compare, "include the comparison with the published operators");
  auto* spectrum = app.add_subcommand("spectrum", "tabulate psi1, psi2 and E");
  double e1 = 1.0;
  int n = 0;
  spectrum->add_option("--e1", e1, "Liouville-sector energy E1 > 0")->required();
  spectrum->add_option("--n", n, "oscillator level")->required();
  auto* residuals = app.add_subcommand("residuals", "residual reports of the eigen-equations");
  std::string which = "im,real,ode1,ode2";
  double re1 = 1.0;
  int nmax = 10;
  residuals->add_option("--which", which, "comma list of im, real, ode1, ode2");
  residuals->add_option("--e1", re1, "Liouville-sector energy E1 > 0");
  residuals->add_option("--n-max", nmax, "highest oscillator level for ode2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  RunConfig cfg;
  try {
    if (!configPath.empty()) applyConfigFile(cfg, configPath);
    if (!paramList.empty()) applyParamList(cfg.params, paramList);
    if (order >= 0) cfg.truncationOrder = order;
    if (tol) {
      if (!(*tol > 0.0)) throw ParameterError("--tol must be positive");
      cfg.quad.relTol = *tol;
    }
    if (!outDir.empty()) cfg.outputDir = outDir;
    if (!format.empty()) applySetting(cfg, "format", format);
    if (!convention.empty()) applySetting(cfg, "convention", convention);
    cfg.validate();
    std::error_code ec;
    fs::create_directories(cfg.outputDir, ec);
    if (ec || !fs::is_directory(cfg.outputDir)) throw UsageError("output directory not writable: " + cfg.outputDir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (algebra->parsed()) return emitSuite(cfg, algebraSuite(cfg.params, cfg.starOptions()));
    if (transform->parsed()) return emitSuite(cfg, transformSuite(cfg.params, cfg.starOptions()));
    if (hamiltonian->parsed()) return emitSuite(cfg, hamiltonianSuite(cfg.params, cfg.starOptions(), compare));
    if (spectrum->parsed()) return cmdSpectrum(cfg, e1, n);
    if (residuals->parsed()) {
      std::set<std::string> sel;
      for (const auto& w : detail::split(which, ',')) {
        if (w != "im" && w != "real" && w != "ode1" && w != "ode2") throw UsageError("unknown residual '" + w + "'");
        sel.insert(w);
      }
      if (nmax < 0 || nmax > 40) throw UsageError("--n-max must be in [0, 40]");
      return cmdResiduals(cfg, sel, re1, nmax);
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const GridError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kCheckFailed;
  }
  return kUsage;
}

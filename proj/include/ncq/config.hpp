#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ncq/errors.hpp"
#include "ncq/grid.hpp"
#include "ncq/params.hpp"
#include "ncq/scalar.hpp"
#include "ncq/specfun.hpp"
#include "ncq/star_product.hpp"

namespace ncq {

enum class OutputFormat { Json, Csv, Both };

struct RunConfig {
  ExactParams params;
  int truncationOrder = 8;
  ThetaConvention convention = ThetaConvention::Frozen;
  QuadratureSpec quad;
  std::map<std::string, Grid> grids;
  std::string outputDir = "ncq-out";
  OutputFormat format = OutputFormat::Json;

  RunConfig() {
    grids["liouville"] = Grid{{Axis{"xt1", 0, -3, 3, 61}, Axis{"xt2", 1, -2, 2, 41}}, {}};
    grids["ode1"] = makeGrid1("xt1", 0, -4, 2, 61);
    grids["ode2"] = makeGrid1("pt1", 2, -6, 6, 121);
  }

  StarOptions starOptions() const {
    StarOptions o;
    o.order = truncationOrder;
    o.convention = convention;
    return o;
  }

  void validate() const {
    if (truncationOrder < 1 || truncationOrder > 16) throw ParameterError("order must be in [1, 16]");
    quad.validate();
    for (const auto& [name, g] : grids) g.validate();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline double parseDouble(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw ParameterError("");
    return v;
  } catch (const std::exception&) {
    throw ParameterError("invalid number for '" + key + "': '" + s + "'");
  }
}

inline int parseInt(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw ParameterError("");
    return v;
  } catch (const std::exception&) {
    throw ParameterError("invalid integer for '" + key + "': '" + s + "'");
  }
}

/// "min:max:count"
inline Axis parseAxis(const std::string& name, int var, const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ParameterError("axis '" + name + "' must be min:max:count");
  return Axis{name, var, parseDouble(parts[0], name), parseDouble(parts[1], name), parseInt(parts[2], name)};
}

}  // namespace detail

/// Applies one deformation parameter; values are exact decimals or fractions.
inline void setParam(ExactParams& p, const std::string& key, const std::string& value) {
  Rational v;
  try {
    v = parseRational(value);
  } catch (const std::exception&) {
    throw ParameterError("invalid value for '" + key + "': '" + value + "'");
  }
  if (key == "theta") {
    p.theta = v;
  } else if (key == "thetabar") {
    p.thetabar = v;
  } else if (key == "hbar") {
    p.hbar = v;
  } else if (key == "omega1") {
    p.omega1 = v;
  } else if (key == "omega2") {
    p.omega2 = v;
  } else {
    throw ParameterError("unknown parameter '" + key + "'");
  }
}

/// "theta=1,omega2=1/2,..."
inline void applyParamList(ExactParams& p, const std::string& list) {
  for (const auto& item : detail::split(list, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParameterError("expected key=value in '" + item + "'");
    setParam(p, detail::trim(item.substr(0, eq)), detail::trim(item.substr(eq + 1)));
  }
}

/// Applies one configuration entry.
inline void applySetting(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "theta" || key == "thetabar" || key == "hbar" || key == "omega1" || key == "omega2") {
    setParam(cfg.params, key, value);
  } else if (key == "params") {
    applyParamList(cfg.params, value);
  } else if (key == "order") {
    cfg.truncationOrder = detail::parseInt(value, key);
  } else if (key == "convention") {
    if (value == "frozen") {
      cfg.convention = ThetaConvention::Frozen;
    } else if (value == "nested") {
      cfg.convention = ThetaConvention::Nested;
    } else {
      throw ParameterError("convention must be frozen or nested");
    }
  } else if (key == "tol") {
    const double t = detail::parseDouble(value, key);
    if (!(t > 0.0)) throw ParameterError("tol must be positive");
    cfg.quad.relTol = t;
  } else if (key == "abs_tol") {
    cfg.quad.absTol = detail::parseDouble(value, key);
  } else if (key == "max_levels") {
    cfg.quad.maxLevels = detail::parseInt(value, key);
  } else if (key == "out") {
    cfg.outputDir = value;
  } else if (key == "format") {
    if (value == "json") {
      cfg.format = OutputFormat::Json;
    } else if (value == "csv") {
      cfg.format = OutputFormat::Csv;
    } else if (value == "both") {
      cfg.format = OutputFormat::Both;
    } else {
      throw ParameterError("format must be json, csv or both");
    }
  } else if (key == "grid.liouville.xt1") {
    cfg.grids["liouville"].axes.at(0) = detail::parseAxis("xt1", 0, value);
  } else if (key == "grid.liouville.xt2") {
    cfg.grids["liouville"].axes.at(1) = detail::parseAxis("xt2", 1, value);
  } else if (key == "grid.ode1") {
    cfg.grids["ode1"] = Grid{{detail::parseAxis("xt1", 0, value)}, {}};
  } else if (key == "grid.ode2") {
    cfg.grids["ode2"] = Grid{{detail::parseAxis("pt1", 2, value)}, {}};
  } else {
    throw ParameterError("unknown configuration key '" + key + "'");
  }
}

/// Flat "key = value" text; '#' starts a comment.
inline void applyConfigText(RunConfig& cfg, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineNo) + ": expected key = value");
    }
    applySetting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
  }
}

inline void applyConfigFile(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  applyConfigText(cfg, ss.str());
}

}  // namespace ncq

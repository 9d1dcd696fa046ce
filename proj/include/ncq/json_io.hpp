#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncq/diff_operator.hpp"
#include "ncq/operator.hpp"
#include "ncq/phase_function.hpp"
#include "ncq/spectrum.hpp"
#include "ncq/tilde_function.hpp"
#include "ncq/transform.hpp"

namespace ncq {

using Json = nlohmann::json;

/// 17 significant digits, '.' decimal regardless of locale.
inline std::string formatDouble(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  (void)ec;
  return std::string(buf, end);
}

namespace detail {

inline void dumpCanonical(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  const std::string padIn(static_cast<std::size_t>(indent + 1) * 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // nlohmann::json objects are std::map-backed: keys iterate sorted.
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += padIn + Json(it.key()).dump() + ": ";
        dumpCanonical(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ",\n";
        out += padIn;
        dumpCanonical(j[k], out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += formatDouble(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

template <Coefficient C>
void putCoefficient(Json& t, const C& c) {
  using T = coeff_traits<C>;
  const auto z = T::toComplex(c);
  t["re"] = z.real();
  t["im"] = z.imag();
  if constexpr (T::exact) {
    t["reExact"] = T::realToString(T::re(c));
    t["imExact"] = T::realToString(T::im(c));
  }
}

}  // namespace detail

/// Deterministic serialization: sorted keys, two-space indent, 17 digits.
inline std::string canonicalDump(const Json& j) {
  std::string out;
  detail::dumpCanonical(j, out, 0);
  out += "\n";
  return out;
}

template <Coefficient C>
Json toJson(const PhaseFunction<C>& f) {
  using T = coeff_traits<C>;
  Json j;
  j["omega1"] = T::realToString(f.structure().omega1);
  j["omega2"] = T::realToString(f.structure().omega2);
  j["text"] = f.toString();
  Json terms = Json::array();
  const auto canon = f.canonical();
  for (const auto& [k, c] : canon.terms()) {
    Json t;
    t["x1"] = k[0];
    t["x2"] = k[1];
    t["p1"] = k[2];
    t["p2"] = k[3];
    t["ehalf"] = k[kEHalf];
    detail::putCoefficient(t, c);
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j;
}

template <Coefficient C>
Json toJson(const TildeFunction<C>& f) {
  Json j;
  j["text"] = f.toString();
  Json terms = Json::array();
  for (const auto& [k, c] : f.terms()) {
    Json t;
    t["xt1"] = k[0];
    t["xt2"] = k[1];
    t["pt1"] = k[2];
    t["pt2"] = k[3];
    t["exp"] = k[kExpSlot];
    detail::putCoefficient(t, c);
    terms.push_back(t);
  }
  j["terms"] = terms;
  return j;
}

template <class F>
Json toJson(const DiffOperator<F>& op) {
  using T = coeff_traits<typename function_traits<F>::coeff_type>;
  Json j;
  Json diff = Json::array();
  for (const auto& [a, c] : op.diffTerms()) diff.push_back({{"multiIndex", a}, {"coeff", toJson(c)}});
  Json trig = Json::array();
  for (const auto& [k, c] : op.trigTerms()) {
    trig.push_back({{"var", function_traits<F>::name(k.var)},
                    {"kind", k.kind == TrigKind::Cos ? "cos" : "sin"},
                    {"alphaRe", T::toComplex(k.alpha).real()},
                    {"alphaIm", T::toComplex(k.alpha).imag()},
                    {"coeff", toJson(c)}});
  }
  Json shift = Json::array();
  for (const auto& [k, c] : op.shiftTerms()) {
    shift.push_back({{"var", function_traits<F>::name(k.var)},
                     {"shiftRe", T::toComplex(k.amount).real()},
                     {"shiftIm", T::toComplex(k.amount).imag()},
                     {"coeff", toJson(c)}});
  }
  j["diffTerms"] = diff;
  j["trigTerms"] = trig;
  j["shiftTerms"] = shift;
  return j;
}

inline Json toJson(const std::vector<OperatorMismatch>& ms) {
  Json j = Json::array();
  for (const auto& m : ms) j.push_back({{"term", m.term}, {"computed", m.computed}, {"reference", m.reference}});
  return j;
}

template <Coefficient C>
Json toJson(const CommutatorTable<C>& t) {
  using T = coeff_traits<C>;
  Json j;
  j["gamma"] = t.gamma;
  if (t.gammaExact) j["gammaExact"] = T::realToString(*t.gammaExact);
  j["hbar1"] = toJson(t.hbar1);
  j["hbar2"] = T::realToString(t.hbar2);
  j["thetabar"] = T::realToString(t.thetabar);
  return j;
}

inline Json toJson(const Grid& g) {
  Json axes = Json::array();
  for (const auto& a : g.axes) {
    axes.push_back({{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}});
  }
  return {{"axes", axes}};
}

inline Json toJson(const ResidualReport& r) {
  Json j;
  j["equationId"] = r.equationId;
  j["grid"] = toJson(r.grid);
  j["l2"] = r.l2;
  j["sup"] = r.sup;
  j["worstPoint"] = r.worstPoint;
  j["notes"] = r.notes;
  j["skippedPoints"] = r.skippedPoints;
  Json m = Json::object();
  for (const auto& [k, v] : r.metrics) m[k] = v;
  j["metrics"] = m;
  return j;
}

/// One row per evaluated point: coordinates, then residual re/im.
inline void writeCsv(std::ostream& os, const ResidualReport& r) {
  for (const auto& a : r.grid.axes) os << a.name << ",";
  os << "residual_re,residual_im\n";
  for (const auto& p : r.points) {
    for (double c : p.coords) os << formatDouble(c) << ",";
    os << formatDouble(p.value.real()) << "," << formatDouble(p.value.imag()) << "\n";
  }
}

}  // namespace ncq

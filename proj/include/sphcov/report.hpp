#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphcov/profile.hpp"

namespace sphcov {

using Json = nlohmann::ordered_json;

enum class Verdict { Pass, Fail, Equality };

/// Which side of zero the deficit is contracted to lie on.
///   AtLeast: deficit >= -tol   (interior Bol, covering, mass bounds)
///   AtMost:  deficit <= +tol   (exterior Bol)
///   Zero:    |deficit| <= tol  (identities)
enum class Sense { AtLeast, AtMost, Zero };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Equality: return "equality";
  }
  return "fail";
}

inline const char* to_string(Sense s) {
  switch (s) {
    case Sense::AtLeast: return ">=";
    case Sense::AtMost: return "<=";
    case Sense::Zero: return "==";
  }
  return "==";
}

struct DeficitReport {
  std::string op;
  Json inputs = Json::object();
  double lhs = 0.0;
  double rhs = 0.0;
  double deficit = 0.0;
  double tolerance = 0.0;
  Sense sense = Sense::AtLeast;
  Verdict verdict = Verdict::Fail;
  std::vector<std::string> notes;

  static DeficitReport make(std::string op, Json inputs, double lhs, double rhs, double tolerance,
                            Sense sense = Sense::AtLeast) {
    DeficitReport r;
    r.op = std::move(op);
    r.inputs = std::move(inputs);
    r.lhs = lhs;
    r.rhs = rhs;
    r.deficit = lhs - rhs;
    r.tolerance = tolerance;
    r.sense = sense;
    r.verdict = classify(r.deficit, tolerance, sense);
    return r;
  }

  static Verdict classify(double deficit, double tol, Sense sense) {
    if (!std::isfinite(deficit)) return Verdict::Fail;
    if (std::abs(deficit) <= tol) return Verdict::Equality;
    switch (sense) {
      case Sense::AtLeast: return deficit >= -tol ? Verdict::Pass : Verdict::Fail;
      case Sense::AtMost: return deficit <= tol ? Verdict::Pass : Verdict::Fail;
      case Sense::Zero: return Verdict::Fail;
    }
    return Verdict::Fail;
  }

  bool ok() const { return verdict != Verdict::Fail; }
  bool equality() const { return verdict == Verdict::Equality; }
  /// Strict inequality in the contracted direction.
  bool strict() const { return verdict == Verdict::Pass; }

  DeficitReport& note(std::string s) {
    notes.push_back(std::move(s));
    return *this;
  }
};

inline Json to_json(const DeficitReport& r) {
  Json j;
  j["op"] = r.op;
  j["inputs"] = r.inputs;
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["deficit"] = r.deficit;
  j["tolerance"] = r.tolerance;
  j["sense"] = to_string(r.sense);
  j["verdict"] = to_string(r.verdict);
  if (!r.notes.empty()) j["notes"] = r.notes;
  return j;
}

namespace detail {
inline void dump_into(std::string& out, const Json& j, int indent, int level) {
  const auto pad = [&](int l) {
    if (indent >= 0) {
      out += '\n';
      out.append(static_cast<std::size_t>(indent * l), ' ');
    }
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ',';
        first = false;
        pad(level + 1);
        out += Json(k).dump();
        out += indent >= 0 ? ": " : ":";
        dump_into(out, v, indent, level + 1);
      }
      pad(level);
      out += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      bool first = true;
      for (const auto& v : j) {
        if (!first) out += indent >= 0 ? ", " : ",";
        first = false;
        dump_into(out, v, -1, 0);
      }
      out += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "\"" + format_double(v) + "\"";
      return;
    }
    default:
      out += j.dump();
  }
}
}  // namespace detail

/// JSON text with every float printed to 17 significant digits, so that
/// identical runs produce identical bytes.
inline std::string dump_json(const Json& j, int indent = 2) {
  std::string out;
  detail::dump_into(out, j, indent, 0);
  return out;
}

}  // namespace sphcov

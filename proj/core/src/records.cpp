#include "gsf/records.hpp"

#include <cmath>
#include <sstream>

#include "gsf/error.hpp"

namespace gsf {

using nlohmann::json;

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

json field_to_json(const VectorField& field) {
  if (const auto* f = std::get_if<RadialPowerField>(&field)) {
    return {{"kind", "radial-power"}, {"alpha", f->alpha}, {"p", f->p}, {"n", f->n}};
  }
  if (const auto* g = std::get_if<GradientField>(&field)) {
    return {{"kind", "gradient"}, {"u", render(g->u)}, {"n", g->dim()}};
  }
  const auto& c = std::get<ComponentField>(field);
  json comps = json::array();
  for (const Expr& e : c.components) comps.push_back(render(e));
  return {{"kind", "components"}, {"components", comps}, {"n", c.dim()}};
}

VectorField field_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const int n = j.at("n").get<int>();
    if (n < 1 || n > kMaxDim) throw InvalidArgument("dimension out of range");
    if (kind == "radial-power") {
      return RadialPowerField{j.at("alpha").get<double>(), j.at("p").get<double>(), n};
    }
    if (kind == "gradient") return GradientField{parse(j.at("u").get<std::string>(), n)};
    if (kind == "components") {
      ComponentField c;
      for (const auto& s : j.at("components")) c.components.push_back(parse(s.get<std::string>(), n));
      if (c.dim() != n) throw DimensionMismatch("component count differs from n");
      return c;
    }
    throw InvalidArgument("unknown field kind: " + kind);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed field record: ") + e.what());
  }
}

json polynomial_to_json(const Polynomial& p) {
  json out = json::array();
  for (const auto& [a, c] : p.terms()) out.push_back(json::array({a, c}));
  return out;
}

Polynomial polynomial_from_json(const json& j, int n) {
  Polynomial p(n);
  try {
    for (const auto& term : j) {
      const MultiIndex a = term.at(0).get<MultiIndex>();
      if (static_cast<int>(a.size()) != n) throw DimensionMismatch("multi-index length differs from n");
      p.add_term(a, term.at(1).get<double>());
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed polynomial record: ") + e.what());
  }
  return p;
}

json state_to_json(const GroundState& state) {
  json j{{"u", render(state.potential())},
         {"C", number(state.normalization())},
         {"n", state.dim()},
         {"admissible", state.admissible()},
         {"reason", state.reason()}};
  if (state.polynomial()) {
    j["polyFactor"] = polynomial_to_json(state.polynomial()->poly);
    j["degree"] = state.polynomial()->k;
  } else {
    j["polyFactor"] = nullptr;
  }
  return j;
}

json estimate_to_json(const QuadratureEstimate& q) {
  return {{"value", number(q.value)}, {"error", number(q.error)}, {"method", q.method}, {"nodes", q.nodes}};
}

json spectrum_entry_to_json(const SpectrumEntry& e) {
  return {{"k", e.k},
          {"energy", number(e.energy)},
          {"degeneracy", e.degeneracy},
          {"decay", e.decay},
          {"state", e.state_template}};
}

json report_to_json(const VerificationReport& r) {
  json j{{"checkId", r.check_id},   {"inputs", r.inputs},       {"lhs", number(r.lhs)},
         {"rhs", number(r.rhs)},     {"absError", number(r.abs_error)}, {"relError", number(r.rel_error)},
         {"tolerance", number(r.tolerance)}, {"criterion", criterion_name(r.criterion)}, {"pass", r.pass},
         {"notes", r.notes}};
  if (!r.extras.empty()) j["extras"] = r.extras;
  return j;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_number(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string report_csv_header() {
  return "checkId,lhs,rhs,absError,relError,tolerance,criterion,pass,notes";
}

std::string report_to_csv(const VerificationReport& r) {
  std::ostringstream os;
  os << csv_field(r.check_id) << ',' << csv_number(r.lhs) << ',' << csv_number(r.rhs) << ','
     << csv_number(r.abs_error) << ',' << csv_number(r.rel_error) << ',' << csv_number(r.tolerance) << ','
     << criterion_name(r.criterion) << ',' << (r.pass ? "true" : "false") << ',' << csv_field(r.notes);
  return os.str();
}

}  // namespace gsf

#pragma once

// Text records for fields, states, spectra and reports.

#include <nlohmann/json.hpp>
#include <string>

#include "gsf/field.hpp"
#include "gsf/harmonics.hpp"
#include "gsf/quadrature.hpp"
#include "gsf/state.hpp"
#include "gsf/verify.hpp"

namespace gsf {

// {"kind": "radial-power", "alpha", "p", "n"} or {"kind": "gradient", "u", "n"}
// or {"kind": "components", "components": [...], "n"}.
nlohmann::json field_to_json(const VectorField& field);
VectorField field_from_json(const nlohmann::json& j);

// [[multi-index, coefficient], ...]
nlohmann::json polynomial_to_json(const Polynomial& p);
Polynomial polynomial_from_json(const nlohmann::json& j, int n);

nlohmann::json state_to_json(const GroundState& state);
nlohmann::json estimate_to_json(const QuadratureEstimate& q);
nlohmann::json spectrum_entry_to_json(const SpectrumEntry& e);

nlohmann::json report_to_json(const VerificationReport& r);
std::string report_csv_header();
std::string report_to_csv(const VerificationReport& r);

// Finite doubles as numbers, everything else as strings ("inf", "nan").
nlohmann::json number(double v);

}  // namespace gsf

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gsf/error.hpp"
#include "gsf/records.hpp"

using namespace gsf;
using nlohmann::json;

TEST(FieldRecord, RoundTrips) {
  const VectorField fields[] = {RadialPowerField{1.5, 0.5, 3}, GradientField{parse("0.5*r^2 + x1", 2)},
                                ComponentField{{parse("x2", 2), parse("-x1", 2)}}};
  const Vec x{0.3, -0.7, 0.2};
  for (const VectorField& f : fields) {
    const json j = field_to_json(f);
    const VectorField back = field_from_json(json::parse(j.dump()));
    EXPECT_EQ(back.index(), f.index());
    EXPECT_EQ(field_to_json(back), j);
    const int n = dimension(f);
    const Vec a = eval_field(f, Point(x.data(), n));
    const Vec b = eval_field(back, Point(x.data(), n));
    for (int i = 0; i < n; ++i) EXPECT_DOUBLE_EQ(a[i], b[i]);
  }
  EXPECT_EQ(field_to_json(RadialPowerField{2.0, 1.0, 3})["kind"], "radial-power");
}

TEST(FieldRecord, MalformedInputRaises) {
  EXPECT_THROW(field_from_json(json{{"kind", "radial-power"}, {"n", 3}}), InvalidArgument);
  EXPECT_THROW(field_from_json(json{{"kind", "spiral"}, {"n", 3}}), InvalidArgument);
  EXPECT_THROW(field_from_json(json{{"kind", "radial-power"}, {"alpha", 1}, {"p", 0}, {"n", 0}}), InvalidArgument);
  EXPECT_THROW(field_from_json(json{{"kind", "components"}, {"components", {"x1"}}, {"n", 2}}), DimensionMismatch);
  EXPECT_THROW(field_from_json(json{{"kind", "gradient"}, {"u", "x3"}, {"n", 2}}), VariableOutOfRange);
}

TEST(PolynomialRecord, RoundTrips) {
  for (const auto& h : harmonic_basis(3, 3)) {
    const json j = polynomial_to_json(h.poly);
    const Polynomial back = polynomial_from_json(json::parse(j.dump()), 3);
    EXPECT_EQ(back.terms(), h.poly.terms());
  }
  const json j = polynomial_to_json(Polynomial::monomial({1, 2}, 3.0));
  EXPECT_EQ(j, json::parse("[[[1,2],3.0]]"));
  EXPECT_THROW(polynomial_from_json(json::parse("[[[1,2,3],1.0]]"), 2), DimensionMismatch);
  EXPECT_THROW(polynomial_from_json(json::parse("[[\"a\",1.0]]"), 2), InvalidArgument);
}

TEST(StateRecord, Fields) {
  const GroundState g = solve_ground_state(RadialPowerField{1.0, 0.0, 3});
  const json j = state_to_json(g);
  EXPECT_EQ(j["n"], 3);
  EXPECT_EQ(j["admissible"], true);
  EXPECT_TRUE(j["polyFactor"].is_null());
  EXPECT_NEAR(j["C"].get<double>(), g.normalization(), 0.0);
  EXPECT_TRUE(structurally_equal(parse(j["u"].get<std::string>(), 3), g.potential()));
  const json e = state_to_json(excited_state(harmonic_basis(3, 2)[0], g));
  EXPECT_EQ(e["degree"], 2);
  EXPECT_TRUE(e["polyFactor"].is_array());
  const json h = state_to_json(solve_ground_state(RadialPowerField{0.5, 2.0, 3}));
  EXPECT_EQ(h["admissible"], false);
  EXPECT_FALSE(h["reason"].get<std::string>().empty());
}

TEST(Numbers, NonFiniteBecomeStrings) {
  EXPECT_EQ(number(1.5), json(1.5));
  EXPECT_EQ(number(std::numeric_limits<double>::infinity()), json("inf"));
  EXPECT_EQ(number(-std::numeric_limits<double>::infinity()), json("-inf"));
  EXPECT_EQ(number(std::nan("")), json("nan"));
}

TEST(ReportRecord, JsonAndCsv) {
  VerificationReport r = make_report("demo/1", json{{"a", 1}}, 1.0, 1.0 + 1e-9, 1e-6, Criterion::kEqual, "x, \"y\"");
  const json j = report_to_json(r);
  for (const char* key : {"checkId", "inputs", "lhs", "rhs", "absError", "relError", "tolerance", "criterion", "pass",
                          "notes"})
    EXPECT_TRUE(j.contains(key)) << key;
  EXPECT_FALSE(j.contains("extras"));
  EXPECT_EQ(j["criterion"], "equal");
  r.extras = {{"k", 2}};
  EXPECT_EQ(report_to_json(r)["extras"]["k"], 2);

  EXPECT_EQ(report_csv_header(), "checkId,lhs,rhs,absError,relError,tolerance,criterion,pass,notes");
  const std::string row = report_to_csv(r);
  EXPECT_EQ(row.rfind("demo/1,1,", 0), 0u) << row;
  // Seventeen significant digits round-trip exactly.
  EXPECT_EQ(std::stod(row.substr(9)), 1.0 + 1e-9);
  EXPECT_NE(row.find(",equal,true,"), std::string::npos);
  EXPECT_NE(row.find("\"criterion: equal; x, \"\"y\"\"\""), std::string::npos) << row;
}

TEST(SpectrumRecord, Fields) {
  const json j = spectrum_entry_to_json(oscillator_spectrum(3, 1.0, 2)[2]);
  EXPECT_EQ(j["k"], 2);
  EXPECT_EQ(j["energy"], 7.0);
  EXPECT_EQ(j["degeneracy"], 5);
  const json q = estimate_to_json(QuadratureEstimate{2.0, 1e-12, "radial", 10});
  EXPECT_EQ(q["method"], "radial");
  EXPECT_EQ(q["nodes"], 10);
}

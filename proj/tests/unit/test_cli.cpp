#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <nlohmann/json.hpp>
#include <sstream>

#include "cli.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
  std::vector<json> records() const {
    std::vector<json> rs;
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line))
      if (!line.empty()) rs.push_back(json::parse(line));
    return rs;
  }
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gsf::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string capture(const std::string& cmd) {
  std::string out;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe) throw std::runtime_error("popen failed");
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0) out.append(buf.data(), n);
  return out;
}

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("gsf_cli_test_" + name); }

}  // namespace

TEST(Solve, OscillatorAndGradientAgree) {
  const Result a = run({"solve", "--field", "radial", "--alpha", "1", "--p", "0", "--n", "3"});
  ASSERT_EQ(a.code, gsf::cli::kOk) << a.err;
  const json ra = a.records().at(0);
  EXPECT_EQ(ra["E0"], 3.0);
  EXPECT_EQ(ra["state"]["admissible"], true);
  EXPECT_NEAR(ra["state"]["C"].get<double>(), std::pow(M_PI, -0.75), 1e-10);
  const Result b = run({"solve", "--field", "gradient", "--u", "0.5*r^2", "--n", "3"});
  ASSERT_EQ(b.code, gsf::cli::kOk) << b.err;
  const json rb = b.records().at(0);
  EXPECT_EQ(rb["E0"], ra["E0"]);
  EXPECT_EQ(rb["state"]["C"], ra["state"]["C"]);
}

TEST(Solve, HardyFieldIsReportedNotAdmissible) {
  const Result r = run({"solve", "--field", "radial", "--alpha", "1", "--p", "2", "--n", "3"});
  ASSERT_EQ(r.code, gsf::cli::kOk) << r.err;
  const json j = r.records().at(0);
  EXPECT_EQ(j["state"]["admissible"], false);
  EXPECT_TRUE(j["E0"].is_null());
}

TEST(Solve, InvalidFieldsExitTwo) {
  EXPECT_EQ(run({"solve", "--field", "components", "--components", "x2;-x1", "--n", "2"}).code,
            gsf::cli::kInvalidInput);
  EXPECT_EQ(run({"solve", "--field", "radial", "--alpha", "1", "--p", "3", "--n", "3"}).code,
            gsf::cli::kInvalidInput);
  EXPECT_EQ(run({"solve", "--field", "gradient", "--u", "2*+x1", "--n", "2"}).code, gsf::cli::kInvalidInput);
  EXPECT_EQ(run({"solve", "--bogus"}).code, gsf::cli::kInvalidInput);
  EXPECT_EQ(run({}).code, gsf::cli::kInvalidInput);
  EXPECT_EQ(run({"--help"}).code, gsf::cli::kOk);
}

TEST(Spectrum, OscillatorAndCoulombLadders) {
  const Result o = run({"spectrum", "--field", "radial", "--alpha", "1", "--p", "0", "--n", "3", "--kmax", "3"});
  ASSERT_EQ(o.code, gsf::cli::kOk) << o.err;
  const auto rs = o.records();
  ASSERT_EQ(rs.size(), 4u);
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(rs[k]["energy"], 3.0 + 2 * k);
    EXPECT_EQ(rs[k]["degeneracy"], 2 * k + 1);
    EXPECT_LE(rs[k]["residual"].get<double>(), 1e-8);
  }
  const Result c = run({"spectrum", "--field", "radial", "--alpha", "1", "--p", "1", "--n", "3", "--kmax", "2"});
  ASSERT_EQ(c.code, gsf::cli::kOk) << c.err;
  const auto cs = c.records();
  ASSERT_EQ(cs.size(), 3u);
  EXPECT_DOUBLE_EQ(cs[0]["energy"].get<double>(), -1.0);
  EXPECT_DOUBLE_EQ(cs[1]["energy"].get<double>(), -0.25);
  EXPECT_NEAR(cs[2]["energy"].get<double>(), -1.0 / 9.0, 1e-16);
  const Result g = run({"spectrum", "--field", "radial", "--alpha", "2", "--p", "0", "--n", "2", "--kmax", "0"});
  EXPECT_EQ(g.records().size(), 1u);
  EXPECT_EQ(run({"spectrum", "--field", "radial", "--alpha", "1", "--p", "0.5", "--n", "3"}).code,
            gsf::cli::kInvalidInput);
}

TEST(Verify, IdentityTrials) {
  const Result r = run({"verify", "--check", "peq1", "--trials", "25"});
  ASSERT_EQ(r.code, gsf::cli::kOk) << r.err;
  const auto rs = r.records();
  ASSERT_EQ(rs.size(), 25u);
  for (const json& j : rs) EXPECT_EQ(j["pass"], true);
}

TEST(Verify, HardyRatio) {
  const Result r = run({"verify", "--check", "hardy", "--n", "3", "--eps", "1e-3"});
  ASSERT_EQ(r.code, gsf::cli::kOk) << r.err;
  bool found = false;
  for (const json& j : r.records()) {
    if (j["checkId"] == "hardy-eps-n3") {
      found = true;
      EXPECT_LE(j["lhs"].get<double>(), 1.1 * 0.25);
    }
    EXPECT_EQ(j["inputs"].value("n", 3), 3);
  }
  EXPECT_TRUE(found);
}

TEST(Verify, FailuresAndInvalidChecks) {
  EXPECT_EQ(run({"verify", "--check", "nonsense"}).code, gsf::cli::kInvalidInput);
  EXPECT_EQ(run({"--tol", "1e-30", "verify", "--check", "peq1", "--trials", "2"}).code, gsf::cli::kCheckFailure);
  const Result list = run({"verify", "--list"});
  EXPECT_EQ(list.code, gsf::cli::kOk);
  EXPECT_NE(list.out.find("virial"), std::string::npos);
}

TEST(Verify, ToleranceFromEnvironment) {
  ::setenv("GSF_TOL", "1e-30", 1);
  const int code = run({"verify", "--check", "peq1", "--trials", "2"}).code;
  ::unsetenv("GSF_TOL");
  EXPECT_EQ(code, gsf::cli::kCheckFailure);
  EXPECT_EQ(run({"verify", "--check", "peq1", "--trials", "2"}).code, gsf::cli::kOk);
}

TEST(Verify, CsvOutput) {
  const Result r = run({"--format", "csv", "verify", "--check", "virial"});
  ASSERT_EQ(r.code, gsf::cli::kOk) << r.err;
  std::istringstream is(r.out);
  std::string header, first;
  std::getline(is, header);
  std::getline(is, first);
  EXPECT_EQ(header, "checkId,lhs,rhs,absError,relError,tolerance,criterion,pass,notes");
  EXPECT_EQ(first.rfind("virial/hydrogen,", 0), 0u) << first;
}

TEST(Oracle, RadialAndGrid) {
  const Result o = run({"oracle", "--preset", "oscillator", "--n", "3"});
  ASSERT_EQ(o.code, gsf::cli::kOk) << o.err;
  const json last = o.records().back();
  EXPECT_NEAR(last["E0"].get<double>(), 3.0, 1e-6);
  EXPECT_EQ(last["method"], "radial");
  const Result c = run({"oracle", "--preset", "coulomb", "--Z", "1", "--n", "3"});
  EXPECT_NEAR(c.records().back()["E0"].get<double>(), -0.25, 1e-4);
  const Result g = run({"oracle", "--V", "r^2", "--n", "2", "--method", "grid", "--m", "200"});
  ASSERT_EQ(g.code, gsf::cli::kOk) << g.err;
  EXPECT_NEAR(g.records().back()["E0"].get<double>(), 2.0, 0.02);
}

TEST(Oracle, NumericalFailuresExitThree) {
  EXPECT_EQ(run({"oracle", "--V", "1/x1", "--n", "1", "--method", "grid", "--m", "63"}).code,
            gsf::cli::kNumericalFailure);
  EXPECT_EQ(run({"oracle", "--V", "r^2", "--n", "2", "--method", "grid", "--m", "40", "--oracle-tol", "1e-300"}).code,
            gsf::cli::kNumericalFailure);
  EXPECT_EQ(run({"oracle", "--V", "r^2", "--preset", "coulomb", "--n", "3"}).code, gsf::cli::kInvalidInput);
}

TEST(Bound, TightAndZeroField) {
  const Result t = run({"bound", "--preset", "oscillator", "--n", "3", "--field", "radial", "--alpha", "1", "--p", "0",
                        "--samples", "500", "--trials", "2"});
  ASSERT_EQ(t.code, gsf::cli::kOk) << t.err;
  for (const json& j : t.records()) {
    EXPECT_EQ(j["pass"], true) << j.dump();
    if (j["checkId"] == "hersch") {
      EXPECT_NEAR(j["rhs"].get<double>(), j["lhs"].get<double>(), 1e-6);
    }
  }
  const Result z = run({"bound", "--preset", "oscillator", "--n", "3", "--field", "radial", "--alpha", "0", "--p", "0",
                        "--samples", "500", "--trials", "1"});
  ASSERT_EQ(z.code, gsf::cli::kOk) << z.err;
  for (const json& j : z.records())
    if (j["checkId"] == "hersch") {
      EXPECT_NEAR(j["rhs"].get<double>(), 0.0, 1e-6);
    }
  const Result h = run({"bound", "--preset", "coulomb", "--Z", "2", "--n", "3", "--field", "radial", "--alpha", "1",
                        "--p", "1", "--samples", "500", "--trials", "1"});
  ASSERT_EQ(h.code, gsf::cli::kOk) << h.err;
  for (const json& j : h.records())
    if (j["checkId"] == "hersch") {
      EXPECT_NEAR(j["rhs"].get<double>(), -1.0, 1e-9);
    }
}

TEST(Config, FileAndOutputPath) {
  const fs::path cfg = temp_file("config.toml");
  const fs::path dest = temp_file("out.csv");
  {
    std::ofstream f(cfg);
    f << "format = \"csv\"\n" << "output = \"" << dest.string() << "\"\n";
  }
  const Result r = run({"--config", cfg.string(), "verify", "--check", "bump"});
  ASSERT_EQ(r.code, gsf::cli::kOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(dest);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("checkId,", 0), 0u);
  fs::remove(cfg);
  fs::remove(dest);
  EXPECT_EQ(run({"--config", "/nonexistent/gsf.toml", "verify", "--check", "bump"}).code, gsf::cli::kInvalidInput);
}

TEST(Binary, RepeatedRunsAreByteIdentical) {
  const std::string cmd = std::string("\"") + GSF_BINARY + "\" --seed 7 verify --check peq1,bump,hersch";
  const std::string a = capture(cmd);
  const std::string b = capture(cmd);
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, b);
  const int status = std::system((std::string("\"") + GSF_BINARY + "\" verify --check nonsense >/dev/null 2>&1").c_str());
  EXPECT_EQ(WEXITSTATUS(status), 2);
}

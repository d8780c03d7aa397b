#include <doctest.h>

#include "lienard/io.hpp"

using namespace lienard;

namespace {

const std::string kGolden = R"(n = 4
interval = [0.5, 2.0]
f0 = "16/81*u^4 + 2/3*u"
f1 = "-32/27*u^3 - 1"
f2 = "8/3*u^2 + 1/u"
f3 = "-8/3*u"
f4 = 1
)";

}  // namespace

TEST_CASE("problem files round-trip") {
  const io::ProblemFile pf = io::parse_problem(kGolden);
  CHECK(pf.problem.n == 4);
  CHECK(pf.problem.I.lo == 0.5);
  CHECK(pf.problem.f[4].is_constant(1.0));
  const std::string text = io::problem_to_toml(pf.problem, std::string("abc"));
  const io::ProblemFile back = io::parse_problem(text);
  CHECK(back.spec_hash == "abc");
  CHECK(io::problem_to_toml(back.problem, std::string("abc")) == text);
  for (int k = 0; k <= 4; ++k)
    for (double u : {0.6, 1.7})
      CHECK(evaluate(back.problem.f[static_cast<std::size_t>(k)], u) ==
            evaluate(pf.problem.f[static_cast<std::size_t>(k)], u));
}

TEST_CASE("config overrides") {
  const io::ProblemFile pf = io::parse_problem(kGolden + R"(
[config]
grid_size = 256
residual_tol = 1e-7
offset_range = [-3, 3]
)");
  Config cfg;
  pf.overrides.apply(cfg);
  CHECK(cfg.grid_size == 256);
  CHECK(cfg.residual_tol == 1e-7);
  REQUIRE(cfg.offset_range);
  CHECK(cfg.offset_range->hi == 3.0);
  CHECK(cfg.tol_const == 1e-6);
}

TEST_CASE("problem file errors") {
  CHECK_THROWS_AS(io::parse_problem("n = 4\ninterval = [0, 1]\n"), SpecError);
  CHECK_THROWS_AS(io::parse_problem("interval = [0, 1]\nf0 = \"u\"\n"), SpecError);
  CHECK_THROWS_AS(io::parse_problem("n = 0\ninterval = [1, 0]\nf0 = \"u\"\n"), SpecError);
  CHECK_THROWS_AS(io::parse_problem("n = 0\ninterval = [0, 1\n"), SpecError);
  try {
    io::parse_problem("n = 0\ninterval = [0, 1]\nf0 = \"u +* 2\"\n");
    FAIL("accepted a malformed expression");
  } catch (const ParseError& e) {
    CHECK(e.position == 3);
    CHECK(std::string(e.what()).find("f0") != std::string::npos);
  }
}

TEST_CASE("synthesis specs round-trip") {
  const SynthesisSpec s = io::parse_synthesis_spec(R"(
n = 4
F = "u"
interval = [0.5, 2]
a = 1
b = [0, 0.5, 0, -1]
)");
  CHECK(s.n == 4);
  CHECK(s.epsilon == 1);
  CHECK(s.nu == 1);
  CHECK(s.b[3] == -1.0);
  const SynthesisSpec t = io::parse_synthesis_spec(io::synthesis_spec_to_toml(s));
  CHECK(spec_hash(t) == spec_hash(s));
  CHECK_THROWS_AS(io::parse_synthesis_spec("n = 4\nF = \"u\"\ninterval = [0.5, 2]\n"), SpecError);
}

TEST_CASE("reports round-trip through JSON") {
  const io::ProblemFile pf = io::parse_problem(kGolden);
  const SymmetryReport r = classify(pf.problem);
  const io::Json j = io::report_to_json(r);
  CHECK(j["schema"] == 1);
  const io::Json again = io::report_to_json(io::report_from_json(io::Json::parse(j.dump())));
  CHECK(again == j);
  CHECK(again.dump() == j.dump());

  io::Json bad = j;
  bad["schema"] = 2;
  CHECK_THROWS_AS(io::report_from_json(bad), SpecError);
}

TEST_CASE("ambiguous report keeps a bounded sample") {
  std::vector<double> offsets;
  for (int i = 0; i < 100; ++i) offsets.push_back(100 - i);
  const io::Json j = io::ambiguous_to_json(AmbiguousOffset(offsets, "x"), 4);
  CHECK(j["status"] == "ambiguous_offset");
  CHECK(j["offset_count"] == 100);
  CHECK(j["offsets"].size() == 16);
  CHECK(j["offsets"][0] == 1.0);
  CHECK(j["offset_range"][1] == 100.0);
}

TEST_CASE("double formatting") {
  CHECK(io::format_double(1.0) == "1.0");
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(-2.5e-300) == "-2.5e-300");
  CHECK(std::stod(io::format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("trajectory CSV") {
  Trajectory tr;
  tr.t = Eigen::ArrayXd::LinSpaced(3, 0.0, 1.0);
  tr.u = Eigen::ArrayXd::Constant(3, 2.0);
  tr.udot = Eigen::ArrayXd::Zero(3);
  CHECK(io::trajectory_csv(tr) == "t,u,udot\n0.0,2.0,0.0\n0.5,2.0,0.0\n1.0,2.0,0.0\n");
}

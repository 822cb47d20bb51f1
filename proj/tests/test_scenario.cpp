#include "doctest.h"

#include <cmath>
#include <string>

#include "defectgeo/errors.hpp"
#include "defectgeo/scenario.hpp"

using namespace defectgeo;

TEST_CASE("defaults from a minimal file")
{
    const Scenario s = parse_scenario("[numerics]\ntolerance = \"1e-7\"\n");
    CHECK(s.numerics.tolerance == 1e-7);
    CHECK(s.numerics.step == 1e-4);
    CHECK(s.numerics.resolution == 9);
    CHECK(s.numerics.grid_min[0] == -1.0);
    CHECK(s.numerics.grid_max[2] == 1.0);
    CHECK(Frame::make(s.coframe) == nullptr);
    for (int a = 0; a < 3; ++a) {
        CHECK(s.defects.burgers[a].is_constant(0.0));
        CHECK(s.defects.frank[a].is_constant(0.0));
        CHECK(s.defects.point[a].is_constant(0.0));
    }
    CHECK(s.defects.scalar.is_constant(0.0));
    CHECK(s.defects.c1 == -3.0);
    CHECK(s.defects.c2 == doctest::Approx(2.0 / 3.0).epsilon(1e-16));
    CHECK_FALSE(s.gauge.has_value());
    CHECK_FALSE(s.deformation.has_value());
    CHECK(s.has("numerics"));
    CHECK_FALSE(s.has("defects"));
}

TEST_CASE("defect fields round-trip through evaluation")
{
    const Scenario s = parse_scenario(R"ini(
# Beltrami configuration
[defects]
rho   = "0.5"
Omega = ("sin(2*z)", "cos(2*z)", "0")   # Frank covector
)ini");
    const Point p{0.1, 0.2, 0.3, 0};
    CHECK(evaluate(s.defects.scalar, p) == 0.5);
    CHECK(evaluate(s.defects.frank[0], p) == doctest::Approx(std::sin(0.6)));
    CHECK(evaluate(s.defects.frank[1], p) == doctest::Approx(std::cos(0.6)));
    CHECK(evaluate(s.defects.frank[2], p) == 0.0);
}

TEST_CASE("full file")
{
    const Scenario s = parse_scenario(R"ini([coframe]
e1 = ("1", "0", "0")
e2 = ("0", "1 + x^2", "0")
[gauge]
row1 = ("cos(x)", "-sin(x)", "0")
row2 = ("sin(x)", "cos(x)", "0")
row3 = ("0", "0", "1")
[deformation]
inverse = ("x/2", "y/2", "z/2")
body_force = ("1", "1", "1")
[material]
lambda = "2"
mu = "3"
nu = "0.25"
[couplings]
kappa2 = "1"
[numerics]
strategy = "finite_difference"
frank_mode = "raw"
grid_min = ("0", "0", "0")
grid_max = ("1", "1", "1")
resolution = "4"
)ini");
    CHECK(s.gauge.has_value());
    CHECK(s.deformation->inverse.has_value());
    CHECK(s.material.lambda == 2.0);
    CHECK(s.material.mu == 3.0);
    CHECK(s.material.poisson_ratio == 0.25);
    CHECK(s.couplings(2) == 1.0);
    CHECK(s.couplings(1) == 0.0);
    CHECK(s.numerics.strategy == Strategy::FiniteDifference);
    CHECK(s.numerics.frank_mode == FrankMode::Raw);
    CHECK(s.numerics.resolution == 4);
    CHECK(to_string(s.coframe[1][1]) == "1 + x^2");
    CHECK(s.coframe[2][2].is_constant(1.0));
}

namespace {

void expect_error(const std::string& text, std::size_t line, const std::string& fragment)
{
    CAPTURE(text);
    try {
        parse_scenario(text);
        FAIL("expected ScenarioError");
    } catch (const ScenarioError& e) {
        CHECK(e.line() == line);
        CHECK(std::string(e.what()).find(fragment) != std::string::npos);
    }
}

}  // namespace

TEST_CASE("validation errors name the problem and its line")
{
    expect_error("[defects]\nrho = \"1\"\n\n[defects]\nrho = \"2\"\n", 4, "lines 1 and 4");
    expect_error("[defects]\nrho = \"1\"\nrho = \"2\"\n", 3, "duplicate key 'rho'");
    expect_error("[mystery]\n", 1, "unknown section [mystery]");
    expect_error("[defects]\nsigma = \"1\"\n", 2, "unknown key 'sigma'");
    expect_error("rho = \"1\"\n", 1, "outside of any section");
    expect_error("[defects]\nrho = 1\n", 2, "double-quoted");
    expect_error("[defects]\nb = (\"1\", \"2\")\n", 2, "three expressions");
    expect_error("[defects]\nrho = \"2*+x\"\n", 2, "offset 2");
    expect_error("[material]\nmu = \"x\"\n", 2, "expected a constant");
    expect_error("[gauge]\nrow1 = (\"1\",\"0\",\"0\")\n", 1, "missing key 'row2'");
    expect_error("[deformation]\ndensity = \"1\"\n", 1, "exactly one of");
    expect_error("[numerics]\nstrategy = \"magic\"\n", 2, "strategy");
    expect_error("[numerics]\nresolution = \"2.5\"\n", 2, "integer");
    expect_error("[numerics]\nh = \"-1\"\n", 2, "positive");
    expect_error("[defects\n", 1, "unterminated");
}

#pragma once

// Scenario files: a sectioned key = value text format describing one
// experiment. Values are double-quoted expressions, or parenthesised
// tuples of them:
//
//   # comment
//   [defects]
//   b   = ("1", "0", "0")
//   rho = "0.5"
//
// Unknown or repeated sections and keys are errors. See README.md for the
// complete key list.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "defectgeo/constants.hpp"
#include "defectgeo/defects.hpp"
#include "defectgeo/expr.hpp"
#include "defectgeo/field.hpp"

namespace defectgeo {

using ExprVec3 = std::array<Expr, 3>;
using Vec3 = std::array<double, 3>;

struct DefectSpec {
    ExprVec3 burgers{};
    ExprVec3 frank{};
    ExprVec3 point{};
    Expr scalar;
    /// Potential φ of the extra-matter density, if given.
    std::optional<Expr> potential;
    double c1 = -3.0;
    double c2 = 2.0 / 3.0;
};

struct DeformationSpec {
    /// X^A(x): body coordinates as functions of spatial ones.
    std::optional<ExprVec3> inverse;
    /// x^a(X) written in x, y, z standing for X^1, X^2, X^3; inverted by Newton.
    std::optional<ExprVec3> forward;
    Expr density = Expr(1.0);
    ExprVec3 velocity{};
    ExprVec3 body_force{};
};

struct NumericsSpec {
    double step = kDefaultStep;
    double tolerance = 1e-6;
    Vec3 grid_min{-1.0, -1.0, -1.0};
    Vec3 grid_max{1.0, 1.0, 1.0};
    int resolution = 9;
    Strategy strategy = Strategy::Symbolic;
    FrankMode frank_mode = FrankMode::Literal;
    Vec3 sphere_center{0.0, 0.0, 0.0};
    double sphere_radius = 1.0;
    int volume_resolution = 64;
    int sphere_resolution = 128;
};

struct Scenario {
    std::string source;
    ExprMat3 coframe;  // rows h^a_b
    std::optional<ExprMat3> gauge;
    DefectSpec defects;
    std::optional<DeformationSpec> deformation;
    MaterialConstants material;
    Couplings couplings;
    NumericsSpec numerics;
    /// Sections present in the file, with their line numbers.
    std::map<std::string, std::size_t> sections;

    bool has(const std::string& section) const { return sections.count(section) != 0; }
};

/// Throws ScenarioError naming the offending section or key and its line.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace defectgeo

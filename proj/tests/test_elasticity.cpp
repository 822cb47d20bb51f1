#include "doctest.h"

#include <Eigen/Dense>

#include <cmath>

#include "defectgeo/elasticity.hpp"
#include "defectgeo/errors.hpp"
#include "support.hpp"

using namespace defectgeo;
using testing_support::Rng;

namespace {

const Expr X = Expr::x();
const Expr Y = Expr::y();
const Expr Z = Expr::z();
const Expr T = Expr::t();

double at(const FormField& f, const Point& p) { return f(p)[0]; }

double max_diff(const FieldMat3& m, const Mat3& expected, const std::vector<Point>& pts)
{
    double worst = 0.0;
    for (const Point& p : pts)
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) worst = std::max(worst, std::abs(at(m[i][j], p) - expected[i][j]));
    return worst;
}

Mat3 scaled_identity(double s)
{
    Mat3 m{};
    for (std::size_t i = 0; i < 3; ++i) m[i][i] = s;
    return m;
}

FieldMat3 field_matrix(const std::array<std::array<Expr, 3>, 3>& m)
{
    FieldMat3 out;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) out[i][j] = FormField::scalar(m[i][j]);
    return out;
}

std::array<Expr, 3> random_vector(Rng& rng, double scale, bool with_time = false)
{
    return {rng.polynomial(2, scale, with_time), rng.polynomial(2, scale, with_time),
            rng.polynomial(2, scale, with_time)};
}

ExprMat3 random_symmetric(Rng& rng, double scale, bool with_time = false)
{
    ExprMat3 m;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i; j < 3; ++j) m[i][j] = m[j][i] = rng.polynomial(2, scale, with_time);
    return m;
}

/// Central difference of an expression along one axis (3 = t).
double stencil(const Expr& e, const Point& p, int axis, double h = 1e-4)
{
    return (evaluate(e, p.shifted(axis, h)) - evaluate(e, p.shifted(axis, -h))) / (2.0 * h);
}

const MaterialConstants unit_lame{};

}  // namespace

TEST_CASE("identity deformation has identity gradients, zero strain and zero stress")
{
    Rng rng(501);
    const auto pts = rng.points(10);
    for (const DeformationMap& map : {DeformationMap::from_inverse({X, Y, Z}), DeformationMap::from_forward({X, Y, Z})}) {
        const DeformationGradients g = deformation_gradients(map, pts);
        CHECK(max_diff(g.pullback, identity3(), pts) == 0.0);
        CHECK(max_diff(g.pushforward, identity3(), pts) == 0.0);
        const StrainState s = euler_strain(g);
        CHECK(max_diff(s.strain, Mat3{}, pts) == 0.0);
        const StressState sigma = isotropic_stress(s, unit_lame);
        CHECK(max_diff(sigma.sigma, Mat3{}, pts) == 0.0);
        for (const Point& p : pts) CHECK(at(volume_relation_residual(g), p) == 0.0);
    }
}

TEST_CASE("uniform dilation x = 2X")
{
    Rng rng(502);
    const auto pts = rng.points(10);
    for (const DeformationMap& map :
         {DeformationMap::from_inverse({0.5 * X, 0.5 * Y, 0.5 * Z}), DeformationMap::from_forward({2.0 * X, 2.0 * Y, 2.0 * Z})}) {
        const DeformationGradients g = deformation_gradients(map, pts);
        CHECK(max_diff(g.pushforward, scaled_identity(0.5), pts) <= 1e-15);
        CHECK(max_diff(g.pullback, scaled_identity(2.0), pts) <= 1e-15);
        const StrainState s = euler_strain(g);
        CHECK(max_diff(s.strain, scaled_identity(3.0 / 8.0), pts) <= 1e-15);
        const StressState sigma = isotropic_stress(s, unit_lame);
        CHECK(max_diff(sigma.sigma, scaled_identity(15.0 / 8.0), pts) <= 1e-15);
        for (const Point& p : pts) {
            CHECK(det3(orthonormal_pullback(map, CoFrame(), ExprMat3{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}}, p)) ==
                  doctest::Approx(8.0).epsilon(1e-14));
            CHECK(std::abs(at(volume_relation_residual(g), p)) <= 1e-14);
        }
    }
}

TEST_CASE("simple shear gradients invert each other")
{
    Rng rng(503);
    const auto pts = rng.points(20);
    const DeformationGradients g = deformation_gradients(DeformationMap::from_inverse({X - 0.3 * Y, Y, Z}), pts);
    const Mat3 push{{{1.0, -0.3, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    CHECK(max_diff(g.pushforward, push, pts) == 0.0);

    Eigen::Matrix3d oracle;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) oracle(i, j) = push[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const Eigen::Matrix3d inverse = oracle.inverse();
    Mat3 pull{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) pull[i][j] = inverse(static_cast<int>(i), static_cast<int>(j));
    CHECK(max_diff(g.pullback, pull, pts) <= 1e-12);

    for (const Point& p : pts) {
        const Mat3 product = multiply3(
            [&] {
                Mat3 m{};
                for (std::size_t i = 0; i < 3; ++i)
                    for (std::size_t j = 0; j < 3; ++j) m[i][j] = at(g.pullback[i][j], p);
                return m;
            }(),
            push);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(product[i][j] - (i == j ? 1.0 : 0.0)) <= 1e-12);
    }
}

TEST_CASE("forward and inverse descriptions of the same map agree")
{
    Rng rng(504);
    const auto pts = rng.points(15);
    // x = X + 0.3 Y, y = Y + 0.2 Z^2, z = Z, inverted by hand.
    const DeformationMap forward = DeformationMap::from_forward({X + 0.3 * Y, Y + 0.2 * Z * Z, Z});
    const DeformationMap inverse = DeformationMap::from_inverse({X - 0.3 * (Y - 0.2 * Z * Z), Y - 0.2 * Z * Z, Z});
    const DeformationGradients gf = deformation_gradients(forward, pts);
    const DeformationGradients gi = deformation_gradients(inverse, pts);
    const StrainState sf = euler_strain(gf);
    const StrainState si = euler_strain(gi);
    for (const Point& p : pts) {
        const auto body = forward.body_point(p);
        const auto expected = inverse.body_point(p);
        for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(body[k] - expected[k]) <= 1e-12);
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(std::abs(at(gf.pullback[i][j], p) - at(gi.pullback[i][j], p)) <= 1e-12);
                CHECK(std::abs(at(gf.pushforward[i][j], p) - at(gi.pushforward[i][j], p)) <= 1e-12);
                CHECK(std::abs(at(sf.strain[i][j], p) - at(si.strain[i][j], p)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("finite-difference gradient strategy matches the symbolic one")
{
    Rng rng(505);
    const auto pts = rng.points(10);
    const ExprVec3 map{X + 0.1 * Y * Z, Y - 0.2 * X * X, Z + 0.1 * sym::sin(X)};
    const StrainState a = euler_strain(deformation_gradients(DeformationMap::from_inverse(map)));
    const DeformationGradients fd = deformation_gradients(DeformationMap::from_inverse(map, Strategy::FiniteDifference));
    CHECK(fd.pushforward[0][1].strategy() == Strategy::FiniteDifference);
    const StrainState b = euler_strain(fd);
    const VectorField v = VectorField::symbolic({Y, X * Z, 0.5 * X});
    const FieldMat3 ra = deformation_rate(a, v);
    const FieldMat3 rb = deformation_rate(b, v);
    for (const Point& p : pts) {
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                CHECK(std::abs(at(a.strain[i][j], p) - at(b.strain[i][j], p)) <= 1e-12);
                CHECK(std::abs(at(ra[i][j], p) - at(rb[i][j], p)) <= 1e-7);
            }
        }
    }
}

TEST_CASE("singular deformations and Newton failures are reported")
{
    const std::vector<Point> origin{Point{}};
    CHECK_THROWS_AS(deformation_gradients(DeformationMap::from_inverse({X, Y, Expr(0.0)}), origin), SingularDeformation);
    CHECK_THROWS_AS(deformation_gradients(DeformationMap::from_inverse({X * X * X, Y, Z}), origin), SingularDeformation);
    CHECK_NOTHROW(deformation_gradients(DeformationMap::from_inverse({X * X * X, Y, Z}), std::vector<Point>{{0.5, 0, 0, 0}}));
    CHECK_THROWS_AS(deformation_gradients(DeformationMap::from_forward({X * X * X, Y, Z}), origin), SingularDeformation);

    // sin X never reaches 2, so the iteration cannot converge.
    const DeformationMap unreachable = DeformationMap::from_forward({sym::sin(X), Y, Z});
    CHECK_THROWS_AS(unreachable.body_point({2.0, 0.0, 0.0, 0.0}), NewtonFailure);
    const DeformationGradients g = deformation_gradients(unreachable);
    CHECK_THROWS_AS(g.pullback[0][0]({2.0, 0.0, 0.0, 0.0}), NewtonFailure);
    CHECK(at(g.pullback[0][0], {0.5, 0.0, 0.0, 0.0}) == doctest::Approx(std::cos(std::asin(0.5))).epsilon(1e-12));

    CHECK_THROWS_AS(DeformationMap::from_inverse({X, Y, Z}, Strategy::ExactUserSupplied), InvalidArgument);
}

TEST_CASE("Newton inversion converges on a strongly nonlinear forward map")
{
    Rng rng(506);
    const DeformationMap map = DeformationMap::from_forward({X + 0.45 * sym::sin(2.0 * X) + 0.2 * Y, Y + 0.3 * Z * Z * Z, Z + 0.1 * X});
    for (const Point& p : rng.points(30, 2.0)) {
        const auto body = map.body_point(p);
        const std::vector<double> back = Tape(map.expressions()).evaluate({body[0], body[1], body[2], p.t});
        CHECK(std::abs(back[0] - p.x) <= 1e-12 * std::max(1.0, std::abs(p.x)) * 2.0);
        CHECK(std::abs(back[1] - p.y) <= 1e-12 * 2.0 * std::max(1.0, std::abs(p.y)));
        CHECK(std::abs(back[2] - p.z) <= 1e-12 * 2.0 * std::max(1.0, std::abs(p.z)));
    }
}

TEST_CASE("small displacements: Euler strain converges quadratically to the linearized strain")
{
    Rng rng(507);
    const std::array<Expr, 3> u = random_vector(rng, 1.0);
    const auto pts = rng.points(20);
    double errors[2] = {0.0, 0.0};
    const double amplitudes[2] = {1e-3, 1e-4};
    for (int k = 0; k < 2; ++k) {
        const double eps = amplitudes[k];
        const DeformationMap map = DeformationMap::from_forward({X + eps * u[0], Y + eps * u[1], Z + eps * u[2]});
        const StrainState s = euler_strain(deformation_gradients(map, pts));
        for (const Point& p : pts) {
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) {
                    const double linear =
                        0.5 * eps * (stencil(u[static_cast<std::size_t>(b)], p, a) + stencil(u[static_cast<std::size_t>(a)], p, b));
                    errors[k] = std::max(errors[k], std::abs(at(s.strain[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], p) - linear));
                }
            }
        }
        CHECK(errors[k] <= 10.0 * eps * eps);
    }
    const double ratio = errors[0] / errors[1];
    INFO("error ratio " << ratio);
    CHECK(ratio >= 80.0);
    CHECK(ratio <= 120.0);
}

TEST_CASE("strain and stress are exactly symmetric; tau is sigma contracted with the dual basis")
{
    Rng rng(508);
    const auto pts = rng.points(10);
    const CoFrame e(rng.triad(0.2));
    const ExprVec3 map{X + 0.2 * Y * Y, Y + 0.1 * X * Z, Z - 0.15 * X * Y};
    const StrainState s = euler_strain(deformation_gradients(DeformationMap::from_inverse(map), pts));
    const StressState sigma = isotropic_stress(s, {2.0, 0.7, 0.0}, e);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            CHECK(s.strain[a][b].expression()[0] == s.strain[b][a].expression()[0]);
            CHECK(sigma.sigma[a][b].expression()[0] == sigma.sigma[b][a].expression()[0]);
        }
    }
    for (const Point& p : pts) {
        for (int a = 0; a < 3; ++a) {
            KForm expected(2);
            for (int b = 0; b < 3; ++b) {
                const KForm dual = hodge(basis_one_form<double>(FrameIndex(b + 1)));
                const double coefficient = at(sigma.sigma[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)], p);
                for (std::size_t i = 0; i < 3; ++i) expected[i] += coefficient * dual[i];
            }
            CHECK(testing_support::max_abs_diff(sigma.tau[static_cast<std::size_t>(a)](p), expected) <= 1e-14);
        }
    }
}

TEST_CASE("stiffness contraction agrees with the closed-form Hooke law")
{
    Rng rng(509);
    const auto pts = rng.points(20);
    for (int trial = 0; trial < 20; ++trial) {
        const MaterialConstants mat{rng.uniform(-1.0, 3.0), rng.uniform(0.1, 3.0), 0.0};
        StrainState s;
        s.strain = field_matrix(random_symmetric(rng, 1.0));
        const StressState closed = isotropic_stress(s, mat);
        const FieldMat3 brute = contract_stiffness(stiffness_tensor(mat), s);
        for (const Point& p : pts)
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b)
                    CHECK(std::abs(at(brute[a][b], p) - at(closed.sigma[a][b], p)) <= 1e-12);
    }

    MaterialConstants chiral;
    chiral.kappa = 0.5;
    StrainState zero;
    CHECK_THROWS_AS(isotropic_stress(zero, chiral), AnisotropyNotSupported);
    MaterialConstants soft;
    soft.mu = 0.0;
    CHECK_THROWS_AS(isotropic_stress(zero, soft), InvalidMaterial);

    // The κ term is antisymmetric in (c, d) and drops out against a symmetric strain.
    const auto c = stiffness_tensor(chiral);
    CHECK(c[27 * 0 + 9 * 1 + 3 * 0 + 1] == doctest::Approx(1.0 + 0.5));
    CHECK(c[27 * 0 + 9 * 1 + 3 * 1 + 0] == doctest::Approx(1.0 - 0.5));
}

TEST_CASE("mass conservation residual")
{
    Rng rng(510);
    const auto pts = rng.points(20, 0.5, true);
    CHECK(at(mass_conservation_residual(FormField::scalar(2.5), VectorField{}), pts[0]) == 0.0);

    const FormField decaying = FormField::scalar(sym::exp(-3.0 * T));
    const FormField r = mass_conservation_residual(decaying, VectorField::symbolic({X, Y, Z}));
    for (const Point& p : pts) CHECK(std::abs(at(r, p)) <= 1e-14);

    for (int trial = 0; trial < 10; ++trial) {
        const Expr rho = rng.polynomial(2, 1.0, true);
        const std::array<Expr, 3> v = random_vector(rng, 1.0, true);
        const FormField residual = mass_conservation_residual(FormField::scalar(rho), VectorField::symbolic(v));
        for (const Point& p : pts) {
            double oracle = stencil(rho, p, 3);
            for (int i = 0; i < 3; ++i) oracle += stencil(rho * v[static_cast<std::size_t>(i)], p, i);
            CHECK(std::abs(at(residual, p) - oracle) <= 1e-6);
        }
    }
}

TEST_CASE("Cauchy residual: static and hydrostatic equilibrium")
{
    Rng rng(511);
    const auto pts = rng.points(15);
    const FormField unit = FormField::scalar(1.0);
    const VectorField rest{};

    Mat3 constant_sigma{{{1.0, 0.2, -0.4}, {0.2, 3.0, 0.5}, {-0.4, 0.5, -2.0}}};
    FieldMat3 sigma;
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) sigma[a][b] = FormField::scalar(constant_sigma[a][b]);
    for (const FormField& r : cauchy_motion_residual(unit, rest, rest, make_stress(sigma)))
        for (const Point& p : pts) CHECK(r(p)[0] == 0.0);

    const VectorField gravity = VectorField::symbolic({1.0, 1.0, 1.0});
    auto hydrostatic = [&](const Expr& pressure) {
        FieldMat3 s;
        for (std::size_t a = 0; a < 3; ++a)
            for (std::size_t b = 0; b < 3; ++b) s[a][b] = FormField::scalar(a == b ? -pressure : Expr(0.0));
        return cauchy_motion_residual(unit, rest, gravity, make_stress(s));
    };
    // ∇·σ + f = 0 with σ = −p δ needs ∇p = f.
    for (const FormField& r : hydrostatic(X + Y + Z))
        for (const Point& p : pts) CHECK(std::abs(r(p)[0]) <= 1e-14);
    // The opposite pressure doubles the body force instead of balancing it.
    for (const FormField& r : hydrostatic(-(X + Y + Z)))
        for (const Point& p : pts) CHECK(r(p)[0] == doctest::Approx(-2.0));
}

TEST_CASE("Cauchy residual matches a component-wise stencil in Cartesian coordinates")
{
    Rng rng(512);
    const auto pts = rng.points(10, 0.5, true);
    for (int trial = 0; trial < 5; ++trial) {
        const Expr rho = 1.5 + rng.polynomial(2, 0.3, true);
        const auto v = random_vector(rng, 1.0, true);
        const auto f = random_vector(rng, 1.0, true);
        const ExprMat3 s = random_symmetric(rng, 1.0, true);
        const auto residual = cauchy_motion_residual(FormField::scalar(rho), VectorField::symbolic(v),
                                                     VectorField::symbolic(f), make_stress(field_matrix(s)));
        for (const Point& p : pts) {
            for (std::size_t a = 0; a < 3; ++a) {
                double transport = stencil(v[a], p, 3);
                double divergence = 0.0;
                for (std::size_t i = 0; i < 3; ++i) {
                    transport += evaluate(v[i], p) * stencil(v[a], p, static_cast<int>(i));
                    divergence += stencil(s[a][i], p, static_cast<int>(i));
                }
                const double oracle = evaluate(rho, p) * (transport - evaluate(f[a], p)) - divergence;
                CHECK(std::abs(residual[a](p)[0] - oracle) <= 1e-5);
            }
        }
    }
}

TEST_CASE("Cauchy residual transforms as a vector under a position-dependent rotation")
{
    Rng rng(513);
    const auto pts = rng.points(10, 0.5, true);
    const Expr theta = 0.4 * (X + Y * Y) - 0.3 * Z;
    const Expr c = sym::cos(theta), s = sym::sin(theta);
    const ExprMat3 rotation{{{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}}};
    const CoFrame e(rotation);

    const Expr rho = 1.0 + rng.polynomial(2, 0.3, true);
    const auto v = random_vector(rng, 1.0, true);
    const auto f = random_vector(rng, 1.0, true);
    const ExprMat3 sigma = random_symmetric(rng, 1.0, true);

    auto rotate = [&](const std::array<Expr, 3>& w) {
        std::array<Expr, 3> out;
        for (std::size_t a = 0; a < 3; ++a) out[a] = rotation[a][0] * w[0] + rotation[a][1] * w[1] + rotation[a][2] * w[2];
        return out;
    };
    ExprMat3 sigma_frame;
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            Expr sum;
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j) sum = sum + rotation[a][i] * sigma[i][j] * rotation[b][j];
            sigma_frame[a][b] = sum;
        }
    }

    const auto cartesian = cauchy_motion_residual(FormField::scalar(rho), VectorField::symbolic(v),
                                                  VectorField::symbolic(f), make_stress(field_matrix(sigma)));
    const auto framed = cauchy_motion_residual(FormField::scalar(rho), VectorField::symbolic(rotate(v)),
                                               VectorField::symbolic(rotate(f)),
                                               make_stress(field_matrix(sigma_frame), e), e);
    for (const Point& p : pts) {
        for (std::size_t a = 0; a < 3; ++a) {
            double expected = 0.0;
            for (std::size_t b = 0; b < 3; ++b) expected += evaluate(rotation[a][b], p) * cartesian[b](p)[0];
            CHECK(std::abs(framed[a](p)[0] - expected) <= 1e-12);
        }
    }
}

TEST_CASE("volume relation holds for polynomial maps and curved spatial coframes")
{
    Rng rng(514);
    const auto pts = rng.points(20);
    for (int trial = 0; trial < 10; ++trial) {
        const auto u = random_vector(rng, 0.15);
        const DeformationGradients g = deformation_gradients(DeformationMap::from_inverse({X + u[0], Y + u[1], Z + u[2]}), pts);
        const CoFrame e(rng.triad(0.2));
        const FormField flat = volume_relation_residual(g);
        const FormField curved = volume_relation_residual(g, e);
        for (const Point& p : pts) {
            CHECK(std::abs(at(flat, p)) <= 1e-8);
            CHECK(std::abs(at(curved, p)) <= 1e-8);
        }
    }
}

TEST_CASE("orthonormal pullback sandwiches the coordinate gradient between the triads")
{
    Rng rng(515);
    const auto pts = rng.points(10);
    const DeformationMap map = DeformationMap::from_inverse({X + 0.2 * Y * Z, Y - 0.1 * X, Z + 0.1 * X * X});
    const DeformationGradients g = deformation_gradients(map, pts);
    const ExprMat3 identity_triad{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    const ExprMat3 spatial = rng.triad(0.2);
    const ExprMat3 body = rng.triad(0.2);
    const CoFrame e(spatial);
    for (const Point& p : pts) {
        const Mat3 plain = orthonormal_pullback(map, CoFrame(), identity_triad, p);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(plain[i][j] - at(g.pullback[i][j], p)) <= 1e-14);

        // det(h F̂ H⁻¹) = det h · det F̂ / det H with H read at the body point.
        const auto bp = map.body_point(p);
        Mat3 h_body{};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j) h_body[i][j] = evaluate(body[i][j], {bp[0], bp[1], bp[2], p.t});
        const double expected = det3(e.frame()->at(p).triad) * det3(plain) / det3(h_body);
        CHECK(det3(orthonormal_pullback(map, e, body, p)) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("deformation rate")
{
    Rng rng(516);
    const auto pts = rng.points(10, 0.5, true);

    StrainState fixed;
    fixed.strain = field_matrix(random_symmetric(rng, 1.0));
    const FieldMat3 still = deformation_rate(fixed, VectorField{});
    CHECK(max_diff(still, Mat3{}, pts) == 0.0);

    StrainState growing;
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) growing.strain[a][b] = FormField::scalar(a == b ? T : Expr(0.0));
    CHECK(max_diff(deformation_rate(growing, VectorField{}), identity3(), pts) == 0.0);

    // Flow oracle: (φ_ε^* 𝕖 − φ_{−ε}^* 𝕖) / 2ε with φ_ε(x, t) = (x + εv, t + ε).
    const double eps = 1e-5;
    for (int trial = 0; trial < 5; ++trial) {
        const ExprMat3 strain = random_symmetric(rng, 1.0, true);
        const auto v = random_vector(rng, 1.0, true);
        StrainState s;
        s.strain = field_matrix(strain);
        const FieldMat3 rate = deformation_rate(s, VectorField::symbolic(v));
        for (const Point& p : pts) {
            auto pulled = [&](double sign) {
                const double h = sign * eps;
                const Point moved{p.x + h * evaluate(v[0], p), p.y + h * evaluate(v[1], p), p.z + h * evaluate(v[2], p), p.t + h};
                Mat3 jac{};  // ∂_a φ^c
                for (int a = 0; a < 3; ++a)
                    for (int c = 0; c < 3; ++c)
                        jac[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] =
                            (a == c ? 1.0 : 0.0) + h * stencil(v[static_cast<std::size_t>(c)], p, a);
                Mat3 out{};
                for (std::size_t a = 0; a < 3; ++a)
                    for (std::size_t b = 0; b < 3; ++b)
                        for (std::size_t c = 0; c < 3; ++c)
                            for (std::size_t d = 0; d < 3; ++d) out[a][b] += evaluate(strain[c][d], moved) * jac[a][c] * jac[b][d];
                return out;
            };
            const Mat3 forward = pulled(1.0);
            const Mat3 backward = pulled(-1.0);
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = 0; b < 3; ++b)
                    CHECK(std::abs(at(rate[a][b], p) - (forward[a][b] - backward[a][b]) / (2.0 * eps)) <= 1e-3);
        }
    }
}

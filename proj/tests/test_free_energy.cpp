#include "doctest.h"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>

#include "defectgeo/errors.hpp"
#include "defectgeo/free_energy.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace defectgeo;
using testing_support::Rng;

namespace {

nlohmann::json regression()
{
    std::ifstream in(DEFECTGEO_TEST_DATA "/regression.json");
    return nlohmann::json::parse(in);
}

double at(const FormField& f, const Point& p) { return f(p)[0]; }

FormField one_form(const CoFrame& e, double a, double b, double c) { return e.one_form({a, b, c}); }

DefectFields random_defects(Rng& rng, const CoFrame& e, double scale = 0.5)
{
    const auto f = [&] { return e.field(rng.symbolic_form(1, 2, scale)); };
    return make_defect_fields(f(), f(), f(), e.scalar(rng.polynomial(2, scale)));
}

Couplings random_couplings(Rng& rng)
{
    Couplings k;
    for (double& v : k.kappa) v = rng.uniform(-2.0, 2.0);
    return k;
}

Couplings only(int index, double value = 1.0)
{
    Couplings k;
    k.kappa[static_cast<std::size_t>(index - 1)] = value;
    return k;
}

DefectFields combine(const DefectFields& a, const DefectFields& b, double sign)
{
    return make_defect_fields(a.burgers + sign * b.burgers, a.frank + sign * b.frank, a.point + sign * b.point,
                              a.scalar + sign * b.scalar);
}

std::vector<double> as_vector(const MappedCouplings& m)
{
    return {m.k1, m.k2, m.k3, m.c1, m.c2, m.c3, m.c4, m.c5, m.l1, m.l2, m.l3};
}

}  // namespace

TEST_CASE("Lagrangian examples")
{
    Rng rng(601);
    const auto pts = rng.points(10);
    const CoFrame flat;
    const FormField zero1 = FormField::zero(1);
    const DefectFields none = make_defect_fields(zero1, zero1, zero1, FormField::scalar(0.0));
    const Couplings k = random_couplings(rng);
    for (const Point& p : pts) {
        CHECK(at(lagrangian_form(none, k, flat), p) == 0.0);
        CHECK(at(lagrangian_vector(none, k), p) == 0.0);
    }

    const CoFrame curved(rng.triad(0.2));
    const FormField e1 = basis_field(0, curved.frame());
    const FormField zero_curved = FormField::zero(1, curved.frame());
    const DefectFields unit_b = make_defect_fields(e1, zero_curved, zero_curved, FormField::scalar(0.0));
    for (const Point& p : pts) CHECK(at(lagrangian_form(unit_b, only(1), curved), p) == doctest::Approx(1.0).epsilon(1e-14));

    const FormField x1 = one_form(flat, 1.0, 0.0, 0.0);
    const DefectFields aligned = make_defect_fields(x1, x1, zero1, FormField::scalar(0.0));
    const DefectFields scalar_only = make_defect_fields(zero1, zero1, zero1, FormField::scalar(2.0));
    for (const Point& p : pts) {
        CHECK(at(lagrangian_vector(aligned, only(6)), p) == 1.0);
        CHECK(at(lagrangian_vector(scalar_only, only(2)), p) == 4.0);
        CHECK(at(lagrangian_form(scalar_only, only(2), flat), p) == 4.0);
    }
}

TEST_CASE("exterior and vector forms of the Lagrangian agree on random draws")
{
    Rng rng(602);
    const auto pts = rng.points(5);
    for (int draw = 0; draw < 100; ++draw) {
        const CoFrame e = draw % 2 == 0 ? CoFrame() : CoFrame(rng.triad(0.2));
        const DefectFields d = random_defects(rng, e);
        const Couplings k = random_couplings(rng);
        const FormField form = lagrangian_form(d, k, e);
        const FormField vec = lagrangian_vector(d, k);
        for (const Point& p : pts) CHECK(std::abs(at(form, p) - at(vec, p)) <= 1e-12);
    }
}

TEST_CASE("the Lagrangian is a quadratic form: polarization identity")
{
    Rng rng(603);
    const auto pts = rng.points(10);
    for (int trial = 0; trial < 20; ++trial) {
        const CoFrame e(rng.triad(0.2));
        const DefectFields d1 = random_defects(rng, e);
        const DefectFields d2 = random_defects(rng, e);
        const Couplings k = random_couplings(rng);
        const FormField sum = lagrangian_vector(combine(d1, d2, 1.0), k);
        const FormField diff = lagrangian_vector(combine(d1, d2, -1.0), k);
        const FormField l1 = lagrangian_vector(d1, k);
        const FormField l2 = lagrangian_vector(d2, k);
        for (const Point& p : pts)
            CHECK(std::abs(at(sum, p) + at(diff, p) - 2.0 * at(l1, p) - 2.0 * at(l2, p)) <= 1e-12);
    }
}

TEST_CASE("standard terms are reflection invariant; the cross-product term is odd")
{
    Rng rng(604);
    // Fields as functions of the coordinates so they can be evaluated at x -> -x.
    using Builder = std::function<Expr(const Expr&, const Expr&, const Expr&)>;
    auto random_builder = [&] {
        std::array<double, 10> c{};
        for (double& v : c) v = rng.uniform(-1.0, 1.0);
        return Builder([c](const Expr& x, const Expr& y, const Expr& z) {
            return c[0] + c[1] * x + c[2] * y + c[3] * z + c[4] * x * x + c[5] * x * y + c[6] * y * z +
                   c[7] * z * z + c[8] * x * z + c[9] * y * y;
        });
    };
    std::array<std::array<Builder, 3>, 3> vectors;  // b, Ω, m
    for (auto& v : vectors)
        for (auto& comp : v) comp = random_builder();
    const Builder rho = random_builder();

    const Expr x = Expr::x(), y = Expr::y(), z = Expr::z();
    auto fields = [&](bool reflected) {
        // v'(p) = R v(Rp) with R = diag(−1, 1, 1).
        const Expr xs = reflected ? -x : x;
        auto vector = [&](const std::array<Builder, 3>& v) {
            return FormField::symbolic(
                SymbolicForm(1, {reflected ? -v[0](xs, y, z) : v[0](xs, y, z), v[1](xs, y, z), v[2](xs, y, z)}));
        };
        return make_defect_fields(vector(vectors[0]), vector(vectors[1]), vector(vectors[2]),
                                  FormField::scalar(rho(xs, y, z)));
    };
    const DefectFields original = fields(false);
    const DefectFields mirrored = fields(true);
    const Couplings k = random_couplings(rng);
    const ParityTerm odd{true, 1.0};
    for (const Point& p : rng.points(20)) {
        const Point q{-p.x, p.y, p.z, p.t};
        CHECK(at(lagrangian_vector(mirrored, k), p) == doctest::Approx(at(lagrangian_vector(original, k), q)).epsilon(1e-13));
        const double standard = at(lagrangian_vector(original, k), q);
        const double cubic_original = at(lagrangian_vector(original, k, odd), q) - standard;
        const double cubic_mirrored = at(lagrangian_vector(mirrored, k, odd), p) - at(lagrangian_vector(mirrored, k), p);
        CHECK(std::abs(cubic_original) > 1e-6);
        CHECK(cubic_mirrored == doctest::Approx(-cubic_original).epsilon(1e-12));
    }
}

TEST_CASE("quadratic invariant expansions")
{
    Rng rng(605);
    const auto pts = rng.points(15);
    const auto reg = regression();

    const CoFrame flat;
    const FormField zero1 = FormField::zero(1);
    const TensorFormField no_t = reconstruct_torsion(zero1, FormField::scalar(0.0), nullptr);
    const TensorFormField no_q = reconstruct_nonmetricity(zero1, zero1, nullptr);
    for (const auto& r : measure(quadratic_invariants(no_t, no_q), pts)) {
        CHECK(r.deviation == 0.0);
        CHECK(r.scale == 0.0);
    }

    // b̃ = e^1: T∧*T = 1; on the right Σ T^a∧*T_a = ½ and the cross term adds ½.
    const FormField e1 = one_form(flat, 1.0, 0.0, 0.0);
    const auto pure_trace = quadratic_invariants(reconstruct_torsion(e1, FormField::scalar(0.0), nullptr), no_q);
    for (const Point& p : pts) {
        CHECK(pure_trace[0].lhs(p)[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(pure_trace[0].rhs(p)[0] == doctest::Approx(1.0).epsilon(1e-12));
    }

    // m̃ = e^1, Ω̃ = 0: Q_ab = ⅓δ_ab e^1, so P = 0 and the right side of P∧*Q is
    // ⅔|m|² − ⅓ Σ_b |e^1∧e^b|² = ⅔ − ⅔, contracted here on raw components.
    const TensorFormField trace_q = reconstruct_nonmetricity(zero1, e1, nullptr);
    const auto pure_q = quadratic_invariants(no_t, trace_q);
    double oracle = 0.0;
    const KForm m = KForm::basis(1, 0);
    oracle += (2.0 / 3.0) * wedge(m, hodge(m))[0];
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            const KForm eb = KForm::basis(1, static_cast<std::size_t>(b));
            const KForm ea = KForm::basis(1, static_cast<std::size_t>(a));
            const KForm qab = a == b ? (1.0 / 3.0) * m : KForm(1);
            oracle -= wedge(wedge(m, eb), hodge(wedge(qab, ea)))[0];
        }
    }
    for (const Point& p : pts) {
        CHECK(std::abs(pure_q[3].lhs(p)[0]) <= 1e-15);
        CHECK(std::abs(pure_q[3].rhs(p)[0] - oracle) <= 1e-12);
        CHECK(std::abs(oracle) <= 1e-15);
    }

    // Restricted ansatz and generic tensors on curved coframes. (c) and (e) are
    // measured only; the frozen finding is that both close as well.
    const bool pp_holds = reg["invariant_pp_holds"].get<bool>();
    const bool tp_holds = reg["invariant_tp_holds"].get<bool>();
    for (int trial = 0; trial < 10; ++trial) {
        const CoFrame e(rng.triad(0.2));
        const DefectFields d = random_defects(rng, e);
        TensorFormField t, q;
        if (trial % 2 == 0) {
            t = reconstruct_torsion(d.burgers, d.scalar, e.frame());
            q = reconstruct_nonmetricity(d.frank, d.point, e.frame());
        } else {
            std::vector<FormField> tc, qc(9);
            for (int a = 0; a < 3; ++a) tc.push_back(e.field(rng.symbolic_form(2, 2, 0.5)));
            for (std::size_t a = 0; a < 3; ++a)
                for (std::size_t b = a; b < 3; ++b) qc[3 * a + b] = qc[3 * b + a] = e.field(rng.symbolic_form(1, 2, 0.5));
            t = TensorFormField({Slot::Up}, tc);
            q = TensorFormField({Slot::Down, Slot::Down}, qc);
        }
        for (const auto& r : measure(quadratic_invariants(t, q), pts)) {
            INFO(r.name << " deviation " << r.deviation << " scale " << r.scale);
            const double tolerance = 1e-12 * (1.0 + r.scale);
            if (r.asserted) {
                CHECK(r.deviation <= tolerance);
            } else if (r.name == "P*P") {
                CHECK((r.deviation <= tolerance) == pp_holds);
            } else {
                CHECK(r.name == "T*P");
                CHECK((r.deviation <= tolerance) == tp_holds);
            }
        }
    }
}

TEST_CASE("coupling map columns")
{
    CHECK(as_vector(map_couplings(only(1))) == std::vector<double>{1, 0, -1, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(as_vector(map_couplings(only(3))) ==
          std::vector<double>{0, 0, 0, 1, 0, -1, -5.0 / 9.0, 2.0 / 3.0, 0, 0, 0});
    CHECK(as_vector(map_couplings(only(6))) == std::vector<double>{0, 0, 0, 0, 0, 0, 0, 0, -1, -2.0 / 3.0, 1});
    CHECK(as_vector(map_couplings(only(2))) == std::vector<double>{0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0});
    CHECK(as_vector(map_couplings(only(4))) == std::vector<double>{0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0});
    CHECK(as_vector(map_couplings(only(5))) == std::vector<double>{0, 0, 0, 0, 0, 0, 2.0 / 3.0, -1, 0, 0, 0});
    CHECK(as_vector(map_couplings(only(7))) == std::vector<double>{0, 0, 0, 0, 0, 0, 0, 0, 0, -1, 0});

    Rng rng(606);
    for (int trial = 0; trial < 20; ++trial) {
        const Couplings a = random_couplings(rng), b = random_couplings(rng);
        const double s = rng.uniform(-2.0, 2.0), t = rng.uniform(-2.0, 2.0);
        Couplings mix;
        for (std::size_t i = 0; i < 7; ++i) mix.kappa[i] = s * a.kappa[i] + t * b.kappa[i];
        const auto lhs = as_vector(map_couplings(mix));
        const auto ma = as_vector(map_couplings(a)), mb = as_vector(map_couplings(b));
        for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == doctest::Approx(s * ma[i] + t * mb[i]).epsilon(1e-13));
        CHECK(map_couplings(mix).c2 == 0.0);
    }
}

TEST_CASE("dislocation energy coefficients")
{
    MaterialConstants mat;
    mat.shear_modulus = 4.0 * std::numbers::pi;
    mat.outer_radius = std::numbers::e;
    mat.core_radius = 1.0;
    CHECK(dislocation_energy_coefficient(DislocationKind::Screw, mat) == doctest::Approx(1.0).epsilon(1e-15));
    mat.poisson_ratio = 0.5;
    CHECK(dislocation_energy_coefficient(DislocationKind::Edge, mat) == doctest::Approx(2.0).epsilon(1e-15));

    Rng rng(607);
    for (int trial = 0; trial < 50; ++trial) {
        MaterialConstants m;
        m.shear_modulus = rng.uniform(0.1, 100.0);
        m.core_radius = rng.uniform(1e-3, 1.0);
        m.outer_radius = m.core_radius * rng.uniform(1.5, 1e4);
        m.poisson_ratio = rng.uniform(1e-3, 0.499);
        const double screw = dislocation_energy_coefficient(DislocationKind::Screw, m);
        const double edge = dislocation_energy_coefficient(DislocationKind::Edge, m);
        CHECK(std::abs(edge / screw - 1.0 / (1.0 - m.poisson_ratio)) <= 1e-12);
        CHECK(edge > screw);
    }

    MaterialConstants bad;
    bad.core_radius = 2.0;
    bad.outer_radius = 1.0;
    CHECK_THROWS_AS(dislocation_energy_coefficient(DislocationKind::Screw, bad), InvalidMaterial);
    bad = MaterialConstants{};
    bad.core_radius = 0.0;
    CHECK_THROWS_AS(dislocation_energy_coefficient(DislocationKind::Screw, bad), InvalidMaterial);
    bad = MaterialConstants{};
    bad.poisson_ratio = 0.0;
    CHECK_THROWS_AS(dislocation_energy_coefficient(DislocationKind::Edge, bad), InvalidMaterial);
    bad.poisson_ratio = 0.6;
    CHECK_THROWS_AS(dislocation_energy_coefficient(DislocationKind::Edge, bad), InvalidMaterial);
}

TEST_CASE("total free energy quadrature")
{
    const CoFrame flat;
    const FormField zero1 = FormField::zero(1);
    const Box unit{};
    CHECK(total_free_energy(make_defect_fields(zero1, zero1, zero1, FormField::scalar(0.0)), only(1), flat, unit, 4) ==
          0.0);
    const DefectFields constant_b =
        make_defect_fields(one_form(flat, 1.0, 0.0, 0.0), zero1, zero1, FormField::scalar(0.0));
    CHECK(total_free_energy(constant_b, only(1), flat, unit, 4) == doctest::Approx(1.0).epsilon(1e-14));

    const DefectFields ramp = make_defect_fields(zero1, zero1, zero1, FormField::scalar(Expr::x()));
    const double coarse = total_free_energy(ramp, only(2), flat, unit, 32);
    CHECK(std::abs(coarse - 1.0 / 3.0) <= 0.01 / 3.0);
    // Midpoint error for ∫x² is exactly −h²/12.
    CHECK(coarse == doctest::Approx(1.0 / 3.0 - 1.0 / (12.0 * 32.0 * 32.0)).epsilon(1e-12));
    const EnergyEstimate est = free_energy_estimate(ramp, only(2), flat, unit, 32);
    CHECK(est.coarse == coarse);
    CHECK(std::abs(est.fine - 1.0 / 3.0) <= 0.01 / 3.0);
    CHECK(std::abs(est.richardson - 1.0 / 3.0) <= 1e-12);
    CHECK(est.error == doctest::Approx(1.0 / (12.0 * 64.0 * 64.0)).epsilon(1e-6));

    // Curved coframe: the 3-form coefficient is weighted by det h.
    const CoFrame stretched(ExprMat3{{{2.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}});
    const DefectFields unit_rho =
        make_defect_fields(FormField::zero(1, stretched.frame()), FormField::zero(1, stretched.frame()),
                           FormField::zero(1, stretched.frame()), FormField::scalar(1.0));
    CHECK(total_free_energy(unit_rho, only(2), stretched, unit, 4) == doctest::Approx(2.0).epsilon(1e-14));

    Rng rng(608);
    const CoFrame e(rng.triad(0.2));
    const DefectFields d = random_defects(rng, e);
    const Couplings k = random_couplings(rng);
    const Box box{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
    CHECK(total_free_energy(d, k, e, box, 12, 1) == total_free_energy(d, k, e, box, 12, 3));

    CHECK_THROWS_AS(total_free_energy(ramp, only(2), flat, unit, 1), InvalidArgument);
    CHECK_THROWS_AS(total_free_energy(ramp, only(2), flat, Box{{0, 0, 0}, {1, 0, 1}}, 4), InvalidArgument);
}

#include "defectgeo/free_energy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "defectgeo/errors.hpp"
#include "parallel.hpp"

namespace defectgeo {

namespace {

FormField iota(int a, const FormField& f) { return interior(FrameIndex(a + 1), f); }

/// α ∧ *β.
FormField pair(const FormField& a, const FormField& b) { return wedge(a, hodge(b)); }

FormField volume(const FramePtr& frame) { return FormField::constant(KForm(3, {1.0}), frame); }

std::array<FormField, 3> components(const FormField& one_form)
{
    return {iota(0, one_form), iota(1, one_form), iota(2, one_form)};
}

FormField dot(const std::array<FormField, 3>& a, const std::array<FormField, 3>& b)
{
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

}  // namespace

FormField lagrangian_form(const DefectFields& d, const Couplings& k, const CoFrame& e)
{
    const FramePtr& frame = e.frame();
    const FormField t = rebase(d.burgers, frame);
    const FormField s = d.scalar * volume(frame);
    const FormField p = rebase(d.frank, frame);
    const FormField q = rebase(d.point, frame);
    return k(1) * pair(t, t) + k(2) * pair(s, s) + k(3) * pair(p, p) + k(4) * pair(q, q) + k(5) * pair(p, q) +
           k(6) * pair(t, p) + k(7) * pair(t, q);
}

FormField lagrangian_vector(const DefectFields& d, const Couplings& k, const ParityTerm& parity)
{
    const auto b = components(d.burgers);
    const auto w = components(d.frank);
    const auto m = components(d.point);
    const FormField& rho = d.scalar;
    FormField density = k(1) * dot(b, b) + k(2) * (rho * rho) + k(3) * dot(w, w) + k(4) * dot(m, m) +
                        k(5) * dot(w, m) + k(6) * dot(b, w) + k(7) * dot(b, m);
    if (parity.enabled) {
        const std::array<FormField, 3> cross{b[1] * w[2] - b[2] * w[1], b[2] * w[0] - b[0] * w[2],
                                             b[0] * w[1] - b[1] * w[0]};
        density = density + parity.coupling * dot(cross, m);
    }
    return density * volume(d.burgers.frame());
}

std::array<InvariantRelation, 6> quadratic_invariants(const TensorFormField& torsion,
                                                      const TensorFormField& nonmetricity)
{
    const TorsionTraces traces = torsion_traces(torsion);
    const NonmetricityPieces pieces = nonmetricity_pieces(nonmetricity);
    const FramePtr frame = torsion.frame();
    const FormField& t = traces.trace;
    const FormField& s = traces.scalar;
    const FormField& p = pieces.p;
    const FormField& q = pieces.trace;
    std::array<FormField, 3> e;
    for (int a = 0; a < 3; ++a) e[static_cast<std::size_t>(a)] = basis_field(a, frame);
    auto T = [&](int a) { return torsion(a); };
    auto Q = [&](int a, int b) { return nonmetricity(a, b); };
    auto E = [&](int a) { return e[static_cast<std::size_t>(a)]; };

    FormField tt_rhs = FormField::zero(3, frame);
    FormField ss_rhs = FormField::zero(3, frame);
    FormField pp_rhs = FormField::zero(3, frame);
    FormField pq_rhs = FormField::zero(3, frame);
    FormField tp_rhs = FormField::zero(3, frame);
    FormField tq_rhs = FormField::zero(3, frame);
    FormField trace_s = FormField::zero(3, frame);
    for (int a = 0; a < 3; ++a) {
        tt_rhs = tt_rhs + pair(T(a), T(a));
        trace_s = trace_s + wedge(T(a), E(a));
        for (int b = 0; b < 3; ++b) {
            tt_rhs = tt_rhs - pair(wedge(T(a), E(b)), wedge(T(b), E(a)));
            pp_rhs = pp_rhs + pair(Q(a, b), Q(a, b));
            for (int c = 0; c < 3; ++c) {
                pp_rhs = pp_rhs - pair(wedge(Q(a, b), E(c)), wedge(Q(a, c), E(b)));
                tp_rhs = tp_rhs - pair(wedge(Q(a, b), wedge(E(a), E(c))), wedge(T(c), E(b)));
            }
            const FormField qe = pair(wedge(q, E(b)), wedge(Q(a, b), E(a)));
            pp_rhs = pp_rhs + (2.0 / 3.0) * qe;
            pq_rhs = pq_rhs - qe;
            tp_rhs = tp_rhs + pair(wedge(Q(a, b), E(b)), T(a));
        }
        tp_rhs = tp_rhs - (2.0 / 3.0) * pair(wedge(q, E(a)), T(a));
        tq_rhs = tq_rhs - pair(wedge(q, E(a)), T(a));
    }
    ss_rhs = pair(trace_s, trace_s);
    pp_rhs = pp_rhs - (5.0 / 9.0) * pair(q, q);
    pq_rhs = pq_rhs + (2.0 / 3.0) * pair(q, q);

    return {{
        {"T*T", pair(t, t), tt_rhs, true},
        {"S*S", pair(s, s), ss_rhs, true},
        {"P*P", pair(p, p), pp_rhs, false},
        {"P*Q", pair(p, q), pq_rhs, true},
        {"T*P", pair(t, p), tp_rhs, false},
        {"T*Q", pair(t, q), tq_rhs, true},
    }};
}

std::array<InvariantDeviation, 6> measure(const std::array<InvariantRelation, 6>& relations,
                                          std::span<const Point> points)
{
    std::array<InvariantDeviation, 6> out;
    for (std::size_t i = 0; i < relations.size(); ++i) {
        out[i].name = relations[i].name;
        out[i].asserted = relations[i].asserted;
        for (const Point& p : points) {
            const double lhs = relations[i].lhs(p)[0];
            const double rhs = relations[i].rhs(p)[0];
            out[i].deviation = std::max(out[i].deviation, std::abs(lhs - rhs));
            out[i].scale = std::max(out[i].scale, std::abs(lhs));
        }
    }
    return out;
}

MappedCouplings map_couplings(const Couplings& k)
{
    MappedCouplings m;
    m.k1 = k(1);
    m.k2 = k(2);
    m.k3 = -k(1);
    m.c1 = k(3);
    m.c2 = 0.0;
    m.c3 = -k(3);
    m.c4 = -(5.0 / 9.0) * k(3) + k(4) + (2.0 / 3.0) * k(5);
    m.c5 = (2.0 / 3.0) * k(3) - k(5);
    m.l1 = -k(6);
    m.l2 = -(2.0 / 3.0) * k(6) - k(7);
    m.l3 = k(6);
    return m;
}

double dislocation_energy_coefficient(DislocationKind kind, const MaterialConstants& mat)
{
    if (!(mat.core_radius > 0.0) || !(mat.outer_radius > mat.core_radius))
        throw InvalidMaterial("need outer radius > core radius > 0");
    if (!(mat.shear_modulus > 0.0)) throw InvalidMaterial("shear modulus G must be positive");
    if (!(mat.poisson_ratio > 0.0 && mat.poisson_ratio <= 0.5))
        throw InvalidMaterial("Poisson ratio must lie in (0, 0.5]");
    const double screw =
        mat.shear_modulus / (4.0 * std::numbers::pi) * std::log(mat.outer_radius / mat.core_radius);
    return kind == DislocationKind::Screw ? screw : screw / (1.0 - mat.poisson_ratio);
}

double total_free_energy(const DefectFields& d, const Couplings& k, const CoFrame& e, const Box& box,
                         int resolution, unsigned threads)
{
    if (resolution < 2) throw InvalidArgument("free-energy quadrature needs at least 2 cells per axis");
    for (std::size_t i = 0; i < 3; ++i)
        if (!(box.max[i] > box.min[i])) throw InvalidArgument("empty integration box");

    const FormField lagrangian = lagrangian_form(d, k, e);
    const FramePtr& frame = e.frame();
    const int n = resolution;
    std::array<double, 3> h{};
    for (std::size_t i = 0; i < 3; ++i) h[i] = (box.max[i] - box.min[i]) / n;

    std::vector<double> slabs(static_cast<std::size_t>(n), 0.0);
    detail::parallel_for(n, threads, [&](int i) {
        double slab = 0.0;
        const double x = box.min[0] + (i + 0.5) * h[0];
        for (int j = 0; j < n; ++j) {
            const double y = box.min[1] + (j + 0.5) * h[1];
            for (int l = 0; l < n; ++l) {
                const Point p{x, y, box.min[2] + (l + 0.5) * h[2], 0.0};
                const double jacobian = frame ? frame->at(p).determinant : 1.0;
                slab += lagrangian(p)[0] * jacobian;
            }
        }
        slabs[static_cast<std::size_t>(i)] = slab * h[0] * h[1] * h[2];
    });
    return detail::ordered_sum(slabs);
}

EnergyEstimate free_energy_estimate(const DefectFields& d, const Couplings& k, const CoFrame& e, const Box& box,
                                    int resolution, unsigned threads)
{
    EnergyEstimate out;
    out.coarse = total_free_energy(d, k, e, box, resolution, threads);
    out.fine = total_free_energy(d, k, e, box, 2 * resolution, threads);
    out.richardson = (4.0 * out.fine - out.coarse) / 3.0;
    out.error = std::abs(out.fine - out.richardson);
    return out;
}

}  // namespace defectgeo

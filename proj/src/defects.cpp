#include "defectgeo/defects.hpp"

#include <cmath>
#include <random>

namespace defectgeo {

namespace {

FormField iota(int a, const FormField& f) { return interior(FrameIndex(a + 1), f); }

const std::vector<Slot> kDownDown{Slot::Down, Slot::Down};

/// Σ_c X_c e^c for 0-form coefficients X_c.
FormField combine(const std::array<FormField, 3>& coefficients, const FramePtr& frame)
{
    FormField out = FormField::zero(1, frame);
    for (int c = 0; c < 3; ++c) out = out + coefficients[static_cast<std::size_t>(c)] * basis_field(c, frame);
    return out;
}

FormField delta_times(int a, int b, const FormField& f)
{
    return a == b ? f : FormField::zero(f.degree(), f.frame());
}

/// (ι_a V) e_b + (ι_b V) e_a − ⅔ δ_ab V for a 1-form V.
TensorFormField symmetric_traceless_outer(const FormField& v, const FramePtr& frame)
{
    std::vector<FormField> out;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            out.push_back(iota(a, v) * basis_field(b, frame) + iota(b, v) * basis_field(a, frame) -
                          (2.0 / 3.0) * delta_times(a, b, v));
    return TensorFormField(kDownDown, std::move(out));
}

TensorFormField delta_tensor(const FormField& f)
{
    std::vector<FormField> out;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) out.push_back(delta_times(a, b, f));
    return TensorFormField(kDownDown, std::move(out));
}

FramePtr frame_of(const FormField& a, const FormField& b, const FramePtr& fallback)
{
    if (a.degree() > 0) return a.frame();
    if (b.degree() > 0) return b.frame();
    return fallback;
}

}  // namespace

DefectFields make_defect_fields(const FormField& burgers, const FormField& frank, const FormField& point,
                                const FormField& scalar, double c1, double c2)
{
    if (burgers.degree() != 1 || frank.degree() != 1 || point.degree() != 1) {
        throw DegreeMismatch("Burgers, Frank and point-defect densities are 1-forms");
    }
    if (scalar.degree() != 0) throw DegreeMismatch("the scalar defect density is a 0-form");
    return {burgers, frank, point, scalar, burgers + c1 * frank + c2 * point, c1, c2};
}

TorsionTraces torsion_traces(const TensorFormField& t)
{
    if (t.degree() != 2 || t.slots() != std::vector<Slot>{Slot::Up}) {
        throw InvalidArgument("torsion is a 2-form with one up slot");
    }
    FormField trace = FormField::zero(1, t.frame());
    FormField scalar = FormField::zero(3, t.frame());
    for (int a = 0; a < 3; ++a) {
        trace = trace + iota(a, t(a));
        scalar = scalar + wedge(basis_field(a, t.frame()), t(a));
    }
    return {trace, scalar};
}

TorsionPieces torsion_pieces(const TensorFormField& t)
{
    const TorsionTraces traces = torsion_traces(t);
    std::vector<FormField> p2, p3;
    for (int a = 0; a < 3; ++a) {
        p2.push_back(0.5 * wedge(basis_field(a, t.frame()), traces.trace));
        p3.push_back((1.0 / 3.0) * iota(a, traces.scalar));
    }
    TensorFormField piece2({Slot::Up}, std::move(p2));
    TensorFormField piece3({Slot::Up}, std::move(p3));
    TensorFormField piece1 = t - piece2 - piece3;
    return {std::move(piece1), std::move(piece2), std::move(piece3), traces.trace, traces.scalar};
}

FormField nonmetricity_trace(const TensorFormField& q)
{
    if (q.degree() != 1 || q.rank() != 2) throw InvalidArgument("non-metricity is a 1-form with two slots");
    return q(0, 0) + q(1, 1) + q(2, 2);
}

namespace {

TensorFormField traceless_part(const TensorFormField& q, const FormField& trace)
{
    return q.with_slots(kDownDown) - delta_tensor((1.0 / 3.0) * trace);
}

FormField p_trace(const TensorFormField& qbar)
{
    std::array<FormField, 3> coefficients;
    for (int b = 0; b < 3; ++b) {
        FormField acc = FormField::zero(0);
        for (int a = 0; a < 3; ++a) acc = acc + iota(a, qbar(a, b));
        coefficients[static_cast<std::size_t>(b)] = acc;
    }
    return combine(coefficients, qbar.frame());
}

}  // namespace

FormField frank_trace(const TensorFormField& q) { return p_trace(traceless_part(q, nonmetricity_trace(q))); }

NonmetricityPieces nonmetricity_pieces(const TensorFormField& q)
{
    const FramePtr frame = q.frame();
    const FormField trace = nonmetricity_trace(q);
    const TensorFormField qbar = traceless_part(q, trace);
    const FormField p = p_trace(qbar);

    std::vector<FormField> n;
    for (int a = 0; a < 3; ++a) {
        FormField acc = FormField::zero(2, frame);
        for (int b = 0; b < 3; ++b) acc = acc + wedge(qbar(a, b), basis_field(b, frame));
        n.push_back(acc);
    }
    TensorFormField n_tensor({Slot::Down}, std::move(n));

    std::vector<FormField> p2;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            p2.push_back((-1.0 / 3.0) *
                         (iota(a, n_tensor(b)) + iota(b, n_tensor(a)) - (2.0 / 3.0) * delta_times(a, b, p)));
    TensorFormField piece2(kDownDown, std::move(p2));
    TensorFormField piece3 = (2.0 / 15.0) * symmetric_traceless_outer(p, frame);
    TensorFormField piece4 = delta_tensor((1.0 / 3.0) * trace);
    TensorFormField piece1 = q.with_slots(kDownDown) - piece2 - piece3 - piece4;
    return {std::move(piece1), std::move(piece2), std::move(piece3), std::move(piece4), trace, qbar,
            std::move(n_tensor), p};
}

TensorFormField reconstruct_torsion(const FormField& burgers, const FormField& scalar, const FramePtr& frame)
{
    if (burgers.degree() != 1 || scalar.degree() != 0) {
        throw DegreeMismatch("torsion is rebuilt from a 1-form and a 0-form");
    }
    const FramePtr f = frame_of(burgers, scalar, frame);
    std::vector<FormField> t;
    for (int a = 0; a < 3; ++a) {
        const FormField ea = basis_field(a, f);
        t.push_back(0.5 * wedge(ea, burgers) + ((1.0 / 3.0) * scalar) * hodge(ea));
    }
    return TensorFormField({Slot::Up}, std::move(t));
}

TensorFormField reconstruct_nonmetricity(const FormField& frank, const FormField& point, const FramePtr& frame)
{
    if (frank.degree() != 1 || point.degree() != 1) {
        throw DegreeMismatch("non-metricity is rebuilt from two 1-forms");
    }
    const FramePtr f = frame_of(frank, point, frame);
    return 0.9 * symmetric_traceless_outer(frank, f) + delta_tensor((1.0 / 3.0) * point);
}

DefectFields extract_defects(const CoFrame& e, const Connection& omega, FrankMode mode, double c1, double c2)
{
    const TorsionTraces traces = torsion_traces(torsion(e, omega));
    const TensorFormField q = nonmetricity(omega);
    const FormField p = frank_trace(q);
    const FormField frank = mode == FrankMode::Literal ? (1.0 / kFrankScale) * p : p;
    return make_defect_fields(traces.trace, frank, nonmetricity_trace(q), hodge(traces.scalar), c1, c2);
}

Connection defect_connection(const CoFrame& e, const DefectFields& defects)
{
    const TensorFormField t = rebase(reconstruct_torsion(defects.burgers, defects.scalar, e.frame()), e.frame());
    const TensorFormField q = rebase(reconstruct_nonmetricity(defects.frank, defects.point, e.frame()), e.frame());
    return levi_civita(e) + defect_one_form(t, q).with_slots({Slot::Up, Slot::Down});
}

FrankCalibration calibrate_frank_scale(std::span<const Point> points, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    const auto random_component = [&] {
        return Expr(coeff(gen)) + coeff(gen) * Expr::x() + coeff(gen) * Expr::y() * Expr::z() +
               coeff(gen) * sym::sin(Expr::z());
    };
    const FormField frank = FormField::symbolic(SymbolicForm(1, {random_component(), random_component(), random_component()}));
    const FormField p = frank_trace(reconstruct_nonmetricity(frank, FormField::zero(1), nullptr));

    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    for (const Point& x : points) {
        const KForm omega = frank.evaluate(x);
        const KForm pv = p.evaluate(x);
        for (std::size_t i = 0; i < 3; ++i) {
            if (std::abs(omega[i]) < 1e-3) continue;
            const double ratio = pv[i] / omega[i];
            sum += ratio;
            sum_sq += ratio * ratio;
            ++n;
        }
    }
    FrankCalibration out;
    out.samples = n;
    if (n == 0) return out;
    out.mean = sum / static_cast<double>(n);
    out.stddev = std::sqrt(std::max(0.0, sum_sq / static_cast<double>(n) - out.mean * out.mean));
    return out;
}

}  // namespace defectgeo

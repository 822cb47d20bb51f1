#include "defectgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace defectgeo {

namespace {

std::size_t power3(int rank)
{
    std::size_t n = 1;
    for (int i = 0; i < rank; ++i) n *= 3;
    return n;
}

std::vector<int> unflatten(std::size_t flat, int rank)
{
    std::vector<int> idx(static_cast<std::size_t>(rank));
    for (int k = rank - 1; k >= 0; --k) {
        idx[static_cast<std::size_t>(k)] = static_cast<int>(flat % 3);
        flat /= 3;
    }
    return idx;
}

FormField iota(int a, const FormField& f) { return interior(FrameIndex(a + 1), f); }

ExprMat3 symbolic_inverse(const ExprMat3& h, Expr& det)
{
    det = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
          h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    ExprMat3 inv;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv[i][j] = (h[r0][c0] * h[r1][c1] - h[r0][c1] * h[r1][c0]) / det;
        }
    }
    return inv;
}

ExprMat3 symbolic_product(const ExprMat3& a, const ExprMat3& b)
{
    ExprMat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i][j] = c[i][j] + a[i][k] * b[k][j];
    return c;
}

}  // namespace

// --- TensorFormField ---------------------------------------------------------

TensorFormField::TensorFormField(std::vector<Slot> slots, std::vector<FormField> components)
    : slots_(std::move(slots)), components_(std::move(components))
{
    if (components_.size() != power3(rank())) {
        throw InvalidArgument("tensor of rank " + std::to_string(rank()) + " needs " +
                              std::to_string(power3(rank())) + " components");
    }
    degree_ = components_.front().degree();
    const FormField* framed = nullptr;
    for (const FormField& c : components_) {
        if (c.degree() != degree_) throw DegreeMismatch("tensor components must share one degree");
        if (c.degree() == 0) {
            if (!frame_ && c.frame()) frame_ = c.frame();
            continue;
        }
        if (!framed) {
            framed = &c;
        } else if (framed->frame() != c.frame()) {
            throw FrameMismatch("tensor components expressed in different frames");
        }
    }
    if (framed) frame_ = framed->frame();
}

TensorFormField TensorFormField::zero(std::vector<Slot> slots, int degree, const FramePtr& frame)
{
    const std::size_t n = power3(static_cast<int>(slots.size()));
    return TensorFormField(std::move(slots), std::vector<FormField>(n, FormField::zero(degree, frame)));
}

TensorFormField TensorFormField::delta(Slot first, Slot second, const FramePtr& frame)
{
    std::vector<FormField> c;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) c.push_back(FormField::constant(KForm(0, {a == b ? 1.0 : 0.0}), frame));
    return TensorFormField({first, second}, std::move(c));
}

TensorFormField TensorFormField::with_slots(std::vector<Slot> slots) const
{
    if (slots.size() != slots_.size()) throw InvalidArgument("slot count must not change");
    return TensorFormField(std::move(slots), components_);
}

std::size_t TensorFormField::flat(std::span<const int> index) const
{
    if (static_cast<int>(index.size()) != rank()) throw InvalidArgument("wrong number of tensor indices");
    std::size_t f = 0;
    for (int i : index) {
        if (i < 0 || i > 2) throw InvalidArgument("tensor index out of range: " + std::to_string(i));
        f = 3 * f + static_cast<std::size_t>(i);
    }
    return f;
}

namespace {

void require_compatible(const TensorFormField& a, const TensorFormField& b)
{
    if (a.slots() != b.slots()) throw InvalidArgument("tensor slot structures differ");
}

}  // namespace

TensorFormField operator+(const TensorFormField& a, const TensorFormField& b)
{
    require_compatible(a, b);
    std::vector<FormField> c;
    for (std::size_t i = 0; i < a.size(); ++i) c.push_back(a.components()[i] + b.components()[i]);
    return TensorFormField(a.slots(), std::move(c));
}

TensorFormField operator-(const TensorFormField& a, const TensorFormField& b)
{
    require_compatible(a, b);
    std::vector<FormField> c;
    for (std::size_t i = 0; i < a.size(); ++i) c.push_back(a.components()[i] - b.components()[i]);
    return TensorFormField(a.slots(), std::move(c));
}

TensorFormField operator*(double s, const TensorFormField& a)
{
    std::vector<FormField> c;
    for (const FormField& f : a.components()) c.push_back(s * f);
    return TensorFormField(a.slots(), std::move(c));
}

TensorFormField rebase(const TensorFormField& x, const FramePtr& frame)
{
    std::vector<FormField> c;
    for (const FormField& f : x.components()) c.push_back(rebase(f, frame));
    return TensorFormField(x.slots(), std::move(c));
}

// --- coframes and gauges --------------------------------------------------------

FormField basis_field(int a, const FramePtr& frame)
{
    return FormField::constant(KForm::basis(1, static_cast<std::size_t>(a)), frame);
}

CoFrame::CoFrame() : CoFrame([] {
    ExprMat3 id;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) id[i][j] = Expr(i == j ? 1.0 : 0.0);
    return id;
}())
{
}

CoFrame::CoFrame(const ExprMat3& triad, Strategy strategy, double step)
    : triad_(triad), frame_(Frame::make(triad)), strategy_(strategy), step_(step)
{
    if (strategy == Strategy::ExactUserSupplied) {
        throw InvalidArgument("a coframe is either symbolic or finite-difference");
    }
    for (int a = 0; a < 3; ++a) {
        SymbolicForm basis(1);
        basis[static_cast<std::size_t>(a)] = Expr(1.0);
        e_[static_cast<std::size_t>(a)] = field(basis);
    }
}

FormField CoFrame::field(const SymbolicForm& components) const
{
    FormField f = FormField::symbolic(components, frame_);
    if (strategy_ == Strategy::FiniteDifference) return f.as_finite_difference(step_);
    return f;
}

FormField CoFrame::one_form(const std::array<Expr, 3>& v) const { return field(SymbolicForm(1, {v[0], v[1], v[2]})); }

void CoFrame::validate(std::span<const Point> points) const
{
    if (!frame_) return;
    for (const Point& p : points) (void)frame_->at(p);
}

GaugeField::GaugeField(const ExprMat3& entries) : entries_(entries)
{
    Expr det;
    inverse_ = symbolic_inverse(entries_, det);
    std::vector<Expr> flat;
    for (const auto& row : entries_) flat.insert(flat.end(), row.begin(), row.end());
    tape_ = Tape(flat);
}

void GaugeField::validate(std::span<const Point> points) const
{
    double raw[9];
    for (const Point& p : points) {
        tape_.evaluate(p, raw);
        Mat3 m;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) m[i][j] = raw[3 * i + j];
        const double det = det3(m);
        if (!(std::abs(det) >= kSingularThreshold)) {
            std::ostringstream os;
            os.precision(17);
            os << "gauge determinant " << det << " at (" << p.x << ", " << p.y << ", " << p.z << ", " << p.t << ")";
            throw SingularGauge(os.str());
        }
    }
}

// --- connections and their field strengths ------------------------------------------

Connection levi_civita(const CoFrame& e)
{
    const FramePtr& frame = e.frame();
    std::array<FormField, 3> de;
    for (int c = 0; c < 3; ++c) de[static_cast<std::size_t>(c)] = exterior_derivative(e[c]);
    std::vector<FormField> gamma;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField acc = iota(a, de[static_cast<std::size_t>(b)]) - iota(b, de[static_cast<std::size_t>(a)]);
            for (int c = 0; c < 3; ++c) {
                acc = acc - iota(a, iota(b, de[static_cast<std::size_t>(c)])) * basis_field(c, frame);
            }
            gamma.push_back(-0.5 * acc);
        }
    }
    return Connection({Slot::Up, Slot::Down}, std::move(gamma));
}

TensorFormField torsion(const CoFrame& e, const Connection& omega)
{
    std::vector<FormField> t;
    for (int a = 0; a < 3; ++a) {
        FormField acc = exterior_derivative(e[a]);
        for (int b = 0; b < 3; ++b) acc = acc + wedge(omega(a, b), e[b]);
        t.push_back(acc);
    }
    return TensorFormField({Slot::Up}, std::move(t));
}

TensorFormField nonmetricity(const Connection& omega)
{
    std::vector<FormField> q;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) q.push_back(0.5 * (omega(a, b) + omega(b, a)));
    return TensorFormField({Slot::Down, Slot::Down}, std::move(q));
}

TensorFormField curvature(const Connection& omega)
{
    std::vector<FormField> r;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField acc = exterior_derivative(omega(a, b));
            for (int c = 0; c < 3; ++c) acc = acc + wedge(omega(a, c), omega(c, b));
            r.push_back(acc);
        }
    }
    return TensorFormField({Slot::Up, Slot::Down}, std::move(r));
}

Connection pure_gauge(const GaugeField& gauge, const CoFrame& e)
{
    std::array<std::array<FormField, 3>, 3> d_lambda;
    for (int c = 0; c < 3; ++c)
        for (int b = 0; b < 3; ++b) d_lambda[c][b] = exterior_derivative(e.scalar(gauge.entries()[c][b]));
    std::vector<FormField> omega;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField acc = FormField::zero(1, e.frame());
            for (int c = 0; c < 3; ++c) acc = acc + e.scalar(gauge.inverse()[a][c]) * d_lambda[c][b];
            omega.push_back(acc);
        }
    }
    return Connection({Slot::Up, Slot::Down}, std::move(omega));
}

TensorFormField covariant_exterior_derivative(const TensorFormField& x, const Connection& omega)
{
    const int rank = x.rank();
    std::vector<FormField> out;
    for (std::size_t f = 0; f < x.size(); ++f) {
        const std::vector<int> idx = unflatten(f, rank);
        FormField acc = exterior_derivative(x.components()[f]);
        for (int s = 0; s < rank; ++s) {
            for (int c = 0; c < 3; ++c) {
                std::vector<int> moved = idx;
                moved[static_cast<std::size_t>(s)] = c;
                const FormField& xc = x.at(moved);
                const int i = idx[static_cast<std::size_t>(s)];
                if (x.slots()[static_cast<std::size_t>(s)] == Slot::Up) {
                    acc = acc + wedge(omega(i, c), xc);
                } else {
                    acc = acc - wedge(omega(c, i), xc);
                }
            }
        }
        out.push_back(acc);
    }
    return TensorFormField(x.slots(), std::move(out));
}

TensorFormField defect_one_form(const TensorFormField& t, const TensorFormField& q)
{
    const FramePtr frame = t.frame() ? t.frame() : q.frame();
    std::vector<FormField> l;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField contortion = iota(a, t(b)) - iota(b, t(a));
            FormField disformation = q(a, b);
            for (int c = 0; c < 3; ++c) {
                const FormField ec = basis_field(c, frame);
                contortion = contortion - iota(a, iota(b, t(c))) * ec;
                disformation = disformation + (iota(b, q(a, c)) - iota(a, q(b, c))) * ec;
            }
            l.push_back(0.5 * contortion + disformation);
        }
    }
    return TensorFormField({Slot::Down, Slot::Down}, std::move(l));
}

TensorFormField curvature_wedge_coframe(const TensorFormField& r, const FramePtr& frame)
{
    std::vector<FormField> out;
    for (int a = 0; a < 3; ++a) {
        FormField acc = FormField::zero(3, frame);
        for (int b = 0; b < 3; ++b) acc = acc + wedge(r(a, b), basis_field(b, frame));
        out.push_back(acc);
    }
    return TensorFormField({Slot::Up}, std::move(out));
}

BianchiResiduals bianchi_residuals(const CoFrame& e, const Connection& omega)
{
    const TensorFormField r = curvature(omega);
    const TensorFormField t = torsion(e, omega);
    const TensorFormField q = nonmetricity(omega);
    std::vector<FormField> r_sym;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) r_sym.push_back(0.5 * (r(a, b) + r(b, a)));
    return {
        covariant_exterior_derivative(r, omega),
        covariant_exterior_derivative(t, omega) - curvature_wedge_coframe(r, e.frame()),
        covariant_exterior_derivative(q, omega) - TensorFormField({Slot::Down, Slot::Down}, std::move(r_sym)),
    };
}

TensorFormField curvature_decomposition_residual(const CoFrame& e, const TensorFormField& t,
                                                 const TensorFormField& q)
{
    const Connection gamma = levi_civita(e);
    const Connection l = defect_one_form(t, q).with_slots({Slot::Up, Slot::Down});
    const TensorFormField full = curvature(gamma + l);
    const TensorFormField riemann = curvature(gamma);
    const TensorFormField dl = covariant_exterior_derivative(l, gamma);
    std::vector<FormField> ll;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField acc = FormField::zero(2, e.frame());
            for (int c = 0; c < 3; ++c) acc = acc + wedge(l(a, c), l(c, b));
            ll.push_back(acc);
        }
    }
    return full - (riemann + dl + TensorFormField({Slot::Up, Slot::Down}, std::move(ll)));
}

TransformedGeometry frame_transform(const GaugeField& h, const CoFrame& e, const Connection& omega,
                                    const std::vector<TensorFormField>& tensors)
{
    CoFrame transformed(symbolic_product(h.entries(), e.triad()), e.strategy(), e.step());
    std::array<std::array<FormField, 3>, 3> hm, hinv;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            hm[i][j] = e.scalar(h.entries()[i][j]);
            hinv[i][j] = e.scalar(h.inverse()[i][j]);
        }
    }
    const FramePtr& target = transformed.frame();

    std::vector<FormField> w;
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            FormField acc = FormField::zero(1, e.frame());
            for (int c = 0; c < 3; ++c) {
                for (int d = 0; d < 3; ++d) acc = acc + (hm[a][c] * hinv[d][b]) * omega(c, d);
                acc = acc + hm[a][c] * exterior_derivative(hinv[c][b]);
            }
            w.push_back(rebase(acc, target));
        }
    }

    std::vector<TensorFormField> out;
    for (const TensorFormField& x : tensors) {
        const int rank = x.rank();
        std::vector<FormField> comps;
        for (std::size_t f = 0; f < x.size(); ++f) {
            const std::vector<int> idx = unflatten(f, rank);
            FormField acc = FormField::zero(x.degree(), e.frame());
            for (std::size_t g = 0; g < x.size(); ++g) {
                const std::vector<int> src = unflatten(g, rank);
                FormField coefficient = FormField::scalar(Expr(1.0));
                for (int s = 0; s < rank; ++s) {
                    const auto k = static_cast<std::size_t>(s);
                    coefficient = coefficient * (x.slots()[k] == Slot::Up ? hm[idx[k]][src[k]] : hinv[src[k]][idx[k]]);
                }
                acc = acc + coefficient * x.components()[g];
            }
            comps.push_back(rebase(acc, target));
        }
        out.push_back(TensorFormField(x.slots(), std::move(comps)));
    }
    return {transformed, Connection({Slot::Up, Slot::Down}, std::move(w)), std::move(out)};
}

// --- measurement ---------------------------------------------------------------------

double normalized_residual(const TensorFormField& residual, const std::vector<TensorFormField>& references,
                           std::span<const Point> points)
{
    std::vector<FormField> fields = residual.components();
    const std::size_t n_residual = fields.size();
    for (const TensorFormField& r : references)
        fields.insert(fields.end(), r.components().begin(), r.components().end());
    const FieldBatch batch(std::move(fields));
    double worst = 0.0;
    for (const Point& p : points) {
        const auto values = batch.evaluate(p);
        double num = 0.0, ref = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            (i < n_residual ? num : ref) = std::max(i < n_residual ? num : ref, max_abs(values[i]));
        }
        worst = std::max(worst, num / (1.0 + ref));
    }
    return worst;
}

double max_norm(const TensorFormField& x, std::span<const Point> points)
{
    const FieldBatch batch(x.components());
    double worst = 0.0;
    for (const Point& p : points)
        for (const KForm& v : batch.evaluate(p)) worst = std::max(worst, max_abs(v));
    return worst;
}

}  // namespace defectgeo

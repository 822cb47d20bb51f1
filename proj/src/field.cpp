#include "defectgeo/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace defectgeo {

// --- 3x3 helpers -------------------------------------------------------------

Mat3 identity3()
{
    Mat3 m{};
    for (int i = 0; i < 3; ++i) m[i][i] = 1.0;
    return m;
}

double det3(const Mat3& m)
{
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse3(const Mat3& m, double& det, bool& ok)
{
    det = det3(m);
    ok = std::abs(det) >= kSingularThreshold && std::isfinite(det);
    Mat3 inv{};
    if (!ok) return inv;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inv[i][j] = (m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]) / det;
        }
    }
    return inv;
}

Mat3 multiply3(const Mat3& a, const Mat3& b)
{
    Mat3 c{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
    return c;
}

namespace {

int bit_position(unsigned mask, int which)
{
    int seen = 0;
    for (int i = 0; i < 3; ++i) {
        if ((mask >> i) & 1u) {
            if (seen == which) return i;
            ++seen;
        }
    }
    return 0;
}

template <class T>
T minor_of(const std::array<std::array<T, 3>, 3>& a, unsigned rows, unsigned cols)
{
    const int p = detail::popcount3(rows);
    if (p == 1) return a[bit_position(rows, 0)][bit_position(cols, 0)];
    if (p == 2) {
        const int r0 = bit_position(rows, 0), r1 = bit_position(rows, 1);
        const int c0 = bit_position(cols, 0), c1 = bit_position(cols, 1);
        return a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0];
    }
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

}  // namespace

template <class T>
BasicKForm<T> induced_transform(const std::array<std::array<T, 3>, 3>& a, const BasicKForm<T>& form)
{
    const int p = form.degree();
    if (p == 0) return form;
    BasicKForm<T> out(p);
    const auto& masks = detail::kBasisMask[static_cast<std::size_t>(p)];
    for (std::size_t j = 0; j < form.size(); ++j) {
        T acc(0.0);
        for (std::size_t i = 0; i < form.size(); ++i) acc = acc + form[i] * minor_of(a, masks[i], masks[j]);
        out[j] = acc;
    }
    return out;
}

template KForm induced_transform<double>(const Mat3&, const KForm&);
template SymbolicForm induced_transform<Expr>(const ExprMat3&, const SymbolicForm&);

// --- Frame -------------------------------------------------------------------

Frame::Frame(const ExprMat3& triad) : triad_(triad)
{
    const auto& h = triad_;
    det_ = h[0][0] * (h[1][1] * h[2][2] - h[1][2] * h[2][1]) - h[0][1] * (h[1][0] * h[2][2] - h[1][2] * h[2][0]) +
           h[0][2] * (h[1][0] * h[2][1] - h[1][1] * h[2][0]);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int r0 = (j + 1) % 3, r1 = (j + 2) % 3;
            const int c0 = (i + 1) % 3, c1 = (i + 2) % 3;
            inverse_[i][j] = (h[r0][c0] * h[r1][c1] - h[r0][c1] * h[r1][c0]) / det_;
        }
    }
    std::vector<Expr> entries;
    for (const auto& row : triad_) entries.insert(entries.end(), row.begin(), row.end());
    tape_ = Tape(entries);
}

FramePtr Frame::make(const ExprMat3& triad)
{
    bool identity = true;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) identity = identity && triad[i][j].is_constant(i == j ? 1.0 : 0.0);
    if (identity) return nullptr;
    return FramePtr(new Frame(triad));
}

TriadValue Frame::at(const Point& p) const
{
    double raw[9];
    tape_.evaluate(p, raw);
    TriadValue v{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v.triad[i][j] = raw[3 * i + j];
    bool ok = false;
    v.inverse = inverse3(v.triad, v.determinant, ok);
    if (!ok) {
        std::ostringstream os;
        os.precision(17);
        os << "triad determinant " << v.determinant << " at (" << p.x << ", " << p.y << ", " << p.z << ", " << p.t
           << ")";
        throw SingularTriad(os.str());
    }
    return v;
}

KForm to_coordinates(const FramePtr& frame, const KForm& form, const Point& p)
{
    if (!frame || form.degree() == 0) return form;
    return induced_transform(frame->at(p).triad, form);
}

KForm from_coordinates(const FramePtr& frame, const KForm& form, const Point& p)
{
    if (!frame || form.degree() == 0) return form;
    return induced_transform(frame->at(p).inverse, form);
}

SymbolicForm to_coordinates(const FramePtr& frame, const SymbolicForm& form)
{
    if (!frame || form.degree() == 0) return form;
    return induced_transform(frame->triad(), form);
}

SymbolicForm from_coordinates(const FramePtr& frame, const SymbolicForm& form)
{
    if (!frame || form.degree() == 0) return form;
    return induced_transform(frame->inverse(), form);
}

// --- FormField ---------------------------------------------------------------

struct FormField::Impl {
    int degree = 0;
    FramePtr frame;
    Strategy strategy = Strategy::Symbolic;
    double step = kDefaultStep;
    int depth = 0;
    bool degenerate = false;
    SymbolicForm expression;
    Evaluator evaluate;
    PartialEvaluator partial;

    mutable std::once_flag compiled;
    mutable std::unique_ptr<Tape> tape;
};

namespace {

void check_step(double step)
{
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw InvalidArgument("finite-difference step must be positive");
    }
}

}  // namespace

FormField::FormField() : FormField(symbolic(SymbolicForm(0))) {}

FormField FormField::symbolic(SymbolicForm components, FramePtr frame)
{
    auto impl = std::make_shared<Impl>();
    impl->degree = components.degree();
    impl->frame = std::move(frame);
    impl->expression = std::move(components);
    return FormField(std::move(impl));
}

FormField FormField::constant(const KForm& components, FramePtr frame)
{
    SymbolicForm s(components.degree());
    for (std::size_t i = 0; i < components.size(); ++i) s[i] = Expr(components[i]);
    return symbolic(std::move(s), std::move(frame));
}

FormField FormField::zero(int degree, FramePtr frame) { return symbolic(SymbolicForm(degree), std::move(frame)); }

FormField FormField::finite_difference(int degree, Evaluator evaluate, FramePtr frame, double step, int depth)
{
    (void)component_count(degree);
    check_step(step);
    if (depth > kMaxDerivativeDepth) {
        throw DerivativeDepthExceeded("finite-difference nesting depth " + std::to_string(depth) +
                                      " exceeds the cap of " + std::to_string(kMaxDerivativeDepth));
    }
    auto impl = std::make_shared<Impl>();
    impl->degree = degree;
    impl->frame = std::move(frame);
    impl->strategy = Strategy::FiniteDifference;
    impl->step = step;
    impl->depth = depth;
    impl->evaluate = std::move(evaluate);
    return FormField(std::move(impl));
}

FormField FormField::exact(int degree, Evaluator evaluate, PartialEvaluator partial, FramePtr frame, double step)
{
    (void)component_count(degree);
    check_step(step);
    auto impl = std::make_shared<Impl>();
    impl->degree = degree;
    impl->frame = std::move(frame);
    impl->strategy = Strategy::ExactUserSupplied;
    impl->step = step;
    impl->evaluate = std::move(evaluate);
    impl->partial = std::move(partial);
    return FormField(std::move(impl));
}

FormField make_degenerate(int degree, FramePtr frame)
{
    auto impl = std::make_shared<FormField::Impl>();
    impl->degree = degree;
    impl->frame = std::move(frame);
    impl->expression = SymbolicForm(degree);
    impl->degenerate = true;
    return FormField(std::move(impl));
}

int FormField::degree() const noexcept { return impl_->degree; }
Strategy FormField::strategy() const noexcept { return impl_->strategy; }
const FramePtr& FormField::frame() const noexcept { return impl_->frame; }
double FormField::step() const noexcept { return impl_->step; }
int FormField::depth() const noexcept { return impl_->depth; }
bool FormField::degenerate() const noexcept { return impl_->degenerate; }

const SymbolicForm& FormField::expression() const
{
    if (!is_symbolic()) throw InvalidArgument("field has no symbolic expression");
    return impl_->expression;
}

const FormField::PartialEvaluator& FormField::partial() const
{
    if (strategy() != Strategy::ExactUserSupplied) throw InvalidArgument("field has no user-supplied partials");
    return impl_->partial;
}

KForm FormField::evaluate(const Point& p) const
{
    const Impl& im = *impl_;
    if (im.strategy != Strategy::Symbolic) {
        KForm v = im.evaluate(p);
        if (v.degree() != im.degree) {
            throw DegreeMismatch("field evaluator returned a " + std::to_string(v.degree()) + "-form, declared " +
                                 std::to_string(im.degree));
        }
        return v;
    }
    std::call_once(im.compiled, [&im] { im.tape = std::make_unique<Tape>(im.expression.components()); });
    KForm out(im.degree);
    im.tape->evaluate(p, std::span<double>(&out[0], out.size()));
    return out;
}

FormField FormField::as_finite_difference(double step) const
{
    FormField self = *this;
    return finite_difference(
        degree(), [self](const Point& p) { return self.evaluate(p); }, frame(), step, depth());
}

// --- combinators ---------------------------------------------------------------

namespace {

FramePtr common_frame(std::initializer_list<const FormField*> inputs)
{
    const FormField* chosen = nullptr;
    for (const FormField* f : inputs) {
        if (f->degree() == 0) continue;
        if (!chosen) {
            chosen = f;
        } else if (chosen->frame() != f->frame()) {
            throw FrameMismatch("cannot combine fields expressed in different frames");
        }
    }
    if (chosen) return chosen->frame();
    for (const FormField* f : inputs) {
        if (f->frame()) return f->frame();
    }
    return nullptr;
}

struct NumericTraits {
    double step = kDefaultStep;
    int depth = 0;
};

NumericTraits numeric_traits(std::initializer_list<const FormField*> inputs)
{
    NumericTraits t;
    bool seen = false;
    for (const FormField* f : inputs) {
        if (f->is_symbolic()) continue;
        if (!seen) t.step = f->step();
        seen = true;
        t.depth = std::max(t.depth, f->depth());
    }
    return t;
}

template <class Op>
FormField map1(const FormField& a, int degree, const FramePtr& frame, Op op)
{
    if (a.is_symbolic()) return FormField::symbolic(op(a.expression()), frame);
    const NumericTraits t = numeric_traits({&a});
    return FormField::finite_difference(
        degree, [a, op](const Point& p) { return op(a.evaluate(p)); }, frame, t.step, t.depth);
}

template <class Op>
FormField map2(const FormField& a, const FormField& b, int degree, const FramePtr& frame, Op op)
{
    if (a.is_symbolic() && b.is_symbolic()) return FormField::symbolic(op(a.expression(), b.expression()), frame);
    const NumericTraits t = numeric_traits({&a, &b});
    return FormField::finite_difference(
        degree, [a, b, op](const Point& p) { return op(a.evaluate(p), b.evaluate(p)); }, frame, t.step, t.depth);
}

void require_same_degree(const FormField& a, const FormField& b)
{
    if (a.degree() != b.degree()) {
        throw DegreeMismatch("cannot add a " + std::to_string(b.degree()) + "-form field to a " +
                             std::to_string(a.degree()) + "-form field");
    }
}

template <class T>
BasicKForm<T> coordinate_one_form(int axis)
{
    return BasicKForm<T>::basis(1, static_cast<std::size_t>(axis));
}

constexpr Var kAxisVar[4] = {Var::X, Var::Y, Var::Z, Var::T};

bool is_symbolic_zero(const FormField& f)
{
    if (!f.is_symbolic()) return false;
    const SymbolicForm& e = f.expression();
    for (std::size_t i = 0; i < e.size(); ++i)
        if (!e[i].is_constant(0.0)) return false;
    return true;
}

bool reusable(const FormField& f, const FramePtr& frame) { return f.degree() == 0 || f.frame() == frame; }

void check_axis(int axis)
{
    if (axis < 0 || axis > 3) throw InvalidArgument("coordinate axis out of range: " + std::to_string(axis));
}

}  // namespace

FormField operator+(const FormField& a, const FormField& b)
{
    require_same_degree(a, b);
    const FramePtr frame = common_frame({&a, &b});
    if (is_symbolic_zero(b) && reusable(a, frame)) return a;
    if (is_symbolic_zero(a) && reusable(b, frame)) return b;
    return map2(a, b, a.degree(), common_frame({&a, &b}), [](const auto& x, const auto& y) { return x + y; });
}

FormField operator-(const FormField& a, const FormField& b)
{
    require_same_degree(a, b);
    const FramePtr frame = common_frame({&a, &b});
    if (is_symbolic_zero(b) && reusable(a, frame)) return a;
    return map2(a, b, a.degree(), common_frame({&a, &b}), [](const auto& x, const auto& y) { return x - y; });
}

FormField operator-(const FormField& a)
{
    return map1(a, a.degree(), a.frame(), [](const auto& x) { return -x; });
}

FormField operator*(double s, const FormField& a)
{
    return map1(a, a.degree(), a.frame(), [s](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        return T(s) * x;
    });
}

FormField operator*(const FormField& scalar, const FormField& a)
{
    if (scalar.degree() != 0) throw DegreeMismatch("left factor of a field product must be a 0-form");
    return wedge(scalar, a);
}

FormField wedge(const FormField& a, const FormField& b)
{
    const int degree = a.degree() + b.degree();
    if (degree > 3) {
        throw DegreeOverflow("wedge of a " + std::to_string(a.degree()) + "-form field and a " +
                             std::to_string(b.degree()) + "-form field exceeds degree 3");
    }
    if (is_symbolic_zero(a) || is_symbolic_zero(b)) return FormField::zero(degree, common_frame({&a, &b}));
    return map2(a, b, degree, common_frame({&a, &b}), [](const auto& x, const auto& y) { return wedge(x, y); });
}

FormField hodge(const FormField& a)
{
    return map1(a, 3 - a.degree(), a.frame(), [](const auto& x) { return hodge(x); });
}

FormField interior(FrameIndex index, const FormField& a)
{
    const int degree = std::max(0, a.degree() - 1);
    return map1(a, degree, a.frame(), [index](const auto& x) { return interior(index, x); });
}

FormField rebase(const FormField& a, const FramePtr& frame)
{
    if (a.frame() == frame) return a;
    if (a.is_symbolic()) {
        if (a.degree() == 0) return FormField::symbolic(a.expression(), frame);
        return FormField::symbolic(from_coordinates(frame, to_coordinates(a.frame(), a.expression())), frame);
    }
    if (a.degree() == 0 && a.strategy() == Strategy::ExactUserSupplied) {
        return FormField::exact(
            0, [a](const Point& p) { return a.evaluate(p); }, a.partial(), frame, a.step());
    }
    const FramePtr from = a.frame();
    return FormField::finite_difference(
        a.degree(),
        [a, from, frame](const Point& p) { return from_coordinates(frame, to_coordinates(from, a.evaluate(p), p), p); },
        frame, a.step(), a.depth());
}

FormField component(const FormField& a, std::size_t index)
{
    if (index >= component_count(a.degree())) throw InvalidArgument("component index out of range");
    return map1(a, 0, a.frame(), [index](const auto& x) {
        using T = std::decay_t<decltype(x[0])>;
        return BasicKForm<T>(0, {x[index]});
    });
}

FormField assemble(int degree, std::span<const FormField> components, const FramePtr& frame)
{
    const std::size_t n = component_count(degree);
    if (components.size() != n) {
        throw InvalidArgument("expected " + std::to_string(n) + " component fields for a " + std::to_string(degree) +
                              "-form");
    }
    bool symbolic = true;
    NumericTraits t;
    for (const FormField& c : components) {
        if (c.degree() != 0) throw DegreeMismatch("form components must be 0-form fields");
        if (!c.is_symbolic()) {
            if (symbolic) t.step = c.step();
            symbolic = false;
            t.depth = std::max(t.depth, c.depth());
        }
    }
    if (symbolic) {
        SymbolicForm out(degree);
        for (std::size_t i = 0; i < n; ++i) out[i] = components[i].expression()[0];
        return FormField::symbolic(std::move(out), frame);
    }
    std::vector<FormField> parts(components.begin(), components.end());
    return FormField::finite_difference(
        degree,
        [parts, degree](const Point& p) {
            KForm out(degree);
            for (std::size_t i = 0; i < parts.size(); ++i) out[i] = parts[i].evaluate(p)[0];
            return out;
        },
        frame, t.step, t.depth);
}

// --- differentiation ---------------------------------------------------------------

namespace {

SymbolicForm symbolic_partial(const SymbolicForm& coords, int axis)
{
    const auto d = differentiate(coords.components(), kAxisVar[axis]);
    SymbolicForm out(coords.degree());
    for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i];
    return out;
}

int next_depth(const FormField& a)
{
    const int depth = a.strategy() == Strategy::FiniteDifference ? a.depth() + 1 : a.depth();
    if (depth > kMaxDerivativeDepth) {
        throw DerivativeDepthExceeded("finite-difference derivative nesting would reach depth " +
                                      std::to_string(depth) + " (cap " + std::to_string(kMaxDerivativeDepth) + ")");
    }
    return depth;
}

// Central difference of the coordinate components along `axis`.
KForm stencil(const FormField& a, const Point& p, int axis)
{
    const double h = a.step();
    const Point plus = p.shifted(axis, h);
    const Point minus = p.shifted(axis, -h);
    KForm cp = to_coordinates(a.frame(), a.evaluate(plus), plus);
    const KForm cm = to_coordinates(a.frame(), a.evaluate(minus), minus);
    cp -= cm;
    cp *= 1.0 / (2.0 * h);
    return cp;
}

KForm numeric_coordinate_partial(const FormField& a, const Point& p, int axis)
{
    if (a.strategy() == Strategy::ExactUserSupplied) return a.partial()(p, axis);
    return stencil(a, p, axis);
}

}  // namespace

FormField coordinate_partial(const FormField& a, int axis)
{
    check_axis(axis);
    const FramePtr& frame = a.frame();
    if (a.is_symbolic()) {
        return FormField::symbolic(from_coordinates(frame, symbolic_partial(to_coordinates(frame, a.expression()), axis)),
                                   frame);
    }
    const int depth = next_depth(a);
    return FormField::finite_difference(
        a.degree(),
        [a, axis](const Point& p) { return from_coordinates(a.frame(), numeric_coordinate_partial(a, p, axis), p); },
        frame, a.step(), depth);
}

FormField exterior_derivative(const FormField& a)
{
    const FramePtr& frame = a.frame();
    if (a.degree() == 3) return make_degenerate(3, frame);
    if (a.is_symbolic()) {
        const SymbolicForm coords = to_coordinates(frame, a.expression());
        SymbolicForm acc(a.degree() + 1);
        for (int axis = 0; axis < 3; ++axis) {
            acc += wedge(coordinate_one_form<Expr>(axis), symbolic_partial(coords, axis));
        }
        return FormField::symbolic(from_coordinates(frame, acc), frame);
    }
    const int depth = next_depth(a);
    return FormField::finite_difference(
        a.degree() + 1,
        [a](const Point& p) {
            KForm acc(a.degree() + 1);
            for (int axis = 0; axis < 3; ++axis) {
                acc += wedge(coordinate_one_form<double>(axis), numeric_coordinate_partial(a, p, axis));
            }
            return from_coordinates(a.frame(), acc, p);
        },
        frame, a.step(), depth);
}

FormField time_derivative(const FormField& a) { return coordinate_partial(a, 3); }

// --- vector fields -----------------------------------------------------------------

VectorField VectorField::symbolic(const std::array<Expr, 3>& v)
{
    return VectorField{{FormField::scalar(v[0]), FormField::scalar(v[1]), FormField::scalar(v[2])}};
}

FormField interior(const VectorField& v, const FormField& a)
{
    if (a.degree() == 0) return FormField::zero(0, a.frame());
    FormField acc = FormField::zero(a.degree() - 1, a.frame());
    for (int i = 0; i < 3; ++i) acc = acc + v[static_cast<std::size_t>(i)] * interior(FrameIndex(i + 1), a);
    return acc;
}

FormField lie_derivative(const VectorField& v, const FormField& a)
{
    if (a.degree() == 0) return interior(v, exterior_derivative(a));
    if (a.degree() == 3) return exterior_derivative(interior(v, a));
    return interior(v, exterior_derivative(a)) + exterior_derivative(interior(v, a));
}

FormField to_one_form(const VectorField& w, const FramePtr& frame)
{
    return assemble(1, std::span<const FormField>(w.components.data(), 3), frame);
}

VectorField to_vector(const FormField& one_form)
{
    if (one_form.degree() != 1) throw DegreeMismatch("expected a 1-form field");
    return VectorField{{component(one_form, 0), component(one_form, 1), component(one_form, 2)}};
}

VectorField grad(const FormField& f)
{
    if (f.degree() != 0) throw DegreeMismatch("grad expects a 0-form field");
    return to_vector(exterior_derivative(f));
}

VectorField curl(const VectorField& w, const FramePtr& frame)
{
    return to_vector(hodge(exterior_derivative(to_one_form(w, frame))));
}

FormField div(const VectorField& w, const FramePtr& frame)
{
    return hodge(exterior_derivative(hodge(to_one_form(w, frame))));
}

// --- batches -----------------------------------------------------------------------

FieldBatch::FieldBatch(std::vector<FormField> fields) : fields_(std::move(fields))
{
    std::vector<Expr> roots;
    offset_.reserve(fields_.size());
    for (const FormField& f : fields_) {
        if (f.is_symbolic()) {
            offset_.push_back(roots.size());
            const auto comps = f.expression().components();
            roots.insert(roots.end(), comps.begin(), comps.end());
        } else {
            offset_.push_back(std::numeric_limits<std::size_t>::max());
        }
    }
    tape_ = Tape(roots);
}

std::vector<KForm> FieldBatch::evaluate(const Point& p) const
{
    std::vector<double> raw(tape_.outputs());
    tape_.evaluate(p, raw);
    std::vector<KForm> out;
    out.reserve(fields_.size());
    for (std::size_t i = 0; i < fields_.size(); ++i) {
        if (offset_[i] == std::numeric_limits<std::size_t>::max()) {
            out.push_back(fields_[i].evaluate(p));
            continue;
        }
        KForm f(fields_[i].degree());
        for (std::size_t k = 0; k < f.size(); ++k) f[k] = raw[offset_[i] + k];
        out.push_back(f);
    }
    return out;
}

}  // namespace defectgeo

#pragma once

// Fields of forms over R^3 (optionally time dependent).
//
// Every FormField stores its components in the orthonormal frame of a
// coframe e^a = h^a_b dx^b. The frame is shared by pointer; a null frame is
// the identity coordinate coframe dx^a. Fields may only be combined when
// their frames are the same object (0-forms are frame independent and mix
// freely). `rebase` moves a field to another frame.
//
// Differentiation has one primitive: the coordinate partial ∂_i acting on
// coordinate components, converted back to frame components. The exterior
// derivative is Σ_i dx^i ∧ ∂_i α, the time derivative is ∂_t.

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "defectgeo/exterior.hpp"
#include "defectgeo/expr.hpp"
#include "defectgeo/point.hpp"

namespace defectgeo {

using Mat3 = std::array<std::array<double, 3>, 3>;
using ExprMat3 = std::array<std::array<Expr, 3>, 3>;
using SymbolicForm = BasicKForm<Expr>;

/// Pointwise value of a triad: h, its inverse and det h.
struct TriadValue {
    Mat3 triad;
    Mat3 inverse;
    double determinant;
};

/// Smallest |det h| accepted anywhere a triad, gauge or Jacobian is inverted.
inline constexpr double kSingularThreshold = 1e-8;

class Frame;
using FramePtr = std::shared_ptr<const Frame>;

/// The orthonormal coframe e^a = h^a_b dx^b as a symbolic triad.
class Frame {
public:
    /// Null when `triad` is the constant identity.
    static FramePtr make(const ExprMat3& triad);

    const ExprMat3& triad() const noexcept { return triad_; }
    /// Symbolic inverse (adjugate over determinant).
    const ExprMat3& inverse() const noexcept { return inverse_; }
    const Expr& determinant() const noexcept { return det_; }

    /// Throws SingularTriad when |det h| < kSingularThreshold.
    TriadValue at(const Point& p) const;

private:
    explicit Frame(const ExprMat3& triad);

    ExprMat3 triad_;
    ExprMat3 inverse_;
    Expr det_;
    Tape tape_;
};

Mat3 identity3();
/// Inverse and determinant of a 3x3 matrix; `ok` false when |det| < kSingularThreshold.
Mat3 inverse3(const Mat3& m, double& det, bool& ok);
double det3(const Mat3& m);
Mat3 multiply3(const Mat3& a, const Mat3& b);

/// Components of α in the basis obtained from the current one by
/// e^a -> A^a_b f^b, i.e. c_J = Σ_I α_I minor(A)_IJ.
template <class T>
BasicKForm<T> induced_transform(const std::array<std::array<T, 3>, 3>& a, const BasicKForm<T>& form);

/// Frame components -> coordinate (dx) components and back.
KForm to_coordinates(const FramePtr& frame, const KForm& form, const Point& p);
KForm from_coordinates(const FramePtr& frame, const KForm& form, const Point& p);
SymbolicForm to_coordinates(const FramePtr& frame, const SymbolicForm& form);
SymbolicForm from_coordinates(const FramePtr& frame, const SymbolicForm& form);

enum class Strategy { Symbolic, ExactUserSupplied, FiniteDifference };

inline constexpr double kDefaultStep = 1e-4;
/// Maximum nesting of finite-difference stencils (cost grows as 6^depth).
inline constexpr int kMaxDerivativeDepth = 3;

/// A point -> KForm evaluator with a differentiation strategy.
class FormField {
public:
    using Evaluator = std::function<KForm(const Point&)>;
    /// ∂_axis of the coordinate components at a point, axis 0..3 (x, y, z, t).
    using PartialEvaluator = std::function<KForm(const Point&, int axis)>;

    /// The zero 0-form.
    FormField();

    static FormField symbolic(SymbolicForm components, FramePtr frame = nullptr);
    static FormField scalar(const Expr& e) { return symbolic(SymbolicForm(0, {e})); }
    static FormField constant(const KForm& components, FramePtr frame = nullptr);
    static FormField zero(int degree, FramePtr frame = nullptr);
    static FormField finite_difference(int degree, Evaluator evaluate, FramePtr frame = nullptr,
                                       double step = kDefaultStep, int depth = 0);
    static FormField exact(int degree, Evaluator evaluate, PartialEvaluator partial, FramePtr frame = nullptr,
                           double step = kDefaultStep);

    int degree() const noexcept;
    Strategy strategy() const noexcept;
    const FramePtr& frame() const noexcept;
    /// Finite-difference step used when this field (or anything derived
    /// from it numerically) is differentiated.
    double step() const noexcept;
    /// Nested finite-difference stencils needed to evaluate the field.
    int depth() const noexcept;
    bool is_symbolic() const noexcept { return strategy() == Strategy::Symbolic; }
    /// Set for d of a 3-form (the zero 3-form is returned).
    bool degenerate() const noexcept;

    /// Symbolic components; only valid when is_symbolic().
    const SymbolicForm& expression() const;
    /// User partials; only valid for ExactUserSupplied.
    const PartialEvaluator& partial() const;

    KForm operator()(const Point& p) const { return evaluate(p); }
    KForm evaluate(const Point& p) const;

    /// Numeric closure over this field differentiated by central differences.
    FormField as_finite_difference(double step = kDefaultStep) const;

private:
    struct Impl;
    explicit FormField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;

    friend FormField make_degenerate(int degree, FramePtr frame);
};

FormField operator+(const FormField& a, const FormField& b);
FormField operator-(const FormField& a, const FormField& b);
FormField operator-(const FormField& a);
FormField operator*(double s, const FormField& a);
/// Product of a 0-form field with any field.
FormField operator*(const FormField& scalar, const FormField& a);

FormField wedge(const FormField& a, const FormField& b);
FormField hodge(const FormField& a);
FormField interior(FrameIndex index, const FormField& a);

/// Same form expressed in another frame (0-forms are just retagged).
FormField rebase(const FormField& a, const FramePtr& frame);

/// One component as a 0-form field.
FormField component(const FormField& a, std::size_t index);
/// Assemble a form from 0-form component fields.
FormField assemble(int degree, std::span<const FormField> components, const FramePtr& frame);

/// Lie derivative along the coordinate vector ∂_axis (axis 3 is time).
FormField coordinate_partial(const FormField& a, int axis);
/// d α. The derivative of a 3-form is the zero 3-form flagged degenerate.
FormField exterior_derivative(const FormField& a);
FormField time_derivative(const FormField& a);

/// Components v^a in the orthonormal frame.
struct VectorField {
    std::array<FormField, 3> components;

    static VectorField symbolic(const std::array<Expr, 3>& v);
    const FormField& operator[](std::size_t a) const { return components[a]; }
};

/// ι_V = Σ_a v^a ι_a.
FormField interior(const VectorField& v, const FormField& a);
/// Cartan formula ι_V dα + d ι_V α.
FormField lie_derivative(const VectorField& v, const FormField& a);

/// w̃ = Σ w^a e^a on `frame`.
FormField to_one_form(const VectorField& w, const FramePtr& frame);
VectorField to_vector(const FormField& one_form);

VectorField grad(const FormField& f);
/// *(d w̃).
VectorField curl(const VectorField& w, const FramePtr& frame = nullptr);
/// *(d * w̃).
FormField div(const VectorField& w, const FramePtr& frame = nullptr);

/// Evaluates many fields at a point; symbolic fields share one tape so
/// common subexpressions are computed once.
class FieldBatch {
public:
    FieldBatch() = default;
    explicit FieldBatch(std::vector<FormField> fields);

    std::size_t size() const noexcept { return fields_.size(); }
    std::vector<KForm> evaluate(const Point& p) const;

private:
    std::vector<FormField> fields_;
    Tape tape_;
    std::vector<std::size_t> offset_;  // first tape output per field, or npos for numeric fields
};

}  // namespace defectgeo

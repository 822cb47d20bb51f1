#pragma once

// Metric-affine geometry on R^3: coframes, connections, torsion,
// non-metricity, curvature, covariant exterior derivatives and the Bianchi
// identities. Frame indices are 0-based (0, 1, 2 for a = 1, 2, 3) and are
// raised and lowered freely.

#include <array>
#include <initializer_list>
#include <span>
#include <vector>

#include "defectgeo/field.hpp"

namespace defectgeo {

enum class Slot { Up, Down };

/// Indexed collection of form fields of common degree, 3^rank components in
/// row-major index order.
class TensorFormField {
public:
    TensorFormField() = default;
    TensorFormField(std::vector<Slot> slots, std::vector<FormField> components);

    static TensorFormField zero(std::vector<Slot> slots, int degree, const FramePtr& frame);
    /// δ with the given two slots, as constant 0-form components.
    static TensorFormField delta(Slot first, Slot second, const FramePtr& frame);

    const std::vector<Slot>& slots() const noexcept { return slots_; }
    int rank() const noexcept { return static_cast<int>(slots_.size()); }
    int degree() const noexcept { return degree_; }
    const FramePtr& frame() const noexcept { return frame_; }
    std::size_t size() const noexcept { return components_.size(); }

    const FormField& operator()(int a) const { return components_.at(flat({a})); }
    const FormField& operator()(int a, int b) const { return components_.at(flat({a, b})); }
    const FormField& at(std::span<const int> index) const { return components_.at(flat(index)); }
    const std::vector<FormField>& components() const noexcept { return components_; }

    /// Same components, different slot placement.
    TensorFormField with_slots(std::vector<Slot> slots) const;

private:
    std::size_t flat(std::span<const int> index) const;
    std::size_t flat(std::initializer_list<int> index) const
    {
        return flat(std::span<const int>(index.begin(), index.size()));
    }

    std::vector<Slot> slots_;
    std::vector<FormField> components_;
    int degree_ = 0;
    FramePtr frame_;
};

TensorFormField operator+(const TensorFormField& a, const TensorFormField& b);
TensorFormField operator-(const TensorFormField& a, const TensorFormField& b);
TensorFormField operator*(double s, const TensorFormField& a);

/// ω^a_b, stored as a (Up, Down) tensor of 1-forms.
using Connection = TensorFormField;

/// e^a = h^a_b dx^b. Each e^a has constant components (δ) in its own frame.
class CoFrame {
public:
    /// Identity coordinate coframe.
    CoFrame();
    explicit CoFrame(const ExprMat3& triad, Strategy strategy = Strategy::Symbolic, double step = kDefaultStep);

    const FramePtr& frame() const noexcept { return frame_; }
    const ExprMat3& triad() const noexcept { return triad_; }
    const FormField& operator[](int a) const { return e_.at(static_cast<std::size_t>(a)); }
    Strategy strategy() const noexcept { return strategy_; }
    double step() const noexcept { return step_; }

    /// A field on this coframe with the configured differentiation strategy.
    FormField field(const SymbolicForm& components) const;
    FormField scalar(const Expr& e) const { return field(SymbolicForm(0, {e})); }
    /// Σ v_a e^a.
    FormField one_form(const std::array<Expr, 3>& v) const;

    /// Throws SingularTriad at the first point where |det h| < 1e-8.
    void validate(std::span<const Point> points) const;

private:
    ExprMat3 triad_;
    FramePtr frame_;
    std::array<FormField, 3> e_;
    Strategy strategy_ = Strategy::Symbolic;
    double step_ = kDefaultStep;
};

/// Invertible matrix of scalar fields Λ^a_b.
class GaugeField {
public:
    explicit GaugeField(const ExprMat3& entries);

    const ExprMat3& entries() const noexcept { return entries_; }
    const ExprMat3& inverse() const noexcept { return inverse_; }
    /// Throws SingularGauge at the first point where |det Λ| < 1e-8.
    void validate(std::span<const Point> points) const;

private:
    ExprMat3 entries_;
    ExprMat3 inverse_;
    Tape tape_;
};

/// Basis 1-form e^a as a constant field on `frame`.
FormField basis_field(int a, const FramePtr& frame);

/// The antisymmetric torsion-free connection: γ_ab = −½[ι_a de_b − ι_b de_a − (ι_a ι_b de_c) e^c].
Connection levi_civita(const CoFrame& e);
/// T^a = de^a + ω^a_b ∧ e^b.
TensorFormField torsion(const CoFrame& e, const Connection& omega);
/// Q_ab = ω_(ab).
TensorFormField nonmetricity(const Connection& omega);
/// R^a_b = dω^a_b + ω^a_c ∧ ω^c_b.
TensorFormField curvature(const Connection& omega);
/// ω = Λ⁻¹ dΛ on the frame of `e`, using its differentiation strategy.
Connection pure_gauge(const GaugeField& gauge, const CoFrame& e);

/// D X = dX + Σ_up ω^a_c ∧ X^..c.. − Σ_down ω^c_b ∧ X_..c.. .
TensorFormField covariant_exterior_derivative(const TensorFormField& x, const Connection& omega);

/// L_ab = ½[ι_a T_b − ι_b T_a − (ι_a ι_b T_c) e^c] + (ι_b Q_ac − ι_a Q_bc) e^c + Q_ab.
TensorFormField defect_one_form(const TensorFormField& torsion, const TensorFormField& nonmetricity);

/// R^a_b ∧ e^b.
TensorFormField curvature_wedge_coframe(const TensorFormField& curvature, const FramePtr& frame);

struct BianchiResiduals {
    TensorFormField curvature;     // D R^a_b
    TensorFormField torsion;       // D T^a − R^a_b ∧ e^b
    TensorFormField nonmetricity;  // D Q_ab − R_(ab)
};

BianchiResiduals bianchi_residuals(const CoFrame& e, const Connection& omega);

/// R(γ + L) − [R(γ) + D(γ) L + L ∧ L] with L = defect_one_form(T, Q).
TensorFormField curvature_decomposition_residual(const CoFrame& e, const TensorFormField& torsion,
                                                 const TensorFormField& nonmetricity);

struct TransformedGeometry {
    CoFrame coframe;
    Connection connection;
    std::vector<TensorFormField> tensors;
};

/// e' = h e, ω' = h ω h⁻¹ + h d(h⁻¹); tensors transform slot by slot (h on
/// up slots, h⁻¹ on down slots). Results are expressed in the frame of e'.
TransformedGeometry frame_transform(const GaugeField& h, const CoFrame& e, const Connection& omega,
                                    const std::vector<TensorFormField>& tensors);

/// Moves every component to another frame.
TensorFormField rebase(const TensorFormField& x, const FramePtr& frame);

/// max over points of max|residual| / (1 + max|reference|), both taken
/// over all components at the same point.
double normalized_residual(const TensorFormField& residual, const std::vector<TensorFormField>& references,
                           std::span<const Point> points);
/// max over points of max|component|.
double max_norm(const TensorFormField& x, std::span<const Point> points);

}  // namespace defectgeo

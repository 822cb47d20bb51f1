#pragma once

// Riemannian elasticity in the Eulerian description: deformation gradients
// of the map F: B -> S, Euler strain, the isotropic Hooke law, the Cauchy
// stress 2-forms and residuals of the balance laws.
//
// Body coordinates X^A are Cartesian with identity triads, so coordinate and
// orthonormal deformation gradients coincide unless a spatial coframe is
// sandwiched in explicitly (orthonormal_pullback).

#include <array>
#include <optional>
#include <span>

#include "defectgeo/constants.hpp"
#include "defectgeo/geometry.hpp"

namespace defectgeo {

using ExprVec3 = std::array<Expr, 3>;
using FieldMat3 = std::array<std::array<FormField, 3>, 3>;

inline constexpr int kNewtonIterations = 50;
inline constexpr double kNewtonTolerance = 1e-12;

class DeformationMap {
public:
    /// X^A(x, y, z, t) given directly.
    static DeformationMap from_inverse(const ExprVec3& body_coordinates, Strategy strategy = Strategy::Symbolic,
                                       double step = kDefaultStep);
    /// x^a(X) written in x, y, z standing for X^1, X^2, X^3 (t is shared);
    /// X(x) is found by damped Newton per evaluation point.
    static DeformationMap from_forward(const ExprVec3& spatial_coordinates, Strategy strategy = Strategy::Symbolic,
                                       double step = kDefaultStep);

    bool is_forward() const noexcept { return forward_; }
    const ExprVec3& expressions() const noexcept { return map_; }
    Strategy strategy() const noexcept { return strategy_; }
    double step() const noexcept { return step_; }

    /// X(x). Throws NewtonFailure or SingularDeformation for forward maps.
    std::array<double, 3> body_point(const Point& p) const;
    /// ∂x^a/∂X^A of a forward map at a body point.
    Mat3 forward_jacobian(const std::array<double, 3>& body, double t) const;

private:
    DeformationMap() = default;

    ExprVec3 map_;
    bool forward_ = false;
    Strategy strategy_ = Strategy::Symbolic;
    double step_ = kDefaultStep;
    std::shared_ptr<const Tape> values_;    // the three map components
    std::shared_ptr<const Tape> jacobian_;  // row-major ∂map/∂(x, y, z)
};

struct DeformationGradients {
    FieldMat3 pullback;     // F^a_A, [a][A]
    FieldMat3 pushforward;  // F^A_a = ∂X^A/∂x^a, [A][a]
};

/// Throws SingularDeformation when |det F^A_a| < 1e-8 at any of `grid`.
DeformationGradients deformation_gradients(const DeformationMap& map, std::span<const Point> grid = {});

/// h F̂ H⁻¹ at a point, with the body triad H evaluated at X(x).
Mat3 orthonormal_pullback(const DeformationMap& map, const CoFrame& spatial, const ExprMat3& body_triad,
                          const Point& p);

/// Symmetric 3×3 of 0-forms; [a][b] and [b][a] share one field.
struct StrainState {
    FieldMat3 strain;
};

/// 𝕖_ab = ½(δ_ab − δ_AB F^A_a F^B_b).
StrainState euler_strain(const DeformationGradients& gradients);

/// 𝕕_ab = (∂_t + v·∇)𝕖_ab + 𝕖_cb ∂_a v^c + 𝕖_ac ∂_b v^c with Cartesian v.
FieldMat3 deformation_rate(const StrainState& strain, const VectorField& velocity);

struct StressState {
    FieldMat3 sigma;              // σ^{ab}
    std::array<FormField, 3> tau; // τ^a = σ^{ab} *e_b
};

/// Builds τ from σ on the frame of `e`. Only the upper triangle of `sigma` is read.
StressState make_stress(const FieldMat3& sigma, const CoFrame& e = CoFrame());

/// σ = 2μ𝕖 + λ tr𝕖 δ. Throws AnisotropyNotSupported when κ ≠ 0, InvalidMaterial when μ ≤ 0.
StressState isotropic_stress(const StrainState& strain, const MaterialConstants& mat, const CoFrame& e = CoFrame());

/// C_abcd = λδ_abδ_cd + μ(δ_acδ_bd + δ_adδ_bc) + κ(δ_acδ_bd − δ_adδ_bc), index 27a + 9b + 3c + d.
std::array<double, 81> stiffness_tensor(const MaterialConstants& mat);
/// σ^{ab} = C_abcd 𝕖_cd summed term by term.
FieldMat3 contract_stiffness(const std::array<double, 81>& stiffness, const StrainState& strain);

/// ∂_t ρ + ∇·(ρv).
FormField mass_conservation_residual(const FormField& density, const VectorField& velocity,
                                     const FramePtr& frame = nullptr);

/// m(∂_t v^a + ι_v Dv^a) − m f^a − Dτ^a with m = ρ *1 and D the Levi-Civita derivative of `e`.
std::array<FormField, 3> cauchy_motion_residual(const FormField& density, const VectorField& velocity,
                                                const VectorField& force, const StressState& stress,
                                                const CoFrame& e = CoFrame());

/// det(h F̂) − det h / det(F^A_a): the two readings of *1 = det(F^a_A) *𝟙.
FormField volume_relation_residual(const DeformationGradients& gradients, const CoFrame& e = CoFrame());

}  // namespace defectgeo

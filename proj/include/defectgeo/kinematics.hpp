#pragma once

// Kinematic relations among defect densities obtained by substituting the
// torsion and non-metricity ansatz into the Bianchi identities, as residual
// fields, plus the extra-matter balance ∫ρ_exmt *1 = ∮ *dφ.

#include <array>
#include <span>

#include "defectgeo/defects.hpp"

namespace defectgeo {

struct DislocationBalance {
    /// db̃∧e^a + ⅓ρ b̃∧*e^a − 4ρ Ω̃∧*e^a − ⅔ dρ∧*e^a + (2/9)ρ m̃∧*e^a, one 3-form per a.
    TensorFormField form;
    /// ∇×b + ⅓ρb − 4ρΩ − ⅔∇ρ + (2/9)ρm.
    VectorField vector;
};

DislocationBalance dislocation_balance(const DefectFields& d);

struct DisclinationPointBalance {
    VectorField point_curl;  // ∇×m
    VectorField beltrami;    // ∇×Ω − ρΩ
    /// 18[(Ω·Ω)δ_ac − 3Ω_aΩ_c] − 5[(b·Ω)δ_ac − (3/2)(b_aΩ_c + b_cΩ_a)], row-major.
    std::array<FormField, 9> algebraic;
};

DisclinationPointBalance disclination_point_balance(const DefectFields& d);

/// The three-index 0-form tensor S_(ab)c of the disclination balance,
/// index order [9a + 3b + c].
std::array<FormField, 27> kinematic_tensor(const DefectFields& d);

/// Contractions of a kinematic tensor value used to compare it with the
/// residuals of disclination_point_balance.
struct KinematicProjections {
    std::array<double, 3> trace_ab{};  // δ^ab S_abc
    std::array<double, 3> trace_ac{};  // δ^ac S_abc
    std::array<double, 9> dual{};      // symmetric trace-free part of ε_dbc S_abc, [3a + d]
};

KinematicProjections project(const std::array<double, 27>& tensor);

/// Least-squares constant μ in A ≈ μ B over sampled points and components.
struct ProportionalityFit {
    double constant = 0.0;
    /// max|A − μB| / max|B|, or max|A| when B vanishes.
    double residual = 0.0;
    /// Standard deviation of the pointwise ratios relative to |μ|.
    double spread = 0.0;
    double scale = 0.0;  // max|B|
    std::size_t samples = 0;
};

ProportionalityFit fit_proportional(const TensorFormField& a, const TensorFormField& b, std::span<const Point> points);

/// 9/10[(DΩ_a)∧e_b + Ω_a De_b + (a↔b)] + 6/5 Q_ab∧Ω̃ − 3/5 δ_ab dΩ̃ − ⅔ Q_ab∧m̃ + ⅓ δ_ab dm̃
/// with DΩ_a = ½Ω_b ι_aT^b − ½ι_a dΩ̃ and De_b = T_b − 2Q_bc∧e^c, T and Q from the ansatz.
TensorFormField disclination_substitution(const DefectFields& d);
/// Same combination with the covariant DΩ_a = dΩ_a − ω^c_a Ω_c; this is D Q_ab of the ansatz.
TensorFormField disclination_substitution(const DefectFields& d, const Connection& omega);

struct BianchiConsistency {
    ProportionalityFit dislocation;   // dislocation_balance form against R^a_b ∧ e^b
    ProportionalityFit disclination;  // disclination_substitution against R_(ab)
    ProportionalityFit disclination_covariant;
};

/// Builds ω = γ + L from the densities and fits both substitution forms against the curvature terms.
BianchiConsistency bianchi_consistency(const CoFrame& e, const DefectFields& d, std::span<const Point> points);

struct Sphere {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double radius = 1.0;
};

struct QuadratureOptions {
    int volume_resolution = 64;   // cells per edge of the bounding cube
    int sphere_resolution = 128;  // polar cells; twice as many azimuthal cells
    unsigned threads = 1;
};

struct ExtraMatter {
    FormField density;  // *(d * dφ)
    double volume_total = 0.0;
    double flux_total = 0.0;
};

/// Midpoint quadrature of ρ_exmt *1 over the ball and of *dφ over its boundary.
ExtraMatter extra_matter(const FormField& potential, const Sphere& region, const QuadratureOptions& options = {});

}  // namespace defectgeo

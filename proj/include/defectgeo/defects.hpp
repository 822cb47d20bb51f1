#pragma once

// Irreducible pieces of torsion and non-metricity, and the defect densities
// read off from them: Burgers b̃ (torsion trace), scalar ρ (S = ρ *1), Frank
// Ω̃ (the P trace) and point defects m̃ (the non-metricity trace).

#include <span>

#include "defectgeo/geometry.hpp"

namespace defectgeo {

enum class FrankMode {
    Literal,  // Ω̃ = P / frank_scale, so extraction inverts reconstruction
    Raw,      // Ω̃ = P
};

/// P of the reconstructed non-metricity divided by the Ω̃ it was built from.
/// Frozen from the analytic expansion; `calibrate_frank_scale` re-measures it.
inline constexpr double kFrankScale = 3.0;

struct DefectFields {
    FormField burgers;
    FormField frank;
    FormField point;
    FormField scalar;
    FormField generalized_burgers;  // b̃ + c1 Ω̃ + c2 m̃
    double c1 = -3.0;
    double c2 = 2.0 / 3.0;
};

DefectFields make_defect_fields(const FormField& burgers, const FormField& frank, const FormField& point,
                                const FormField& scalar, double c1 = -3.0, double c2 = 2.0 / 3.0);

/// T = ι_a T^a and S = e_a ∧ T^a.
struct TorsionTraces {
    FormField trace;
    FormField scalar;
};
TorsionTraces torsion_traces(const TensorFormField& torsion);

struct TorsionPieces {
    TensorFormField piece1;  // remainder
    TensorFormField piece2;  // ½ e^a ∧ T
    TensorFormField piece3;  // ⅓ ι^a S
    FormField trace;
    FormField scalar;
};
TorsionPieces torsion_pieces(const TensorFormField& torsion);

struct NonmetricityPieces {
    TensorFormField piece1;  // remainder
    TensorFormField piece2;  // −⅓(ι_a N_b + ι_b N_a − ⅔ δ_ab P)
    TensorFormField piece3;  // 2/15 [(ι_a P) e_b + (ι_b P) e_a − ⅔ δ_ab P]
    TensorFormField piece4;  // ⅓ δ_ab Q
    FormField trace;         // Q = δ^ab Q_ab
    TensorFormField traceless;
    TensorFormField n;  // N_a = Q̄_ab ∧ e^b
    FormField p;        // P = (ι^a Q̄_ab) e^b
};
NonmetricityPieces nonmetricity_pieces(const TensorFormField& nonmetricity);

FormField nonmetricity_trace(const TensorFormField& nonmetricity);
/// P without the rest of the decomposition.
FormField frank_trace(const TensorFormField& nonmetricity);

/// T^a = ½ e^a ∧ b̃ + (ρ/3) *e^a on `frame`.
TensorFormField reconstruct_torsion(const FormField& burgers, const FormField& scalar, const FramePtr& frame);
/// Q_ab = 9/10 (Ω_a e_b + Ω_b e_a − ⅔ δ_ab Ω̃) + ⅓ δ_ab m̃ with Ω_a = ι_a Ω̃.
TensorFormField reconstruct_nonmetricity(const FormField& frank, const FormField& point, const FramePtr& frame);

DefectFields extract_defects(const CoFrame& e, const Connection& omega, FrankMode mode = FrankMode::Literal,
                             double c1 = -3.0, double c2 = 2.0 / 3.0);

/// Connection γ + L whose torsion and non-metricity are built from the given densities.
Connection defect_connection(const CoFrame& e, const DefectFields& defects);

struct FrankCalibration {
    double mean = 0.0;
    double stddev = 0.0;
    std::size_t samples = 0;
};

/// Measures |P| / |Ω̃| for P taken from reconstruct_nonmetricity(Ω̃, 0),
/// with a random polynomial Ω̃ evaluated at each of `points`.
FrankCalibration calibrate_frank_scale(std::span<const Point> points, std::uint64_t seed = 1);

}  // namespace defectgeo

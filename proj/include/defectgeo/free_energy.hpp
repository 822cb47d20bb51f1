#pragma once

// Quadratic defect free energy: the Lagrangian 3-form in exterior and in
// vector form, the expansions of its invariants in terms of T^a and Q_ab,
// the map onto an alternative coupling basis, and dislocation energy
// coefficients.

#include <array>
#include <span>
#include <string>

#include "defectgeo/constants.hpp"
#include "defectgeo/defects.hpp"

namespace defectgeo {

struct MappedCouplings {
    double k1 = 0.0, k2 = 0.0, k3 = 0.0;
    double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0, c5 = 0.0;
    double l1 = 0.0, l2 = 0.0, l3 = 0.0;
};

/// The parity-odd cubic (b × Ω)·m *1. Off unless asked for.
struct ParityTerm {
    bool enabled = false;
    double coupling = 1.0;
};

/// κ1 T∧*T + κ2 S∧*S + κ3 P∧*P + κ4 Q∧*Q + κ5 P∧*Q + κ6 T∧*P + κ7 T∧*Q
/// with T = b̃, S = ρ *1, P = Ω̃, Q = m̃, on the frame of `e`.
FormField lagrangian_form(const DefectFields& d, const Couplings& k, const CoFrame& e);

/// (κ1 b·b + κ2 ρ² + κ3 Ω·Ω + κ4 m·m + κ5 Ω·m + κ6 b·Ω + κ7 b·m) *1.
FormField lagrangian_vector(const DefectFields& d, const Couplings& k, const ParityTerm& parity = {});

struct InvariantRelation {
    std::string name;  // "T*T", "S*S", "P*P", "P*Q", "T*P", "T*Q"
    FormField lhs;     // 3-forms
    FormField rhs;
    /// Asserted relations must hold; the others are only measured.
    bool asserted = true;
};

/// Both sides of the six expansions, with T = ι_a T^a, S = e_a∧T^a, P and
/// Q the non-metricity traces. In T∧*P the factor e_ac is read as e_a∧e_c.
std::array<InvariantRelation, 6> quadratic_invariants(const TensorFormField& torsion,
                                                      const TensorFormField& nonmetricity);

struct InvariantDeviation {
    std::string name;
    double deviation = 0.0;  // max |lhs − rhs| over the points
    double scale = 0.0;      // max |lhs|
    bool asserted = true;
};

std::array<InvariantDeviation, 6> measure(const std::array<InvariantRelation, 6>& relations,
                                          std::span<const Point> points);

MappedCouplings map_couplings(const Couplings& k);

enum class DislocationKind { Screw, Edge };

/// κ1 = G ln(R/r0) / 4π, divided by (1 − ν) for edge dislocations.
/// Throws InvalidMaterial unless R > r0 > 0, G > 0 and 0 < ν ≤ 0.5.
double dislocation_energy_coefficient(DislocationKind kind, const MaterialConstants& mat);

struct Box {
    std::array<double, 3> min{0.0, 0.0, 0.0};
    std::array<double, 3> max{1.0, 1.0, 1.0};
};

/// Midpoint rule for ∫ L over the box, resolution cells per axis (≥ 2).
double total_free_energy(const DefectFields& d, const Couplings& k, const CoFrame& e, const Box& box,
                         int resolution, unsigned threads = 1);

struct EnergyEstimate {
    double coarse = 0.0;      // resolution n
    double fine = 0.0;        // resolution 2n
    double richardson = 0.0;  // (4 fine − coarse) / 3
    double error = 0.0;       // |fine − richardson|
};

EnergyEstimate free_energy_estimate(const DefectFields& d, const Couplings& k, const CoFrame& e, const Box& box,
                                    int resolution, unsigned threads = 1);

}  // namespace defectgeo

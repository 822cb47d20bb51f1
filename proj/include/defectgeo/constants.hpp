#pragma once

#include <array>
#include <numbers>

namespace defectgeo {

/// Elastic and energy constants. Validated where they are used.
struct MaterialConstants {
    double lambda = 1.0;  // Lamé λ
    double mu = 1.0;      // Lamé μ (shear modulus of the Hooke law)
    double kappa = 0.0;   // must be 0 for the isotropic law
    double shear_modulus = 1.0;  // G of the dislocation energies
    double poisson_ratio = 0.3;  // ν
    double outer_radius = std::numbers::e;  // R
    double core_radius = 1.0;               // r0
};

/// κ1..κ7 of the defect free energy, stored 0-based.
struct Couplings {
    std::array<double, 7> kappa{};

    double operator()(int i) const { return kappa.at(static_cast<std::size_t>(i - 1)); }
};

}  // namespace defectgeo

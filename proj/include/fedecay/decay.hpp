#pragma once

#include <optional>
#include <vector>

#include "fedecay/assembly.hpp"
#include "fedecay/patches.hpp"

namespace fedecay {

/// Layer-wise energies of a discrete solution on a patch ladder, with the
/// contraction statistics used by the experiments.
struct DecayProfile {
    std::vector<double> energy;           // E(0..ell_max), nondecreasing by construction
    double total_energy = 0.0;            // squared energy norm over the whole mesh
    std::vector<double> relative_energy;  // E(l) / total
    std::vector<double> quotients;        // Q(l) = E_rel(l)/E_rel(l+1), l < ell_max
    std::optional<double> rho_hat;        // median of the quotients
    std::optional<double> mad;            // median absolute deviation
    double h = 0.0;
    double h_min = 0.0;
    double lambda = 0.0;

    int ell_max() const { return static_cast<int>(energy.size()) - 1; }
};

/// Energy restricted to a cell set; additive over disjoint sets.
double patch_energy(const DiscreteSolution& solution, const CellSet& cells);

/// Full profile over the ladder. Throws std::domain_error when the total
/// energy vanishes (g identically zero) since relative energies are undefined.
DecayProfile energy_profile(const DiscreteSolution& solution, const PatchLadder& ladder);

/// rho_hat^(1/h): the per-unit-length contraction tracked under refinement.
double scaled_rate(const DecayProfile& profile);

/// Residual |E(l) + flux over Z_{l+1}| / total of the layer flux identity that
/// the contraction proof rests on, for a homogeneous source. For lambda = 0
/// the flux uses the shifted function u_h - c with c the area mean of u_h over
/// the Z_{l+1} region when no P_l element owns a boundary dof, and c = 0
/// otherwise. Expected at solver-tolerance level.
double flux_identity_residual(const DiscreteSolution& solution, const PatchLadder& ladder,
                              int ell);

/// l* = floor(delta / h_min), with an ulp guard so that delta = l* h_min
/// resolves to l* exactly.
int fixed_width_layer(double delta, double h_min);

/// E(0) / E(l*) with l* = fixed_width_layer(delta, h_min).
/// Requires delta <= ell_max * h_min.
double fixed_width_ratio(const DiscreteSolution& solution, const PatchLadder& ladder,
                         double delta);

}  // namespace fedecay

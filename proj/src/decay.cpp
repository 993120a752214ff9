#include "fedecay/decay.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fedecay/quadrature.hpp"
#include "fedecay/stats.hpp"

namespace fedecay {

double patch_energy(const DiscreteSolution& solution, const CellSet& cells) {
    return energy_in_cells(solution, cells.ids());
}

DecayProfile energy_profile(const DiscreteSolution& solution, const PatchLadder& ladder) {
    DecayProfile profile;
    profile.lambda = solution.lambda;
    profile.h = ladder.mesh().h();
    profile.h_min = ladder.mesh().h_min();
    profile.total_energy = patch_energy(solution, CellSet::all(ladder.mesh().n_triangles()));
    if (!(profile.total_energy > 0.0))
        throw std::domain_error("energy_profile: zero total energy, profile is degenerate");

    // Accumulate ring by ring so that monotonicity holds exactly in floating
    // point (every ring contribution is a sum of nonnegative terms).
    profile.energy.resize(ladder.ell_max() + 1);
    profile.energy[0] = patch_energy(solution, ladder.base());
    for (int ell = 1; ell <= ladder.ell_max(); ++ell)
        profile.energy[ell] =
            profile.energy[ell - 1] + patch_energy(solution, boundary_layer(ladder, ell));

    profile.relative_energy.resize(profile.energy.size());
    for (std::size_t i = 0; i < profile.energy.size(); ++i)
        profile.relative_energy[i] = profile.energy[i] / profile.total_energy;

    profile.quotients.resize(ladder.ell_max(), std::numeric_limits<double>::quiet_NaN());
    std::vector<double> defined;
    for (int ell = 0; ell < ladder.ell_max(); ++ell) {
        const double next = profile.relative_energy[ell + 1];
        if (next > 0.0) {
            profile.quotients[ell] = profile.relative_energy[ell] / next;
            defined.push_back(profile.quotients[ell]);
        }
    }
    if (!defined.empty()) {
        profile.rho_hat = median(defined);
        profile.mad = median_absolute_deviation(defined);
    }
    return profile;
}

double scaled_rate(const DecayProfile& profile) {
    if (!profile.rho_hat || !(*profile.rho_hat > 0.0))
        throw std::domain_error("scaled_rate: profile has no positive contraction factor");
    return std::pow(*profile.rho_hat, 1.0 / profile.h);
}

namespace {

/// True when some element of P_l owns a dof whose nodal point lies on the
/// domain boundary. In that case the mean-shifted cutoff is not an admissible
/// test function and the shift constant must be zero.
bool patch_touches_boundary(const FESpace& space, const PatchLadder& ladder, int ell) {
    for (int t : ladder.patch(ell))
        for (int d : space.element_dofs(t))
            if (space.dof_on_boundary(d)) return true;
    return false;
}

double area_mean(const DiscreteSolution& solution, const CellSet& cells) {
    const FESpace& space = *solution.space;
    const auto& rule = quadrature(space.degree());
    const int nd = space.dofs_per_element();
    double values[6];
    double integral = 0.0, area = 0.0;
    for (int t : cells) {
        const auto dofs = space.element_dofs(t);
        const double jac = 2.0 * space.element_area(t);
        for (const auto& qp : rule.points()) {
            space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
            double u = 0.0;
            for (int i = 0; i < nd; ++i) u += solution.u[dofs[i]] * values[i];
            integral += qp.w * jac * u;
        }
        area += space.element_area(t);
    }
    return integral / area;
}

}  // namespace

double flux_identity_residual(const DiscreteSolution& solution, const PatchLadder& ladder,
                              int ell) {
    if (ell < 0 || ell >= ladder.ell_max())
        throw std::invalid_argument("flux_identity_residual: need 0 <= ell < ell_max, got " +
                                    std::to_string(ell));

    const FESpace& space = *solution.space;
    const CutoffFunction cutoff = build_cutoff(space, ladder, ell);
    const CellSet ring = boundary_layer(ladder, ell + 1);

    // Shift constant for the lambda = 0 branch (the gradient of a constant
    // vanishes, so the energy representation is unchanged).
    double shift = 0.0;
    if (solution.lambda == 0.0 && !patch_touches_boundary(space, ladder, ell))
        shift = area_mean(solution, ring);

    std::vector<double> shifted = solution.u;
    if (shift != 0.0)
        for (double& c : shifted) c -= shift;
    const std::vector<double> w = cutoff_apply(space, cutoff, shifted);

    const auto& rule = quadrature(2 * space.degree());
    const double lambda2 = solution.lambda * solution.lambda;
    const int nd = space.dofs_per_element();
    double values[6];
    Vec2 grads[6];
    auto apply_a = [](const Mat2& m, Vec2 v) -> Vec2 {
        return {m.a00 * v.x + m.a01 * v.y, m.a01 * v.x + m.a11 * v.y};
    };

    double flux = 0.0;
    for (int t : ring) {
        const auto dofs = space.element_dofs(t);
        const Mat2& ak = solution.field.on_element(t);
        const double jac = 2.0 * space.element_area(t);
        for (const auto& qp : rule.points()) {
            space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
            space.shape_gradients(t, qp.b0, qp.b1, qp.b2, {grads, grads + 6});
            double u = 0.0, wv = 0.0;
            Vec2 gu{}, gw{};
            for (int i = 0; i < nd; ++i) {
                u += solution.u[dofs[i]] * values[i];
                wv += w[dofs[i]] * values[i];
                gu = gu + grads[i] * solution.u[dofs[i]];
                gw = gw + grads[i] * w[dofs[i]];
            }
            flux += qp.w * jac * (dot(apply_a(ak, gu), gw) + lambda2 * u * wv);
        }
    }

    const double patch_e = patch_energy(solution, ladder.patch(ell));
    const double total = patch_energy(solution, CellSet::all(ladder.mesh().n_triangles()));
    if (!(total > 0.0)) return 0.0;
    return std::abs(patch_e + flux) / total;
}

int fixed_width_layer(double delta, double h_min) {
    return static_cast<int>(std::floor(delta / h_min * (1.0 + 1e-12)));
}

double fixed_width_ratio(const DiscreteSolution& solution, const PatchLadder& ladder,
                         double delta) {
    const double h_min = ladder.mesh().h_min();
    const int ell_star = fixed_width_layer(delta, h_min);
    if (ell_star > ladder.ell_max())
        throw std::invalid_argument("fixed_width_ratio: delta " + std::to_string(delta) +
                                    " exceeds ell_max * h_min");
    const double e0 = patch_energy(solution, ladder.base());
    const double el = patch_energy(solution, ladder.patch(ell_star));
    return e0 / el;
}

}  // namespace fedecay

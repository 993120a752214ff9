#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "fedecay/mesh.hpp"
#include "fedecay/space.hpp"

namespace fedecay {

/// cells plus every element sharing at least one vertex with them. On a
/// conforming simplicial mesh, vertex sharing is exactly closure intersection.
CellSet grow_patch(const Mesh& mesh, const CellSet& cells);

/// Nested element patches P_0 = D_h, P_{l+1} = grow(P_l), stored up to the
/// largest l whose patch stays clear of the lifting support's closure.
class PatchLadder {
public:
    PatchLadder(const Mesh& mesh, CellSet base, CellSet supp_lifting);

    const Mesh& mesh() const { return *mesh_; }
    const CellSet& base() const { return layers_.front(); }
    const CellSet& supp_lifting() const { return supp_lifting_; }

    int ell_max() const { return static_cast<int>(layers_.size()) - 1; }
    /// P_l for 0 <= l <= ell_max.
    const CellSet& patch(int ell) const;

private:
    const Mesh* mesh_;
    std::vector<CellSet> layers_;
    CellSet supp_lifting_;
};

/// Builds the ladder around a suitable D_h: no D_h element may touch Gamma,
/// and D_h must stay clear of the lifting support's closure. Throws a
/// precondition error naming the offending element otherwise.
PatchLadder build_ladder(const Mesh& mesh, const CellSet& d_h, const CellSet& supp_lifting);

/// Z_l = P_l \ P_{l-1} for 1 <= l <= ell_max.
CellSet boundary_layer(const PatchLadder& ladder, int ell);

/// Discrete cutoff: nodal indicator of the dofs owned by P_l. Its coefficients
/// are exactly one on P_l elements and exactly zero outside P_{l+1}.
struct CutoffFunction {
    std::vector<double> coeffs;
    int ell = 0;  // separates the pair (ell, ell + 1)
};

/// Requires ell + 1 <= ell_max of the ladder.
CutoffFunction build_cutoff(const FESpace& space, const PatchLadder& ladder, int ell);

/// The cutoff operator: nodal interpolation of the product, which reduces to
/// the per-dof product of coefficients.
std::vector<double> cutoff_apply(const FESpace& space, const CutoffFunction& cutoff,
                                 std::span<const double> v);

/// max over elements of the Linf norm of grad(eta); multiply by h_min for the
/// dimensionless constant reported in the experiments.
double cutoff_gradient_bound(const FESpace& space, const CutoffFunction& cutoff);

/// One "layer,element" row per cell: 0 for D_h, l for the ring Z_l.
void write_ladder_csv(const PatchLadder& ladder, std::ostream& out);

}  // namespace fedecay

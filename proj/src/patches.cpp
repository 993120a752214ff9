#include "fedecay/patches.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace fedecay {

CellSet grow_patch(const Mesh& mesh, const CellSet& cells) {
    std::vector<char> marked(mesh.n_triangles(), 0);
    for (int t : cells) marked[t] = 1;
    for (int t : cells)
        for (int v : mesh.triangle(t))
            for (int neighbor : mesh.vertex_elements(v)) marked[neighbor] = 1;
    std::vector<int> grown;
    for (int t = 0; t < mesh.n_triangles(); ++t)
        if (marked[t]) grown.push_back(t);
    return CellSet(std::move(grown), mesh.n_triangles());
}

PatchLadder::PatchLadder(const Mesh& mesh, CellSet base, CellSet supp_lifting)
    : mesh_(&mesh), supp_lifting_(std::move(supp_lifting)) {
    // Elements whose closure intersects the closed lifting support are exactly
    // those sharing a vertex with a support cell, i.e. grow(supp).
    const CellSet forbidden = grow_patch(mesh, supp_lifting_);

    layers_.push_back(std::move(base));
    for (;;) {
        CellSet next = grow_patch(mesh, layers_.back());
        if (intersects(next, forbidden)) break;
        const bool saturated = next == layers_.back();
        layers_.push_back(std::move(next));
        if (saturated) break;
    }
}

const CellSet& PatchLadder::patch(int ell) const {
    if (ell < 0 || ell > ell_max())
        throw std::invalid_argument("PatchLadder::patch: layer index " + std::to_string(ell) +
                                    " out of range [0," + std::to_string(ell_max()) + "]");
    return layers_[ell];
}

PatchLadder build_ladder(const Mesh& mesh, const CellSet& d_h, const CellSet& supp_lifting) {
    for (int t : d_h) {
        for (int v : mesh.triangle(t)) {
            if (mesh.vertex_on_tag(v, BoundaryTag::Gamma))
                throw std::invalid_argument("build_ladder: D_h is not suitable, element " +
                                            std::to_string(t) + " touches Gamma");
        }
    }
    const CellSet forbidden = grow_patch(mesh, supp_lifting);
    for (int t : d_h) {
        if (forbidden.contains(t))
            throw std::invalid_argument("build_ladder: element " + std::to_string(t) +
                                        " of D_h touches the lifting support");
    }
    return PatchLadder(mesh, d_h, supp_lifting);
}

CellSet boundary_layer(const PatchLadder& ladder, int ell) {
    if (ell < 1 || ell > ladder.ell_max())
        throw std::invalid_argument("boundary_layer: layer index " + std::to_string(ell) +
                                    " out of range [1," + std::to_string(ladder.ell_max()) + "]");
    return set_difference(ladder.patch(ell), ladder.patch(ell - 1));
}

CutoffFunction build_cutoff(const FESpace& space, const PatchLadder& ladder, int ell) {
    if (ell < 0 || ell + 1 > ladder.ell_max())
        throw std::invalid_argument("build_cutoff: need 0 <= ell and ell + 1 <= ell_max, got " +
                                    std::to_string(ell));
    CutoffFunction cutoff;
    cutoff.ell = ell;
    cutoff.coeffs.assign(space.n_dofs(), 0.0);
    for (int t : ladder.patch(ell))
        for (int d : space.element_dofs(t)) cutoff.coeffs[d] = 1.0;
    return cutoff;
}

std::vector<double> cutoff_apply(const FESpace& space, const CutoffFunction& cutoff,
                                 std::span<const double> v) {
    if (v.size() != cutoff.coeffs.size() || v.size() != static_cast<std::size_t>(space.n_dofs()))
        throw std::invalid_argument("cutoff_apply: coefficient vector size mismatch");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = cutoff.coeffs[i] * v[i];
    return out;
}

double cutoff_gradient_bound(const FESpace& space, const CutoffFunction& cutoff) {
    // The gradient of a P1/P2 function is (component-wise) affine, so its
    // Euclidean norm is maximal at a vertex of the element.
    const int nd = space.dofs_per_element();
    constexpr double corners[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    Vec2 grads[6];
    double bound = 0.0;
    for (int t = 0; t < space.mesh().n_triangles(); ++t) {
        const auto dofs = space.element_dofs(t);
        for (const auto& c : corners) {
            space.shape_gradients(t, c[0], c[1], c[2], {grads, grads + 6});
            Vec2 g{};
            for (int i = 0; i < nd; ++i) g = g + grads[i] * cutoff.coeffs[dofs[i]];
            bound = std::max(bound, norm(g));
        }
    }
    return bound;
}

void write_ladder_csv(const PatchLadder& ladder, std::ostream& out) {
    out << "layer,element\n";
    for (int t : ladder.base()) out << "0," << t << "\n";
    for (int ell = 1; ell <= ladder.ell_max(); ++ell)
        for (int t : boundary_layer(ladder, ell)) out << ell << "," << t << "\n";
}

}  // namespace fedecay

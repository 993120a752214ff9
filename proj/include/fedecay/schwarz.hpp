#pragma once

#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "fedecay/assembly.hpp"
#include "fedecay/mesh.hpp"
#include "fedecay/space.hpp"

namespace fedecay {

/// Extracted conforming submesh of a parent mesh with dof maps in both
/// directions. Submesh boundary edges that coincide with parent boundary
/// edges are tagged GammaC (outer boundary); the remaining ones form the
/// interface and are tagged Gamma.
class Subdomain {
public:
    Subdomain(const FESpace& parent_space, CellSet cells);

    const FESpace& parent_space() const { return *parent_space_; }
    const CellSet& cells() const { return cells_; }
    const Mesh& mesh() const { return *mesh_; }
    const FESpace& space() const { return *space_; }

    int parent_dof(int sub_dof) const { return dof_to_parent_[sub_dof]; }
    /// -1 when the parent dof does not belong to this subdomain.
    int sub_dof(int parent_dof) const;

    /// Interface dofs strictly inside the parent domain.
    const std::vector<int>& interface_dofs() const { return interface_dofs_; }
    /// Dofs on the parent domain boundary.
    const std::vector<int>& outer_dofs() const { return outer_dofs_; }

    std::vector<double> restrict_from_parent(std::span<const double> parent_coeffs) const;

private:
    const FESpace* parent_space_;
    CellSet cells_;
    std::unique_ptr<Mesh> mesh_;
    std::unique_ptr<FESpace> space_;
    std::vector<int> dof_to_parent_;
    std::unordered_map<int, int> parent_to_sub_;
    std::vector<int> interface_dofs_;
    std::vector<int> outer_dofs_;
};

/// Splits a structured rectangle grid into two vertical strips overlapping in
/// exactly ell_ov element columns: with c = floor((nx - ell_ov) / 2), the
/// first strip covers columns 1..c+ell_ov and the second c+1..nx (1-based).
std::pair<Subdomain, Subdomain> decompose_rectangle(const FESpace& parent_space, int ell_ov);

/// Global FEM solution of -Laplace(u) = f with u = 0 on the whole boundary.
DiscreteSolution global_reference(const FESpace& space, const ScalarField& f, double tol);

struct SchwarzOptions {
    int n_iters = 20;
    double tol = kDefaultSolverTol;
    /// Stop once the error drops below 100 * tol^2 * reference energy.
    bool stop_at_floor = true;
};

struct SchwarzTrace {
    // Entry n holds the error of the n-th iterates; entry 0 is the initial guess.
    std::vector<double> total_error;
    std::vector<double> error_sub1;
    std::vector<double> error_sub2;
    double floor = 0.0;
    double reference_energy = 0.0;
};

/// Parallel (Jacobi) Schwarz iteration: both subdomain problems take their
/// interface data from the previous iterates and run concurrently. Errors are
/// squared H1 seminorms against the restricted global solution.
SchwarzTrace schwarz_iterate(const Subdomain& sub1, const Subdomain& sub2, const ScalarField& f,
                             std::span<const double> init1, std::span<const double> init2,
                             const DiscreteSolution& reference, const SchwarzOptions& options);

struct ThetaEstimate {
    double geomean = 0.0;
    double sup = 0.0;
    int ratios_used = 0;
};

/// Contraction factor from the recorded errors above the tolerance floor:
/// geometric mean of successive ratios (the supremum is reported alongside).
/// Needs at least three usable entries.
ThetaEstimate estimate_theta(const SchwarzTrace& trace);

}  // namespace fedecay

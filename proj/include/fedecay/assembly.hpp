#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fedecay/mesh.hpp"
#include "fedecay/space.hpp"
#include "fedecay/sparse.hpp"

namespace fedecay {

struct Mat2 {
    double a00 = 1.0, a01 = 0.0, a11 = 1.0;  // symmetric 2x2
};

/// Piecewise-constant SPD diffusion coefficient with global eigenvalue bounds
/// alpha <= A_K <= beta. Default: identity on every element.
class CoefficientField {
public:
    CoefficientField() = default;  // identity, alpha = beta = 1

    static CoefficientField identity();
    static CoefficientField constant(const Mat2& a);
    static CoefficientField per_element(std::vector<Mat2> matrices);

    const Mat2& on_element(int t) const {
        return matrices_.empty() ? identity_ : matrices_[uniform_ ? 0 : t];
    }
    double alpha() const { return alpha_; }
    double beta() const { return beta_; }

private:
    std::vector<Mat2> matrices_;
    bool uniform_ = true;
    double alpha_ = 1.0;
    double beta_ = 1.0;
    static const Mat2 identity_;

    void compute_bounds();
};

using ScalarField = std::function<double(Vec2)>;

/// Entries int_Omega A grad(phi_i) . grad(phi_j); exact for piecewise-constant A.
SparseSPDMatrix assemble_stiffness(const FESpace& space, const CoefficientField& a);

/// Entries int_Omega phi_i phi_j, integrated exactly to degree 2k.
SparseSPDMatrix assemble_mass(const FESpace& space);

/// Load vector (f, phi_i), integrated with exactness 2k.
std::vector<double> assemble_load(const FESpace& space, const ScalarField& f);

/// Canonical nodal lifting: value g(a) at Gamma dofs, zero at every other dof
/// (GammaC dofs carry the extension by zero).
std::vector<double> nodal_lifting(const FESpace& space, const ScalarField& g);

/// Discrete solution split u_h = u_h0 + u_hg together with the problem data
/// that defines its energy.
struct DiscreteSolution {
    const FESpace* space = nullptr;
    double lambda = 0.0;
    CoefficientField field;
    std::vector<double> u;       // full coefficient vector u_h
    std::vector<double> u_g;     // lifting u_hg
    std::vector<double> u_0;     // interior part u_h0 = u_h - u_hg
    CellSet lifting_support;     // elements owning a nonzero lifting dof
    int iterations = 0;          // CG iterations of the reducing solve
    double residual = 0.0;       // final relative residual
};

inline constexpr double kDefaultSolverTol = 1e-12;

/// Solves the lifted Dirichlet problem with the supplied lifting coefficients.
/// All boundary dofs are eliminated; interior dofs solve
/// (S + lambda^2 M) u_0 = F - (S + lambda^2 M) u_g restricted to the interior.
DiscreteSolution solve_lifted(const FESpace& space, const CoefficientField& a, double lambda,
                              std::vector<double> lifting, const ScalarField* f, double tol);

/// Dirichlet solve with datum g on Gamma, zero on GammaC and optional source f.
/// Requires lambda > 0 or a nonempty GammaC part (throws SingularProblemError
/// otherwise).
DiscreteSolution solve_dirichlet(const FESpace& space, const CoefficientField& a, double lambda,
                                 const ScalarField& g, const ScalarField* f = nullptr,
                                 double tol = kDefaultSolverTol);

/// Energy of the solution restricted to a subset of elements:
/// sum over cells of int_K A grad(u_h).grad(u_h) + lambda^2 u_h^2.
double energy_in_cells(const DiscreteSolution& solution, std::span<const int> cells);

/// Natural energy norm (A-seminorm plus lambda-weighted L2) of the solution.
double energy_norm(const DiscreteSolution& solution);

}  // namespace fedecay

#include "fedecay/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fedecay/errors.hpp"
#include "fedecay/quadrature.hpp"

namespace fedecay {

const Mat2 CoefficientField::identity_ = {1.0, 0.0, 1.0};

namespace {

std::pair<double, double> eigenvalues(const Mat2& m) {
    const double tr = m.a00 + m.a11;
    const double det = m.a00 * m.a11 - m.a01 * m.a01;
    const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    return {0.5 * tr - disc, 0.5 * tr + disc};
}

Vec2 apply(const Mat2& m, Vec2 v) {
    return {m.a00 * v.x + m.a01 * v.y, m.a01 * v.x + m.a11 * v.y};
}

void scatter_local(std::vector<Triplet>& triplets, std::span<const int> dofs, int nd,
                   const double local[6][6]) {
    for (int i = 0; i < nd; ++i) {
        triplets.push_back({dofs[i], dofs[i], local[i][i]});
        for (int j = 0; j < i; ++j) {
            triplets.push_back({dofs[i], dofs[j], local[i][j]});
            triplets.push_back({dofs[j], dofs[i], local[i][j]});
        }
    }
}

/// One-pass assembly of stiffness + lambda^2 * mass. The degree-2k rule is
/// exact for both terms with piecewise-constant A.
SparseSPDMatrix assemble_system_matrix(const FESpace& space, const CoefficientField& a,
                                       double lambda) {
    const int nd = space.dofs_per_element();
    const double lambda2 = lambda * lambda;
    const auto& rule = quadrature(2 * space.degree());
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(space.mesh().n_triangles()) * nd * nd);

    double values[6];
    Vec2 grads[6];
    for (int t = 0; t < space.mesh().n_triangles(); ++t) {
        const auto dofs = space.element_dofs(t);
        const Mat2& ak = a.on_element(t);
        const double jac = 2.0 * space.element_area(t);
        double local[6][6] = {};
        for (const auto& qp : rule.points()) {
            space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
            space.shape_gradients(t, qp.b0, qp.b1, qp.b2, {grads, grads + 6});
            const double w = qp.w * jac;
            for (int i = 0; i < nd; ++i) {
                const Vec2 agi = apply(ak, grads[i]);
                for (int j = 0; j <= i; ++j)
                    local[i][j] += w * (dot(agi, grads[j]) + lambda2 * values[i] * values[j]);
            }
        }
        scatter_local(triplets, dofs, nd, local);
    }
    return SparseSPDMatrix::from_triplets(space.n_dofs(), std::move(triplets));
}

CellSet support_cells(const FESpace& space, const std::vector<double>& coeffs) {
    std::vector<int> cells;
    for (int t = 0; t < space.mesh().n_triangles(); ++t) {
        for (int d : space.element_dofs(t)) {
            if (coeffs[d] != 0.0) {
                cells.push_back(t);
                break;
            }
        }
    }
    return CellSet(std::move(cells), space.mesh().n_triangles());
}

int iteration_cap(int n) {
    return std::max(5000, 200 + 50 * static_cast<int>(std::sqrt(static_cast<double>(n))));
}

}  // namespace

void CoefficientField::compute_bounds() {
    alpha_ = std::numeric_limits<double>::max();
    beta_ = 0.0;
    for (const auto& m : matrices_) {
        auto [lo, hi] = eigenvalues(m);
        if (!(lo > 0.0))
            throw std::invalid_argument("CoefficientField: matrix is not positive definite");
        alpha_ = std::min(alpha_, lo);
        beta_ = std::max(beta_, hi);
    }
    if (matrices_.empty()) alpha_ = beta_ = 1.0;
}

CoefficientField CoefficientField::identity() { return CoefficientField(); }

CoefficientField CoefficientField::constant(const Mat2& a) {
    CoefficientField f;
    f.matrices_ = {a};
    f.uniform_ = true;
    f.compute_bounds();
    return f;
}

CoefficientField CoefficientField::per_element(std::vector<Mat2> matrices) {
    CoefficientField f;
    f.matrices_ = std::move(matrices);
    f.uniform_ = false;
    f.compute_bounds();
    return f;
}

SparseSPDMatrix assemble_stiffness(const FESpace& space, const CoefficientField& a) {
    const int nd = space.dofs_per_element();
    const auto& rule = quadrature(std::max(2 * (space.degree() - 1), 0));
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(space.mesh().n_triangles()) * nd * nd);

    Vec2 grads[6];
    for (int t = 0; t < space.mesh().n_triangles(); ++t) {
        const auto dofs = space.element_dofs(t);
        const Mat2& ak = a.on_element(t);
        const double jac = 2.0 * space.element_area(t);
        double local[6][6] = {};
        for (const auto& qp : rule.points()) {
            space.shape_gradients(t, qp.b0, qp.b1, qp.b2, {grads, grads + 6});
            const double w = qp.w * jac;
            for (int i = 0; i < nd; ++i) {
                const Vec2 agi = apply(ak, grads[i]);
                for (int j = 0; j <= i; ++j) local[i][j] += w * dot(agi, grads[j]);
            }
        }
        scatter_local(triplets, dofs, nd, local);
    }
    return SparseSPDMatrix::from_triplets(space.n_dofs(), std::move(triplets));
}

SparseSPDMatrix assemble_mass(const FESpace& space) {
    const int nd = space.dofs_per_element();
    const auto& rule = quadrature(2 * space.degree());
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(space.mesh().n_triangles()) * nd * nd);

    double values[6];
    for (int t = 0; t < space.mesh().n_triangles(); ++t) {
        const auto dofs = space.element_dofs(t);
        const double jac = 2.0 * space.element_area(t);
        double local[6][6] = {};
        for (const auto& qp : rule.points()) {
            space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
            const double w = qp.w * jac;
            for (int i = 0; i < nd; ++i)
                for (int j = 0; j <= i; ++j) local[i][j] += w * values[i] * values[j];
        }
        scatter_local(triplets, dofs, nd, local);
    }
    return SparseSPDMatrix::from_triplets(space.n_dofs(), std::move(triplets));
}

std::vector<double> assemble_load(const FESpace& space, const ScalarField& f) {
    const int nd = space.dofs_per_element();
    const auto& rule = quadrature(2 * space.degree());
    std::vector<double> load(space.n_dofs(), 0.0);

    double values[6];
    for (int t = 0; t < space.mesh().n_triangles(); ++t) {
        const auto dofs = space.element_dofs(t);
        const auto& tri = space.mesh().triangle(t);
        const Vec2 p0 = space.mesh().vertex(tri[0]);
        const Vec2 p1 = space.mesh().vertex(tri[1]);
        const Vec2 p2 = space.mesh().vertex(tri[2]);
        const double jac = 2.0 * space.element_area(t);
        for (const auto& qp : rule.points()) {
            space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
            const Vec2 x = p0 * qp.b0 + p1 * qp.b1 + p2 * qp.b2;
            const double w = qp.w * jac * f(x);
            for (int i = 0; i < nd; ++i) load[dofs[i]] += w * values[i];
        }
    }
    return load;
}

std::vector<double> nodal_lifting(const FESpace& space, const ScalarField& g) {
    std::vector<double> lifting(space.n_dofs(), 0.0);
    for (int d : space.gamma_dofs()) lifting[d] = g(space.dof_point(d));
    return lifting;
}

DiscreteSolution solve_lifted(const FESpace& space, const CoefficientField& a, double lambda,
                              std::vector<double> lifting, const ScalarField* f, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("solve_lifted: tolerance must be positive");
    if (lambda < 0.0) throw std::invalid_argument("solve_lifted: lambda must be nonnegative");
    const int n = space.n_dofs();
    if (static_cast<int>(lifting.size()) != n)
        throw std::invalid_argument("solve_lifted: lifting vector size mismatch");

    DiscreteSolution sol;
    sol.space = &space;
    sol.lambda = lambda;
    sol.field = a;
    sol.u_g = std::move(lifting);
    sol.lifting_support = support_cells(space, sol.u_g);
    sol.u_0.assign(n, 0.0);

    std::vector<int> interior;
    interior.reserve(n);
    for (int d = 0; d < n; ++d)
        if (!space.dof_on_boundary(d)) interior.push_back(d);

    if (!interior.empty()) {
        const SparseSPDMatrix system = assemble_system_matrix(space, a, lambda);
        const std::vector<double> a_ug = system.multiply(sol.u_g);
        std::vector<double> load;
        if (f) load = assemble_load(space, *f);

        std::vector<double> rhs(interior.size());
        for (std::size_t i = 0; i < interior.size(); ++i) {
            const int d = interior[i];
            rhs[i] = (f ? load[d] : 0.0) - a_ug[d];
        }

        const SparseSPDMatrix reduced = system.restrict_to(interior);
        const CgResult cg = cg_solve(reduced, rhs, tol, iteration_cap(n));
        for (std::size_t i = 0; i < interior.size(); ++i) sol.u_0[interior[i]] = cg.x[i];
        sol.iterations = cg.iterations;
        sol.residual = cg.residual;
    }

    sol.u = sol.u_0;
    for (int d = 0; d < n; ++d) sol.u[d] += sol.u_g[d];
    return sol;
}

DiscreteSolution solve_dirichlet(const FESpace& space, const CoefficientField& a, double lambda,
                                 const ScalarField& g, const ScalarField* f, double tol) {
    const bool gamma_c_nonempty = [&space] {
        for (const auto& e : space.mesh().boundary_edges())
            if (e.tag == BoundaryTag::GammaC) return true;
        return false;
    }();
    if (!(lambda > 0.0) && !gamma_c_nonempty)
        throw SingularProblemError(
            "solve_dirichlet: lambda = 0 with Gamma equal to the whole boundary violates the "
            "coercivity assumption (lambda > 0 or GammaC nonempty)");
    return solve_lifted(space, a, lambda, nodal_lifting(space, g), f, tol);
}

double energy_in_cells(const DiscreteSolution& solution, std::span<const int> cells) {
    const FESpace& space = *solution.space;
    const auto& rule = quadrature(2 * space.degree());
    const double lambda2 = solution.lambda * solution.lambda;
    const int nd = space.dofs_per_element();

    double values[6];
    Vec2 grads[6];
    double total = 0.0;
    for (int t : cells) {
        const auto dofs = space.element_dofs(t);
        const Mat2& ak = solution.field.on_element(t);
        const double jac = 2.0 * space.element_area(t);
        double cell_energy = 0.0;
        for (const auto& qp : rule.points()) {
            space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
            space.shape_gradients(t, qp.b0, qp.b1, qp.b2, {grads, grads + 6});
            double u = 0.0;
            Vec2 gu{};
            for (int i = 0; i < nd; ++i) {
                const double c = solution.u[dofs[i]];
                u += c * values[i];
                gu = gu + grads[i] * c;
            }
            cell_energy += qp.w * jac * (dot(apply(ak, gu), gu) + lambda2 * u * u);
        }
        total += cell_energy;
    }
    return total;
}

double energy_norm(const DiscreteSolution& solution) {
    const CellSet all = CellSet::all(solution.space->mesh().n_triangles());
    return std::sqrt(energy_in_cells(solution, all.ids()));
}

}  // namespace fedecay

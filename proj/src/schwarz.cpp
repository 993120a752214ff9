#include "fedecay/schwarz.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "fedecay/errors.hpp"
#include "fedecay/sparse.hpp"

namespace fedecay {

Subdomain::Subdomain(const FESpace& parent_space, CellSet cells)
    : parent_space_(&parent_space), cells_(std::move(cells)) {
    const Mesh& parent = parent_space.mesh();
    if (cells_.empty()) throw std::invalid_argument("Subdomain: empty cell set");

    // Renumber the vertices used by the cell set.
    std::vector<int> vertex_map(parent.n_vertices(), -1);
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(cells_.size());
    for (int t : cells_) {
        std::array<int, 3> tri{};
        const auto& ptri = parent.triangle(t);
        for (int k = 0; k < 3; ++k) {
            int& mapped = vertex_map[ptri[k]];
            if (mapped < 0) {
                mapped = static_cast<int>(vertices.size());
                vertices.push_back(parent.vertex(ptri[k]));
            }
            tri[k] = mapped;
        }
        triangles.push_back(tri);
    }

    // Submesh boundary: edges adjacent to exactly one subdomain triangle.
    // Edges inherited from the parent boundary are the outer part (GammaC);
    // the rest is the interface (Gamma).
    std::set<std::pair<int, int>> parent_boundary;
    for (const auto& e : parent.boundary_edges())
        parent_boundary.insert(std::minmax(e.a, e.b));

    std::map<std::pair<int, int>, std::pair<int, int>> edge_count;  // sub edge -> (count, parent a)
    for (std::size_t i = 0; i < triangles.size(); ++i) {
        const int t = cells_.ids()[i];
        const auto& ptri = parent.triangle(t);
        for (int k = 0; k < 3; ++k) {
            const auto sub_edge = std::minmax(triangles[i][k], triangles[i][(k + 1) % 3]);
            auto [it, inserted] = edge_count.emplace(sub_edge, std::pair{0, 0});
            it->second.first++;
            it->second.second = parent_boundary.count(std::minmax(ptri[k], ptri[(k + 1) % 3]));
        }
    }
    std::vector<BoundaryEdge> boundary;
    for (const auto& [edge, info] : edge_count) {
        if (info.first != 1) continue;
        boundary.push_back({edge.first, edge.second,
                            info.second ? BoundaryTag::GammaC : BoundaryTag::Gamma});
    }

    mesh_ = std::make_unique<Mesh>(std::move(vertices), std::move(triangles), std::move(boundary));
    space_ = std::make_unique<FESpace>(*mesh_, parent_space.degree());

    // Local dof orderings agree element by element, which gives the dof map
    // without any geometric matching.
    dof_to_parent_.assign(space_->n_dofs(), -1);
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        const int t = cells_.ids()[i];
        const auto sub_dofs = space_->element_dofs(static_cast<int>(i));
        const auto par_dofs = parent_space.element_dofs(t);
        for (int k = 0; k < space_->dofs_per_element(); ++k)
            dof_to_parent_[sub_dofs[k]] = par_dofs[k];
    }
    parent_to_sub_.reserve(dof_to_parent_.size());
    for (int d = 0; d < space_->n_dofs(); ++d) parent_to_sub_.emplace(dof_to_parent_[d], d);

    for (int d : space_->gamma_dofs())
        if (!space_->dof_on_tag(d, BoundaryTag::GammaC)) interface_dofs_.push_back(d);
    outer_dofs_ = space_->gamma_c_dofs();
}

int Subdomain::sub_dof(int parent_dof) const {
    auto it = parent_to_sub_.find(parent_dof);
    return it == parent_to_sub_.end() ? -1 : it->second;
}

std::vector<double> Subdomain::restrict_from_parent(std::span<const double> parent_coeffs) const {
    std::vector<double> out(space_->n_dofs());
    for (int d = 0; d < space_->n_dofs(); ++d) out[d] = parent_coeffs[dof_to_parent_[d]];
    return out;
}

std::pair<Subdomain, Subdomain> decompose_rectangle(const FESpace& parent_space, int ell_ov) {
    const Mesh& mesh = parent_space.mesh();

    std::set<double> x_coords;
    for (const Vec2& v : mesh.vertices()) x_coords.insert(v.x);
    const std::vector<double> xs(x_coords.begin(), x_coords.end());
    const int nx = static_cast<int>(xs.size()) - 1;
    if (nx < 3)
        throw std::invalid_argument("decompose_rectangle: grid too narrow to decompose");
    if (ell_ov < 1 || ell_ov > nx - 2)
        throw std::invalid_argument("decompose_rectangle: overlap must lie in [1," +
                                    std::to_string(nx - 2) + "], got " + std::to_string(ell_ov));

    // Column of an element from its centroid; rejects non-grid layouts.
    std::vector<std::vector<int>> columns(nx);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double cx = mesh.centroid(t).x;
        const auto it = std::upper_bound(xs.begin(), xs.end(), cx);
        const int col = static_cast<int>(it - xs.begin()) - 1;
        if (col < 0 || col >= nx)
            throw std::invalid_argument("decompose_rectangle: mesh is not a structured grid");
        columns[col].push_back(t);
    }
    for (const auto& col : columns)
        if (col.empty())
            throw std::invalid_argument("decompose_rectangle: mesh is not a structured grid");

    const int c = (nx - ell_ov) / 2;
    std::vector<int> cells1, cells2;
    for (int col = 0; col < nx; ++col) {
        if (col < c + ell_ov) cells1.insert(cells1.end(), columns[col].begin(), columns[col].end());
        if (col >= c) cells2.insert(cells2.end(), columns[col].begin(), columns[col].end());
    }
    return {Subdomain(parent_space, CellSet(std::move(cells1), mesh.n_triangles())),
            Subdomain(parent_space, CellSet(std::move(cells2), mesh.n_triangles()))};
}

DiscreteSolution global_reference(const FESpace& space, const ScalarField& f, double tol) {
    return solve_lifted(space, CoefficientField::identity(), 0.0,
                        std::vector<double>(space.n_dofs(), 0.0), &f, tol);
}

namespace {

/// Per-subdomain solver state reused across iterations.
struct StripSolver {
    const Subdomain* sub;
    SparseSPDMatrix stiffness;          // full, A = I
    std::vector<int> interior;
    SparseSPDMatrix reduced;
    std::vector<double> load;

    explicit StripSolver(const Subdomain& s)
        : sub(&s), stiffness(assemble_stiffness(s.space(), CoefficientField::identity())) {
        const FESpace& space = s.space();
        for (int d = 0; d < space.n_dofs(); ++d)
            if (!space.dof_on_boundary(d)) interior.push_back(d);
        reduced = stiffness.restrict_to(interior);
    }

    /// One half-step: solve with interface data copied from the other strip's
    /// previous iterate.
    std::vector<double> solve(const std::vector<double>& other_prev, const Subdomain& other,
                              const std::vector<double>& warm_start, double tol) const {
        const FESpace& space = sub->space();
        std::vector<double> next(space.n_dofs(), 0.0);
        for (int d : sub->interface_dofs()) {
            const int od = other.sub_dof(sub->parent_dof(d));
            // The interface lies inside the other strip by construction.
            next[d] = other_prev[od];
        }

        const std::vector<double> a_lift = stiffness.multiply(next);
        std::vector<double> rhs(interior.size());
        std::vector<double> x0(interior.size());
        for (std::size_t i = 0; i < interior.size(); ++i) {
            rhs[i] = load[interior[i]] - a_lift[interior[i]];
            x0[i] = warm_start[interior[i]];
        }
        const CgResult cg =
            cg_solve(reduced, rhs, tol, 5000 + 50 * static_cast<int>(std::sqrt(rhs.size())), x0);
        for (std::size_t i = 0; i < interior.size(); ++i) next[interior[i]] = cg.x[i];
        return next;
    }

    double error_energy(const std::vector<double>& u, const std::vector<double>& ref) const {
        std::vector<double> d(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) d[i] = u[i] - ref[i];
        const std::vector<double> sd = stiffness.multiply(d);
        double e = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) e += d[i] * sd[i];
        return e;
    }
};

}  // namespace

SchwarzTrace schwarz_iterate(const Subdomain& sub1, const Subdomain& sub2, const ScalarField& f,
                             std::span<const double> init1, std::span<const double> init2,
                             const DiscreteSolution& reference, const SchwarzOptions& options) {
    if (options.n_iters < 1)
        throw std::invalid_argument("schwarz_iterate: need at least one iteration");
    if (&sub1.parent_space() != &sub2.parent_space() ||
        reference.space != &sub1.parent_space())
        throw std::invalid_argument("schwarz_iterate: subdomains/reference mismatch");

    StripSolver solver1(sub1), solver2(sub2);
    solver1.load = assemble_load(sub1.space(), f);
    solver2.load = assemble_load(sub2.space(), f);

    const std::vector<double> ref1 = sub1.restrict_from_parent(reference.u);
    const std::vector<double> ref2 = sub2.restrict_from_parent(reference.u);

    SchwarzTrace trace;
    trace.reference_energy =
        energy_in_cells(reference, CellSet::all(reference.space->mesh().n_triangles()).ids());
    trace.floor = 100.0 * options.tol * options.tol * trace.reference_energy;

    std::vector<double> u1(init1.begin(), init1.end());
    std::vector<double> u2(init2.begin(), init2.end());
    if (u1.size() != static_cast<std::size_t>(sub1.space().n_dofs()) ||
        u2.size() != static_cast<std::size_t>(sub2.space().n_dofs()))
        throw std::invalid_argument("schwarz_iterate: initial iterate size mismatch");

    auto record = [&] {
        const double e1 = solver1.error_energy(u1, ref1);
        const double e2 = solver2.error_energy(u2, ref2);
        trace.error_sub1.push_back(e1);
        trace.error_sub2.push_back(e2);
        trace.total_error.push_back(e1 + e2);
        return e1 + e2;
    };

    double error = record();
    for (int n = 0; n < options.n_iters; ++n) {
        if (options.stop_at_floor && error < trace.floor) break;
        // Both strip solves read only previous iterates; run them concurrently.
        auto future1 = std::async(std::launch::async, [&] {
            return solver1.solve(u2, sub2, u1, options.tol);
        });
        std::vector<double> next2 = solver2.solve(u1, sub1, u2, options.tol);
        std::vector<double> next1 = future1.get();
        u1 = std::move(next1);
        u2 = std::move(next2);
        error = record();
    }
    return trace;
}

ThetaEstimate estimate_theta(const SchwarzTrace& trace) {
    std::vector<double> usable;
    for (double e : trace.total_error) {
        if (e <= trace.floor || e <= 0.0) break;
        usable.push_back(e);
    }
    if (usable.size() < 3)
        throw std::domain_error(
            "estimate_theta: need at least 3 error values above the tolerance floor, got " +
            std::to_string(usable.size()));
    std::vector<double> ratios(usable.size() - 1);
    for (std::size_t i = 0; i + 1 < usable.size(); ++i) ratios[i] = usable[i + 1] / usable[i];

    ThetaEstimate est;
    est.ratios_used = static_cast<int>(ratios.size());
    est.sup = *std::max_element(ratios.begin(), ratios.end());
    double log_sum = 0.0;
    for (double r : ratios) log_sum += std::log(r);
    est.geomean = std::exp(log_sum / static_cast<double>(ratios.size()));
    return est;
}

}  // namespace fedecay

#include "fedecay/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <stdexcept>

#include "fedecay/quadrature.hpp"

namespace fedecay {

FESpace::FESpace(const Mesh& mesh, int degree) : mesh_(&mesh), degree_(degree) {
    if (degree != 1 && degree != 2)
        throw std::invalid_argument("FESpace: unsupported degree " + std::to_string(degree) +
                                    " (only 1 and 2)");

    const int nv = mesh.n_vertices();
    const int nt = mesh.n_triangles();

    // Edge dofs (k = 2) keyed by sorted vertex pairs; lexicographic order of
    // the pairs fixes the global numbering.
    if (degree_ == 2) {
        for (int t = 0; t < nt; ++t) {
            const auto& tri = mesh.triangle(t);
            for (int k = 0; k < 3; ++k) {
                int u = tri[k], v = tri[(k + 1) % 3];
                if (u > v) std::swap(u, v);
                edge_dofs_.emplace(std::pair{u, v}, -1);
            }
        }
        int next = nv;
        for (auto& [edge, dof] : edge_dofs_) dof = next++;
        n_dofs_ = next;
    } else {
        n_dofs_ = nv;
    }

    dof_points_.resize(n_dofs_);
    for (int v = 0; v < nv; ++v) dof_points_[v] = mesh.vertex(v);
    for (const auto& [edge, dof] : edge_dofs_)
        dof_points_[dof] = (mesh.vertex(edge.first) + mesh.vertex(edge.second)) * 0.5;

    const int nd = dofs_per_element();
    element_dofs_.resize(static_cast<std::size_t>(nt) * nd);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangle(t);
        int* dofs = element_dofs_.data() + static_cast<std::size_t>(t) * nd;
        dofs[0] = tri[0];
        dofs[1] = tri[1];
        dofs[2] = tri[2];
        if (degree_ == 2) {
            for (int k = 0; k < 3; ++k) {
                int u = tri[k], v = tri[(k + 1) % 3];
                if (u > v) std::swap(u, v);
                dofs[3 + k] = edge_dofs_.at({u, v});  // local 3: (0,1), 4: (1,2), 5: (2,0)
            }
        }
    }

    dof_flags_.assign(n_dofs_, 0);
    for (const auto& e : mesh.boundary_edges()) {
        const unsigned char bit = (e.tag == BoundaryTag::Gamma) ? 1 : 2;
        dof_flags_[e.a] |= bit;
        dof_flags_[e.b] |= bit;
        if (degree_ == 2) {
            int u = e.a, v = e.b;
            if (u > v) std::swap(u, v);
            dof_flags_[edge_dofs_.at({u, v})] |= bit;
        }
    }
    for (int d = 0; d < n_dofs_; ++d) {
        if (dof_flags_[d] & 1) gamma_dofs_.push_back(d);
        if (dof_flags_[d] & 2) gamma_c_dofs_.push_back(d);
        if (dof_flags_[d]) boundary_dofs_.push_back(d);
    }

    grad_lambda_.resize(nt);
    area_.resize(nt);
    for (int t = 0; t < nt; ++t) {
        const auto& tri = mesh.triangle(t);
        const Vec2 p0 = mesh.vertex(tri[0]);
        const Vec2 e1 = mesh.vertex(tri[1]) - p0;
        const Vec2 e2 = mesh.vertex(tri[2]) - p0;
        const double det = cross(e1, e2);  // 2 * area, positive by mesh invariant
        grad_lambda_[t][1] = {e2.y / det, -e2.x / det};
        grad_lambda_[t][2] = {-e1.y / det, e1.x / det};
        grad_lambda_[t][0] = {-grad_lambda_[t][1].x - grad_lambda_[t][2].x,
                              -grad_lambda_[t][1].y - grad_lambda_[t][2].y};
        area_[t] = 0.5 * det;
    }
}

void FESpace::shape_values(double b0, double b1, double b2, std::span<double> out) const {
    if (degree_ == 1) {
        out[0] = b0;
        out[1] = b1;
        out[2] = b2;
        return;
    }
    out[0] = b0 * (2.0 * b0 - 1.0);
    out[1] = b1 * (2.0 * b1 - 1.0);
    out[2] = b2 * (2.0 * b2 - 1.0);
    out[3] = 4.0 * b0 * b1;
    out[4] = 4.0 * b1 * b2;
    out[5] = 4.0 * b2 * b0;
}

void FESpace::shape_gradients(int t, double b0, double b1, double b2,
                              std::span<Vec2> out) const {
    const auto& gl = grad_lambda_[t];
    if (degree_ == 1) {
        out[0] = gl[0];
        out[1] = gl[1];
        out[2] = gl[2];
        return;
    }
    const double b[3] = {b0, b1, b2};
    for (int i = 0; i < 3; ++i) out[i] = gl[i] * (4.0 * b[i] - 1.0);
    out[3] = gl[0] * (4.0 * b1) + gl[1] * (4.0 * b0);
    out[4] = gl[1] * (4.0 * b2) + gl[2] * (4.0 * b1);
    out[5] = gl[2] * (4.0 * b0) + gl[0] * (4.0 * b2);
}

int FESpace::edge_dof(int u, int v) const {
    if (degree_ != 2) return -1;
    if (u > v) std::swap(u, v);
    const auto it = edge_dofs_.find({u, v});
    return it == edge_dofs_.end() ? -1 : it->second;
}

EvalResult FESpace::evaluate(std::span<const double> coeffs, int element, double b0, double b1,
                             double b2) const {
    if (element < 0 || element >= mesh_->n_triangles())
        throw std::invalid_argument("FESpace::evaluate: element index out of range");
    if (coeffs.size() != static_cast<std::size_t>(n_dofs_))
        throw std::invalid_argument("FESpace::evaluate: coefficient vector size mismatch");
    constexpr double tol = 1e-10;
    if (b0 < -tol || b1 < -tol || b2 < -tol || std::abs(b0 + b1 + b2 - 1.0) > tol)
        throw std::invalid_argument("FESpace::evaluate: invalid barycentric coordinates");

    double values[6];
    Vec2 grads[6];
    shape_values(b0, b1, b2, {values, values + 6});
    shape_gradients(element, b0, b1, b2, {grads, grads + 6});

    EvalResult r;
    const auto dofs = element_dofs(element);
    for (int i = 0; i < dofs_per_element(); ++i) {
        const double c = coeffs[dofs[i]];
        r.value += c * values[i];
        r.gradient.x += c * grads[i].x;
        r.gradient.y += c * grads[i].y;
    }
    return r;
}

FESpace build_space(const Mesh& mesh, int degree) { return FESpace(mesh, degree); }

std::vector<double> nodal_interpolate(const FESpace& space,
                                      const std::function<double(Vec2)>& f) {
    std::vector<double> coeffs(space.n_dofs());
    for (int d = 0; d < space.n_dofs(); ++d) coeffs[d] = f(space.dof_point(d));
    return coeffs;
}

InterpolationStability measure_product_interpolation_stability(const FESpace& space, int trials,
                                                               unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::bernoulli_distribution coin(0.5);

    const auto& rule = detail::quadrature_degree8();
    const int nd = space.dofs_per_element();
    InterpolationStability result;

    std::vector<double> phi(space.n_dofs()), psi(space.n_dofs());
    double values[6];
    Vec2 grads[6];

    for (int trial = 0; trial < trials; ++trial) {
        const bool binary = (trial % 2 == 1);
        for (auto* v : {&phi, &psi})
            for (double& c : *v) c = binary ? (coin(rng) ? 1.0 : 0.0) : gauss(rng);

        for (int t = 0; t < space.mesh().n_triangles(); ++t) {
            const auto dofs = space.element_dofs(t);
            const double jac = 2.0 * space.element_area(t);
            double num_l2 = 0, den_l2 = 0, num_h1 = 0, den_h1 = 0;
            for (const auto& qp : rule.points()) {
                space.shape_values(qp.b0, qp.b1, qp.b2, {values, values + 6});
                space.shape_gradients(t, qp.b0, qp.b1, qp.b2, {grads, grads + 6});
                double p = 0, q = 0, ip = 0;
                Vec2 gp{}, gq{}, gip{};
                for (int i = 0; i < nd; ++i) {
                    const double cp = phi[dofs[i]], cq = psi[dofs[i]];
                    p += cp * values[i];
                    q += cq * values[i];
                    ip += cp * cq * values[i];  // nodal interpolant of the product
                    gp = gp + grads[i] * cp;
                    gq = gq + grads[i] * cq;
                    gip = gip + grads[i] * (cp * cq);
                }
                const double w = qp.w * jac;
                const double prod = p * q;
                const Vec2 gprod = gp * q + gq * p;
                num_l2 += w * ip * ip;
                den_l2 += w * prod * prod;
                num_h1 += w * dot(gip, gip);
                den_h1 += w * dot(gprod, gprod);
            }
            if (den_l2 > 1e-28) result.c0 = std::max(result.c0, std::sqrt(num_l2 / den_l2));
            if (den_h1 > 1e-28) result.c1 = std::max(result.c1, std::sqrt(num_h1 / den_h1));
        }
    }
    return result;
}

void write_coefficients_csv(std::span<const double> coeffs, std::ostream& out) {
    out << "dof,value\n";
    char buf[64];
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, coeffs[i]);
        out << buf;
    }
}

}  // namespace fedecay

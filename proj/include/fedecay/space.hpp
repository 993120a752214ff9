#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "fedecay/mesh.hpp"

namespace fedecay {

struct EvalResult {
    double value = 0.0;
    Vec2 gradient;
};

/// Lagrange P_k space (k = 1, 2) on a triangular mesh: global dof numbering,
/// nodal points, boundary dof sets, reference-element machinery. Immutable
/// after construction; evaluation and interpolation are pure.
class FESpace {
public:
    FESpace(const Mesh& mesh, int degree);

    const Mesh& mesh() const { return *mesh_; }
    int degree() const { return degree_; }
    int n_dofs() const { return n_dofs_; }
    int dofs_per_element() const { return degree_ == 1 ? 3 : 6; }

    std::span<const int> element_dofs(int t) const {
        return {element_dofs_.data() + static_cast<std::size_t>(t) * dofs_per_element(),
                static_cast<std::size_t>(dofs_per_element())};
    }
    Vec2 dof_point(int dof) const { return dof_points_[dof]; }

    const std::vector<int>& gamma_dofs() const { return gamma_dofs_; }
    const std::vector<int>& gamma_c_dofs() const { return gamma_c_dofs_; }
    /// Union of both tagged sets: every dof whose nodal point lies on the boundary.
    const std::vector<int>& boundary_dofs() const { return boundary_dofs_; }

    bool dof_on_boundary(int dof) const { return dof_flags_[dof] != 0; }
    bool dof_on_tag(int dof, BoundaryTag tag) const {
        return (dof_flags_[dof] & (tag == BoundaryTag::Gamma ? 1 : 2)) != 0;
    }

    /// Midpoint dof of the edge {u, v} for k = 2; -1 for k = 1 or unknown edges.
    int edge_dof(int u, int v) const;

    /// Barycentric gradients of the affine coordinates on element t.
    const std::array<Vec2, 3>& grad_lambda(int t) const { return grad_lambda_[t]; }
    double element_area(int t) const { return area_[t]; }

    /// Reference shape function values at a barycentric point.
    void shape_values(double b0, double b1, double b2, std::span<double> out) const;
    /// Physical-space shape gradients on element t at a barycentric point.
    void shape_gradients(int t, double b0, double b1, double b2, std::span<Vec2> out) const;

    /// Value and gradient of the FE function with the given coefficients.
    /// Throws std::invalid_argument for bad element indices or barycentric
    /// coordinates that are negative or do not sum to one.
    EvalResult evaluate(std::span<const double> coeffs, int element, double b0, double b1,
                        double b2) const;

private:
    const Mesh* mesh_;
    int degree_;
    int n_dofs_ = 0;
    std::vector<int> element_dofs_;
    std::vector<Vec2> dof_points_;
    std::vector<int> gamma_dofs_, gamma_c_dofs_, boundary_dofs_;
    std::vector<unsigned char> dof_flags_;  // bit 0: Gamma, bit 1: GammaC
    std::map<std::pair<int, int>, int> edge_dofs_;  // k = 2 only
    std::vector<std::array<Vec2, 3>> grad_lambda_;
    std::vector<double> area_;
};

FESpace build_space(const Mesh& mesh, int degree);

/// Coefficients of the Lagrange interpolant: c_i = f(a_i) at every nodal point.
std::vector<double> nodal_interpolate(const FESpace& space,
                                      const std::function<double(Vec2)>& f);

struct InterpolationStability {
    double c0 = 0.0;  // max over elements/trials of ||I_h(pq)||_L2(K) / ||pq||_L2(K)
    double c1 = 0.0;  // same with the H1 seminorm
};

/// Measures the per-element stability constant of nodal interpolation applied
/// to products of two FE functions. Trials alternate Gaussian and binary
/// coefficient draws; the binary draws cover indicator-shaped factors.
InterpolationStability measure_product_interpolation_stability(const FESpace& space, int trials,
                                                               unsigned seed);

/// Debug dump: one "dof,value" row per coefficient.
void write_coefficients_csv(std::span<const double> coeffs, std::ostream& out);

}  // namespace fedecay

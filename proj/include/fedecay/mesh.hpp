#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace fedecay {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::sqrt(dot(a, a)); }

enum class BoundaryTag { Gamma, GammaC };

struct BoundaryEdge {
    int a = -1;
    int b = -1;
    BoundaryTag tag = BoundaryTag::GammaC;
};

/// Sorted, duplicate-free set of triangle indices of one mesh.
class CellSet {
public:
    CellSet() = default;
    /// Sorts and deduplicates; throws std::invalid_argument on out-of-range ids.
    CellSet(std::vector<int> ids, int n_cells);

    static CellSet all(int n_cells);

    bool contains(int cell) const;
    bool empty() const { return ids_.empty(); }
    std::size_t size() const { return ids_.size(); }
    const std::vector<int>& ids() const { return ids_; }
    auto begin() const { return ids_.begin(); }
    auto end() const { return ids_.end(); }

    bool operator==(const CellSet&) const = default;

    friend CellSet set_union(const CellSet& a, const CellSet& b);
    friend CellSet set_difference(const CellSet& a, const CellSet& b);
    friend bool intersects(const CellSet& a, const CellSet& b);
    friend bool is_subset(const CellSet& a, const CellSet& b);

private:
    std::vector<int> ids_;
};

CellSet set_union(const CellSet& a, const CellSet& b);
CellSet set_difference(const CellSet& a, const CellSet& b);
bool intersects(const CellSet& a, const CellSet& b);
bool is_subset(const CellSet& a, const CellSet& b);

/// Conforming triangulation with tagged boundary edges.
///
/// Validated at construction: positive triangle orientation, edge conformity
/// (interior edges shared by exactly two triangles), and declared boundary
/// edges covering exactly the one-triangle edges. Immutable afterwards.
class Mesh {
public:
    Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
         std::vector<BoundaryEdge> boundary_edges);

    int n_vertices() const { return static_cast<int>(vertices_.size()); }
    int n_triangles() const { return static_cast<int>(triangles_.size()); }

    Vec2 vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

    std::span<const int> vertex_elements(int v) const;

    double h() const { return h_; }
    double h_min() const { return h_min_; }

    double element_area(int t) const;
    double element_diameter(int t) const;
    Vec2 centroid(int t) const;

    /// True if vertex v is an endpoint of any boundary edge.
    bool vertex_on_boundary(int v) const { return on_boundary_[v] != 0; }
    /// True if vertex v is an endpoint of a boundary edge with the given tag.
    bool vertex_on_tag(int v, BoundaryTag tag) const;

private:
    std::vector<Vec2> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<BoundaryEdge> boundary_edges_;

    // CSR-style vertex-to-element incidence.
    std::vector<int> vtx_elem_offsets_;
    std::vector<int> vtx_elem_data_;

    std::vector<char> on_boundary_;
    std::vector<char> on_gamma_;
    std::vector<char> on_gamma_c_;

    double h_ = 0.0;
    double h_min_ = 0.0;

    void validate_and_index();
};

struct MeshMetrics {
    double h = 0.0;
    double h_min = 0.0;
    double min_angle = 0.0;  // radians
};

struct Box {
    Vec2 lo;
    Vec2 hi;
};

/// Structured grid of nx-by-ny quads on [0,width]x[0,height], each quad split
/// along the lower-left to upper-right diagonal. All outer edges are boundary
/// edges tagged GammaC; use boundary_partition to assign Gamma.
Mesh generate_rectangle_mesh(double width, double height, int nx, int ny);

/// Retags boundary edges: Gamma where the predicate holds at the edge
/// midpoint, GammaC otherwise. Geometry and connectivity are unchanged.
Mesh boundary_partition(const Mesh& mesh, const std::function<bool(Vec2)>& gamma_predicate);

MeshMetrics mesh_metrics(const Mesh& mesh);

/// All triangles whose closure lies in the closed box (all three vertices inside).
CellSet select_cells_in_box(const Mesh& mesh, const Box& box);

}  // namespace fedecay

#include "fedecay/mesh.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

namespace fedecay {

CellSet::CellSet(std::vector<int> ids, int n_cells) : ids_(std::move(ids)) {
    for (int id : ids_) {
        if (id < 0 || id >= n_cells)
            throw std::invalid_argument("CellSet: cell index " + std::to_string(id) +
                                        " out of range [0," + std::to_string(n_cells) + ")");
    }
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
}

CellSet CellSet::all(int n_cells) {
    std::vector<int> ids(n_cells);
    for (int i = 0; i < n_cells; ++i) ids[i] = i;
    return CellSet(std::move(ids), n_cells);
}

bool CellSet::contains(int cell) const {
    return std::binary_search(ids_.begin(), ids_.end(), cell);
}

CellSet set_union(const CellSet& a, const CellSet& b) {
    CellSet out;
    out.ids_.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.ids_));
    return out;
}

CellSet set_difference(const CellSet& a, const CellSet& b) {
    CellSet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out.ids_));
    return out;
}

bool intersects(const CellSet& a, const CellSet& b) {
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib)
            ++ia;
        else if (*ib < *ia)
            ++ib;
        else
            return true;
    }
    return false;
}

bool is_subset(const CellSet& a, const CellSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Mesh::Mesh(std::vector<Vec2> vertices, std::vector<std::array<int, 3>> triangles,
           std::vector<BoundaryEdge> boundary_edges)
    : vertices_(std::move(vertices)),
      triangles_(std::move(triangles)),
      boundary_edges_(std::move(boundary_edges)) {
    validate_and_index();
}

void Mesh::validate_and_index() {
    const int nv = n_vertices();
    const int nt = n_triangles();
    if (nv < 3 || nt < 1) throw std::invalid_argument("Mesh: needs at least one triangle");

    h_ = 0.0;
    h_min_ = std::numeric_limits<double>::max();
    for (int t = 0; t < nt; ++t) {
        for (int v : triangles_[t]) {
            if (v < 0 || v >= nv)
                throw std::invalid_argument("Mesh: triangle " + std::to_string(t) +
                                            " references invalid vertex " + std::to_string(v));
        }
        const auto& tri = triangles_[t];
        const Vec2 a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
        const double area2 = cross(b - a, c - a);
        if (!(area2 > 0.0))
            throw std::invalid_argument("Mesh: triangle " + std::to_string(t) +
                                        " is degenerate or negatively oriented");
        const double d = element_diameter(t);
        h_ = std::max(h_, d);
        h_min_ = std::min(h_min_, d);
    }

    // Edge incidence counts drive the conformity checks.
    std::map<std::pair<int, int>, int> edge_count;
    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            int u = tri[k], v = tri[(k + 1) % 3];
            if (u > v) std::swap(u, v);
            int& cnt = ++edge_count[{u, v}];
            if (cnt > 2)
                throw std::invalid_argument("Mesh: edge (" + std::to_string(u) + "," +
                                            std::to_string(v) +
                                            ") shared by more than two triangles");
        }
    }

    std::map<std::pair<int, int>, int> declared;  // edge -> multiplicity
    for (const auto& e : boundary_edges_) {
        if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv || e.a == e.b)
            throw std::invalid_argument("Mesh: invalid boundary edge");
        int u = e.a, v = e.b;
        if (u > v) std::swap(u, v);
        if (++declared[{u, v}] > 1)
            throw std::invalid_argument("Mesh: duplicate boundary edge (" + std::to_string(u) +
                                        "," + std::to_string(v) + ")");
        auto it = edge_count.find({u, v});
        if (it == edge_count.end())
            throw std::invalid_argument("Mesh: boundary edge (" + std::to_string(u) + "," +
                                        std::to_string(v) + ") is not an element edge");
        if (it->second != 1)
            throw std::invalid_argument("Mesh: boundary edge (" + std::to_string(u) + "," +
                                        std::to_string(v) + ") is interior");
    }
    for (const auto& [edge, cnt] : edge_count) {
        if (cnt == 1 && declared.find(edge) == declared.end())
            throw std::invalid_argument("Mesh: edge (" + std::to_string(edge.first) + "," +
                                        std::to_string(edge.second) +
                                        ") lies on the boundary but is not declared");
    }

    // Vertex-to-element incidence (CSR layout).
    vtx_elem_offsets_.assign(nv + 1, 0);
    for (const auto& tri : triangles_)
        for (int v : tri) ++vtx_elem_offsets_[v + 1];
    for (int v = 0; v < nv; ++v) vtx_elem_offsets_[v + 1] += vtx_elem_offsets_[v];
    vtx_elem_data_.assign(vtx_elem_offsets_.back(), -1);
    std::vector<int> cursor(vtx_elem_offsets_.begin(), vtx_elem_offsets_.end() - 1);
    for (int t = 0; t < nt; ++t)
        for (int v : triangles_[t]) vtx_elem_data_[cursor[v]++] = t;

    on_boundary_.assign(nv, 0);
    on_gamma_.assign(nv, 0);
    on_gamma_c_.assign(nv, 0);
    for (const auto& e : boundary_edges_) {
        on_boundary_[e.a] = on_boundary_[e.b] = 1;
        auto& flags = (e.tag == BoundaryTag::Gamma) ? on_gamma_ : on_gamma_c_;
        flags[e.a] = flags[e.b] = 1;
    }
}

std::span<const int> Mesh::vertex_elements(int v) const {
    return {vtx_elem_data_.data() + vtx_elem_offsets_[v],
            vtx_elem_data_.data() + vtx_elem_offsets_[v + 1]};
}

double Mesh::element_area(int t) const {
    const auto& tri = triangles_[t];
    const Vec2 a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
    return 0.5 * cross(b - a, c - a);
}

double Mesh::element_diameter(int t) const {
    const auto& tri = triangles_[t];
    const Vec2 a = vertices_[tri[0]], b = vertices_[tri[1]], c = vertices_[tri[2]];
    return std::max({norm(b - a), norm(c - b), norm(a - c)});
}

Vec2 Mesh::centroid(int t) const {
    const auto& tri = triangles_[t];
    return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) * (1.0 / 3.0);
}

bool Mesh::vertex_on_tag(int v, BoundaryTag tag) const {
    return tag == BoundaryTag::Gamma ? on_gamma_[v] != 0 : on_gamma_c_[v] != 0;
}

Mesh generate_rectangle_mesh(double width, double height, int nx, int ny) {
    if (!(width > 0.0) || !(height > 0.0))
        throw std::invalid_argument("generate_rectangle_mesh: dimensions must be positive");
    if (nx < 1 || ny < 1)
        throw std::invalid_argument("generate_rectangle_mesh: counts must be >= 1");

    std::vector<Vec2> vertices;
    vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            vertices.push_back({width * i / nx, height * j / ny});

    auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };

    std::vector<std::array<int, 3>> triangles;
    triangles.reserve(2u * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            // Fixed diagonal: lower-left to upper-right.
            triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }

    std::vector<BoundaryEdge> edges;
    edges.reserve(2u * (nx + ny));
    for (int i = 0; i < nx; ++i) {
        edges.push_back({vid(i, 0), vid(i + 1, 0), BoundaryTag::GammaC});
        edges.push_back({vid(i, ny), vid(i + 1, ny), BoundaryTag::GammaC});
    }
    for (int j = 0; j < ny; ++j) {
        edges.push_back({vid(0, j), vid(0, j + 1), BoundaryTag::GammaC});
        edges.push_back({vid(nx, j), vid(nx, j + 1), BoundaryTag::GammaC});
    }

    return Mesh(std::move(vertices), std::move(triangles), std::move(edges));
}

Mesh boundary_partition(const Mesh& mesh, const std::function<bool(Vec2)>& gamma_predicate) {
    std::vector<BoundaryEdge> edges = mesh.boundary_edges();
    for (auto& e : edges) {
        const Vec2 mid = (mesh.vertex(e.a) + mesh.vertex(e.b)) * 0.5;
        e.tag = gamma_predicate(mid) ? BoundaryTag::Gamma : BoundaryTag::GammaC;
    }
    return Mesh(mesh.vertices(), mesh.triangles(), std::move(edges));
}

MeshMetrics mesh_metrics(const Mesh& mesh) {
    MeshMetrics m;
    m.h = mesh.h();
    m.h_min = mesh.h_min();
    m.min_angle = std::numeric_limits<double>::max();
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        for (int k = 0; k < 3; ++k) {
            const Vec2 p = mesh.vertex(tri[k]);
            const Vec2 u = mesh.vertex(tri[(k + 1) % 3]) - p;
            const Vec2 v = mesh.vertex(tri[(k + 2) % 3]) - p;
            m.min_angle = std::min(m.min_angle, std::atan2(std::abs(cross(u, v)), dot(u, v)));
        }
    }
    return m;
}

CellSet select_cells_in_box(const Mesh& mesh, const Box& box) {
    std::vector<int> ids;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        bool inside = true;
        for (int v : mesh.triangle(t)) {
            const Vec2 p = mesh.vertex(v);
            if (p.x < box.lo.x || p.x > box.hi.x || p.y < box.lo.y || p.y > box.hi.y) {
                inside = false;
                break;
            }
        }
        if (inside) ids.push_back(t);
    }
    return CellSet(std::move(ids), mesh.n_triangles());
}

}  // namespace fedecay

#include "fedecay/msh_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "fedecay/errors.hpp"

namespace fedecay {

TagMap default_tag_map() {
    return {{1, BoundaryTag::Gamma}, {2, BoundaryTag::GammaC}};
}

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    /// Next non-empty line; throws if the stream ends.
    std::string next(const std::string& context) {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            // Strip trailing CR from files written on other platforms.
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return line;
        }
        throw ParseError(line_no_, "unexpected end of file while reading " + context);
    }

    int line_no() const { return line_no_; }

private:
    std::istream& in_;
    int line_no_ = 0;
};

}  // namespace

Mesh import_msh(std::istream& in, const TagMap& tag_map) {
    LineReader reader(in);

    std::string line = reader.next("$MeshFormat");
    if (line != "$MeshFormat") throw ParseError(reader.line_no(), "expected $MeshFormat");
    {
        std::istringstream fmt(reader.next("format header"));
        double version = 0;
        int file_type = -1, data_size = 0;
        fmt >> version >> file_type >> data_size;
        if (!fmt || version < 2.0 || version >= 3.0 || file_type != 0)
            throw ParseError(reader.line_no(), "unsupported MSH format (need 2.x ASCII)");
    }
    if (reader.next("$EndMeshFormat") != "$EndMeshFormat")
        throw ParseError(reader.line_no(), "expected $EndMeshFormat");

    if (reader.next("$Nodes") != "$Nodes") throw ParseError(reader.line_no(), "expected $Nodes");
    int n_nodes = 0;
    {
        std::istringstream count(reader.next("node count"));
        if (!(count >> n_nodes) || n_nodes < 1)
            throw ParseError(reader.line_no(), "invalid node count");
    }
    std::vector<Vec2> vertices(n_nodes);
    std::unordered_map<long long, int> node_index;
    node_index.reserve(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        std::istringstream node(reader.next("node"));
        long long id = 0;
        double x = 0, y = 0, z = 0;
        if (!(node >> id >> x >> y >> z))
            throw ParseError(reader.line_no(), "malformed node line");
        if (!node_index.emplace(id, i).second)
            throw ParseError(reader.line_no(), "duplicate node id " + std::to_string(id));
        vertices[i] = {x, y};
    }
    if (reader.next("$EndNodes") != "$EndNodes")
        throw ParseError(reader.line_no(), "expected $EndNodes");

    if (reader.next("$Elements") != "$Elements")
        throw ParseError(reader.line_no(), "expected $Elements");
    int n_elements = 0;
    {
        std::istringstream count(reader.next("element count"));
        if (!(count >> n_elements) || n_elements < 1)
            throw ParseError(reader.line_no(), "invalid element count");
    }

    auto lookup = [&](long long id) {
        auto it = node_index.find(id);
        if (it == node_index.end())
            throw ParseError(reader.line_no(), "dangling node reference " + std::to_string(id));
        return it->second;
    };

    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;
    for (int i = 0; i < n_elements; ++i) {
        std::istringstream elem(reader.next("element"));
        long long id = 0;
        int type = 0, n_tags = 0;
        if (!(elem >> id >> type >> n_tags))
            throw ParseError(reader.line_no(), "malformed element line");
        int physical = 0;
        for (int t = 0; t < n_tags; ++t) {
            int tag = 0;
            if (!(elem >> tag)) throw ParseError(reader.line_no(), "malformed element tags");
            if (t == 0) physical = tag;
        }
        if (type == 1) {
            long long a = 0, b = 0;
            if (!(elem >> a >> b)) throw ParseError(reader.line_no(), "malformed line element");
            BoundaryTag tag = BoundaryTag::GammaC;
            if (auto it = tag_map.find(physical); it != tag_map.end()) tag = it->second;
            boundary_edges.push_back({lookup(a), lookup(b), tag});
        } else if (type == 2) {
            long long a = 0, b = 0, c = 0;
            if (!(elem >> a >> b >> c))
                throw ParseError(reader.line_no(), "malformed triangle element");
            std::array<int, 3> tri = {lookup(a), lookup(b), lookup(c)};
            const Vec2 pa = vertices[tri[0]], pb = vertices[tri[1]], pc = vertices[tri[2]];
            if (cross(pb - pa, pc - pa) < 0.0) std::swap(tri[1], tri[2]);
            triangles.push_back(tri);
        } else {
            throw ParseError(reader.line_no(),
                             "unsupported element type " + std::to_string(type) +
                                 " (only 2-node lines and 3-node triangles accepted)");
        }
    }
    if (reader.next("$EndElements") != "$EndElements")
        throw ParseError(reader.line_no(), "expected $EndElements");

    try {
        return Mesh(std::move(vertices), std::move(triangles), std::move(boundary_edges));
    } catch (const std::invalid_argument& e) {
        throw ParseError(reader.line_no(), std::string("mesh validation failed: ") + e.what());
    }
}

Mesh import_msh_file(const std::string& path, const TagMap& tag_map) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open mesh file " + path);
    return import_msh(in, tag_map);
}

void export_msh(const Mesh& mesh, std::ostream& out) {
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";

    out << "$Nodes\n" << mesh.n_vertices() << "\n";
    char buf[96];
    for (int v = 0; v < mesh.n_vertices(); ++v) {
        const Vec2 p = mesh.vertex(v);
        std::snprintf(buf, sizeof(buf), "%d %.17g %.17g 0\n", v + 1, p.x, p.y);
        out << buf;
    }
    out << "$EndNodes\n";

    const auto& edges = mesh.boundary_edges();
    out << "$Elements\n" << edges.size() + mesh.n_triangles() << "\n";
    int id = 1;
    for (const auto& e : edges) {
        const int physical = (e.tag == BoundaryTag::Gamma) ? 1 : 2;
        out << id++ << " 1 2 " << physical << " " << physical << " " << e.a + 1 << " " << e.b + 1
            << "\n";
    }
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangle(t);
        out << id++ << " 2 2 0 0 " << tri[0] + 1 << " " << tri[1] + 1 << " " << tri[2] + 1 << "\n";
    }
    out << "$EndElements\n";
}

}  // namespace fedecay

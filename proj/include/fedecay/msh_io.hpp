#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "fedecay/mesh.hpp"

namespace fedecay {

/// Maps MSH physical tags of line elements to boundary tags. Lines with an
/// unmapped physical tag default to GammaC.
using TagMap = std::map<int, BoundaryTag>;

/// Tag map matching export_msh: physical 1 -> Gamma, 2 -> GammaC.
TagMap default_tag_map();

/// Reads the MSH 2.2 ASCII subset ($MeshFormat/$Nodes/$Elements, element
/// types 1 and 2). Triangles are reoriented to positive area; conformity is
/// verified on load. Throws ParseError with a line number on malformed input.
Mesh import_msh(std::istream& in, const TagMap& tag_map = default_tag_map());

Mesh import_msh_file(const std::string& path, const TagMap& tag_map = default_tag_map());

/// Writes the same MSH 2.2 subset; floats carry 17 significant digits.
void export_msh(const Mesh& mesh, std::ostream& out);

}  // namespace fedecay

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hexoct/vec3.hpp"

namespace hexoct {

enum class HexTag : uint8_t { GridDual, TemplateFace, TemplateEdge, CornerFill, Buffer };

/// Shared-vertex hexahedral mesh. Corner ordering follows the usual convention:
/// vertices 0-3 are the bottom face counterclockwise (seen from below, i.e.
/// outward), 4-7 the top face aligned above them.
struct HexMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 8>> hexes;
    std::vector<HexTag> tags;

    int vertex_count() const { return (int)vertices.size(); }
    int hex_count() const { return (int)hexes.size(); }
};

/// The six quad faces of a hex, wound so the normal points out of the cell.
extern const int kHexFaces[6][4];

/// For each corner, the three neighbor corners in right-handed order.
extern const int kHexCornerNeighbors[8][3];

/// Hex edges as corner pairs.
extern const int kHexEdges[12][2];

/// Sorted-vertex key for face identification.
std::array<int, 4> face_key(const std::array<int, 8>& hex, int f);

struct FaceUse {
    int hex = -1;
    int face = -1;
};

/// Map from sorted face key to the (at most two) hexes using that face.
std::map<std::array<int, 4>, std::vector<FaceUse>> face_census(const HexMesh& m);

/// True iff every face is used by at most two hexes and the mesh has no
/// duplicated vertices inside it (conformity as a combinatorial property).
bool is_conforming(const HexMesh& m, std::string* why = nullptr);

struct BoundaryQuad {
    std::array<int, 4> v; // outward counterclockwise
    int hex = -1;
    int face = -1;
};

/// Boundary quads (faces used by exactly one hex), outward wound.
std::vector<BoundaryQuad> boundary_quads(const HexMesh& m);

/// V - E + F of the boundary quad surface.
int64_t boundary_euler_characteristic(const HexMesh& m);

/// Vertex -> incident hex indices.
std::vector<std::vector<int>> vertex_hex_adjacency(const HexMesh& m);

/// Drop unreferenced vertices; returns old->new vertex index map (-1 dropped).
std::vector<int> compact_vertices(HexMesh& m);

// ---------------------------------------------------------------------------

/// Per-element Jacobian statistics: 8 corners plus the body center.
struct HexQuality {
    std::array<double, 9> jacobian{};         // volume units
    std::array<double, 9> scaled_jacobian{};  // in [-1, 1]
    double min_j = 0.0;
    double min_sj = 0.0;
};

HexQuality hex_quality(const HexMesh& m, int h);

/// Quality of one hex given its corner positions directly.
HexQuality hex_quality(const std::array<Vec3, 8>& x);

/// min over the mesh of per-hex min scaled Jacobian.
double mesh_min_scaled_jacobian(const HexMesh& m);

} // namespace hexoct

#pragma once

#include <vector>

#include "hexoct/hexmesh.hpp"
#include "hexoct/surface.hpp"

namespace hexoct {

/// The exterior-removal rule on the 8 corner signed distances.
inline bool exterior_removal_rule(const std::array<double, 8>& f) {
    double fmin = f[0], fmax = f[0];
    for (double v : f) {
        fmin = std::min(fmin, v);
        fmax = std::max(fmax, v);
    }
    return fmin + 0.1 * fmax < 0.0;
}

/// Drop every hex whose corner signed distances satisfy the removal rule;
/// unreferenced vertices are compacted. Throws MeshError when nothing is left.
HexMesh remove_exterior(const HexMesh& mesh, const TriangleSurface& surface);

struct ClearanceStats {
    int iterations = 0;
    int removed = 0;
};

/// Remove hexes around boundary vertices whose fan of boundary-quad normals
/// violates the convex-cone restriction (every cyclically ordered triple of
/// fan normals must have positive scalar triple product), one hex per
/// violating vertex per sweep, preferring the candidate with the most
/// boundary faces. Hexes buried deeper than half the local element size are
/// never removed. Throws MeshError if the mesh empties or the cap is hit.
HexMesh clear_buffer(const HexMesh& mesh, const TriangleSurface& surface,
                     ClearanceStats* stats = nullptr);

/// Fan normals of a boundary vertex in cyclic order, or empty when the
/// boundary around the vertex is not a single manifold fan.
std::vector<Vec3> boundary_fan_normals(const HexMesh& mesh,
                                       const std::vector<BoundaryQuad>& quads, int vertex);

/// True iff every cyclically ordered triple (i<j<k) has positive triple product.
bool fan_satisfies_restriction(const std::vector<Vec3>& normals);

} // namespace hexoct

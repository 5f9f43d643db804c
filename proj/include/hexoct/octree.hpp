#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "hexoct/surface.hpp"
#include "hexoct/vec3.hpp"

namespace hexoct {

enum class CellKind : uint8_t { Unknown, Interior, Boundary, Exterior };

enum class Adjacency { Face, Edge, Vertex };

struct RefinementConfig {
    std::vector<double> curvature_thresholds{0.5, 1, 2, 4, 8};
    std::vector<double> thickness_thresholds{16, 8, 4, 2, 1}; // units of finest cell edge
    int base_level = 5;
    int max_level = 9;

    void validate() const;
};

struct Octant {
    int8_t level = 0;
    int32_t parent = -1;
    int32_t first_child = -1; // 8 consecutive children; -1 for a leaf
    uint32_t x = 0, y = 0, z = 0; // lattice coords at this octant's level
    CellKind kind = CellKind::Unknown;

    bool is_leaf() const { return first_child < 0; }
};

/// Adaptive octree over the unit-cube domain. Built feature-adaptively from a
/// surface, then made strongly balanced (2:1 across face/edge/vertex adjacency
/// plus uniform sibling groups). Immutable once the pipeline is done with it.
class Octree {
public:
    static Octree build_initial(const TriangleSurface& surface, const RefinementConfig& cfg);

    /// Bare root-only tree, for synthetic refinement in tests and tools.
    static Octree make_root(int max_level);

    /// Split one leaf into 8 children (no balancing side effects).
    void refine_leaf(int n) { subdivide(n); }

    /// Subdivide until every pair of adjacent leaves differs by at most one
    /// level and every sibling group is uniformly split. Never coarsens.
    void enforce_strong_balance();

    const std::vector<Octant>& nodes() const { return nodes_; }
    int root() const { return 0; }
    int max_level() const { return max_level_; }
    const TriangleSurface* surface() const { return surface_; }

    std::vector<int> leaves() const;
    int leaf_count() const;

    bool is_leaf(int n) const { return nodes_[n].is_leaf(); }
    int child(int n, int i) const { return nodes_[n].first_child + i; }

    /// Axis-aligned bounds of a node in domain coordinates.
    AABB node_bounds(int n) const;
    Vec3 node_center(int n) const;
    double node_edge(int n) const;

    /// Min corner and edge length of a node in finest-lattice units.
    void node_lattice(int n, int64_t out_min[3], int64_t* out_size) const;

    /// Leaf containing a finest-lattice cell (coords of the cell's min corner).
    int leaf_at_cell(int64_t cx, int64_t cy, int64_t cz) const;

    /// All leaves whose lattice box intersects [lo,hi] (closed, finest units).
    std::vector<int> leaves_in_region(const int64_t lo[3], const int64_t hi[3]) const;

    /// Leaves sharing a face (2D contact), at least an edge (>=1D), or at
    /// least a vertex (>=0D) with the given leaf; ordered by lattice coords.
    std::vector<int> leaf_neighbors(int leaf, Adjacency adj) const;

    /// Classify leaves as interior/boundary/exterior against the source surface.
    void classify();

    /// True iff 2:1 balanced across vertex adjacency with uniform sibling groups.
    bool is_strongly_balanced() const;

    /// Lattice span of the whole domain in finest units.
    int64_t lattice_extent() const { return (int64_t)1 << max_level_; }

private:
    void subdivide(int n);
    void refine_recursive(int n, int required, const RefinementConfig& cfg);

    std::vector<Octant> nodes_;
    int max_level_ = 9;
    const TriangleSurface* surface_ = nullptr;
};

} // namespace hexoct

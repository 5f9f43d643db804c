#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "hexoct/vec3.hpp"

namespace hexoct {

struct Quadrant {
    int8_t level = 0;
    int32_t parent = -1;
    int32_t first_child = -1;
    uint32_t x = 0, y = 0;
    bool is_leaf() const { return first_child < 0; }
};

struct QuadMesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 4>> quads; // counterclockwise
};

enum class Adjacency2D { Edge, Vertex };

/// 2D verification twin of the octree: quadtree, strong balancing and all-quad
/// dual extraction with the single transition template.
class Quadtree {
public:
    static Quadtree make_root(int max_level);

    void refine_leaf(int n);

    /// 2:1 balance across edge+vertex adjacency plus uniform sibling groups.
    void enforce_strong_balance();

    const std::vector<Quadrant>& nodes() const { return nodes_; }
    int max_level() const { return max_level_; }
    bool is_leaf(int n) const { return nodes_[n].is_leaf(); }
    int child(int n, int i) const { return nodes_[n].first_child + i; }
    std::vector<int> leaves() const;

    void node_lattice(int n, int64_t out_min[2], int64_t* out_size) const;
    Vec2 node_center(int n) const;
    int64_t lattice_extent() const { return (int64_t)1 << max_level_; }

    std::vector<int> leaves_in_region(const int64_t lo[2], const int64_t hi[2]) const;
    std::vector<int> leaf_neighbors(int leaf, Adjacency2D adj) const;

    bool is_strongly_balanced() const;

private:
    std::vector<Quadrant> nodes_;
    int max_level_ = 9;
};

/// All-quad dual mesh of a strongly balanced quadtree: one vertex per leaf
/// center, plain dual quads at 4-leaf grid points, and the transition template
/// (two triangles plus the quad between them -> four quads) at every
/// transition edge. Throws if the tree is not strongly balanced.
QuadMesh extract_dual_2d(const Quadtree& tree);

} // namespace hexoct

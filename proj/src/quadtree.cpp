#include "hexoct/quadtree.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace hexoct {

Quadtree Quadtree::make_root(int max_level) {
    Quadtree t;
    t.max_level_ = max_level;
    t.nodes_.push_back(Quadrant{});
    return t;
}

void Quadtree::refine_leaf(int n) {
    Quadrant& q = nodes_[n];
    if (!q.is_leaf()) return;
    int32_t base = (int32_t)nodes_.size();
    q.first_child = base;
    Quadrant parent = q;
    for (int i = 0; i < 4; ++i) {
        Quadrant c;
        c.level = (int8_t)(parent.level + 1);
        c.parent = n;
        c.x = parent.x * 2 + (uint32_t)(i & 1);
        c.y = parent.y * 2 + (uint32_t)((i >> 1) & 1);
        nodes_.push_back(c);
    }
}

std::vector<int> Quadtree::leaves() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].is_leaf()) out.push_back((int)i);
    return out;
}

void Quadtree::node_lattice(int n, int64_t out_min[2], int64_t* out_size) const {
    const Quadrant& q = nodes_[n];
    int shift = max_level_ - q.level;
    out_min[0] = (int64_t)q.x << shift;
    out_min[1] = (int64_t)q.y << shift;
    if (out_size) *out_size = (int64_t)1 << shift;
}

Vec2 Quadtree::node_center(int n) const {
    int64_t mn[2], size;
    node_lattice(n, mn, &size);
    double s = 1.0 / (double)lattice_extent();
    return {(mn[0] + size * 0.5) * s, (mn[1] + size * 0.5) * s};
}

std::vector<int> Quadtree::leaves_in_region(const int64_t lo[2], const int64_t hi[2]) const {
    std::vector<int> out;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        int64_t mn[2], size;
        node_lattice(n, mn, &size);
        if (mn[0] > hi[0] || mn[0] + size - 1 < lo[0] || mn[1] > hi[1] || mn[1] + size - 1 < lo[1])
            continue;
        if (nodes_[n].is_leaf()) out.push_back(n);
        else
            for (int i = 3; i >= 0; --i) stack.push_back(child(n, i));
    }
    return out;
}

std::vector<int> Quadtree::leaf_neighbors(int leaf, Adjacency2D adj) const {
    int64_t mn[2], size;
    node_lattice(leaf, mn, &size);
    int64_t lo[2] = {mn[0] - 1, mn[1] - 1};
    int64_t hi[2] = {mn[0] + size, mn[1] + size};
    std::vector<int> out;
    for (int n : leaves_in_region(lo, hi)) {
        if (n == leaf) continue;
        int64_t bm[2], bs;
        node_lattice(n, bm, &bs);
        int pos = 0;
        for (int a = 0; a < 2; ++a) {
            int64_t l = std::max(mn[a], bm[a]);
            int64_t h = std::min(mn[a] + size, bm[a] + bs);
            if (h > l) ++pos;
        }
        if (adj == Adjacency2D::Vertex || pos == 1) out.push_back(n);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void Quadtree::enforce_strong_balance() {
    bool changed = true;
    while (changed) {
        changed = false;
        size_t count = nodes_.size();
        for (size_t n = 0; n < count; ++n) {
            if (nodes_[n].is_leaf()) continue;
            bool any_internal = false;
            for (int i = 0; i < 4; ++i)
                if (!nodes_[(size_t)child((int)n, i)].is_leaf()) any_internal = true;
            if (!any_internal) continue;
            for (int i = 0; i < 4; ++i) {
                int c = child((int)n, i);
                if (nodes_[(size_t)c].is_leaf()) {
                    refine_leaf(c);
                    changed = true;
                }
            }
        }
        std::vector<int> to_split;
        for (size_t n = 0; n < nodes_.size(); ++n) {
            if (!nodes_[n].is_leaf()) continue;
            int64_t mn[2], size;
            node_lattice((int)n, mn, &size);
            int64_t lo[2] = {mn[0] - 1, mn[1] - 1};
            int64_t hi[2] = {mn[0] + size, mn[1] + size};
            for (int nb : leaves_in_region(lo, hi))
                if (nodes_[(size_t)nb].level >= nodes_[n].level + 2) {
                    to_split.push_back((int)n);
                    break;
                }
        }
        for (int n : to_split)
            if (nodes_[(size_t)n].is_leaf()) {
                refine_leaf(n);
                changed = true;
            }
    }
}

bool Quadtree::is_strongly_balanced() const {
    for (size_t n = 0; n < nodes_.size(); ++n) {
        if (nodes_[n].is_leaf()) continue;
        int internal = 0;
        for (int i = 0; i < 4; ++i)
            if (!nodes_[(size_t)child((int)n, i)].is_leaf()) ++internal;
        if (internal != 0 && internal != 4) return false;
    }
    for (size_t n = 0; n < nodes_.size(); ++n) {
        if (!nodes_[n].is_leaf()) continue;
        int64_t mn[2], size;
        node_lattice((int)n, mn, &size);
        int64_t lo[2] = {mn[0] - 1, mn[1] - 1};
        int64_t hi[2] = {mn[0] + size, mn[1] + size};
        for (int nb : leaves_in_region(lo, hi))
            if (std::abs((int)nodes_[(size_t)nb].level - (int)nodes_[n].level) > 1) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// dual extraction

namespace {

uint64_t pack2(int64_t x, int64_t y) { return ((uint64_t)(uint32_t)x << 32) | (uint64_t)(uint32_t)y; }

struct DualBuilder {
    QuadMesh mesh;
    std::unordered_map<int, int> leaf_vert;      // leaf node -> dual vertex
    const Quadtree* tree = nullptr;

    int vert_for_leaf(int leaf) {
        auto it = leaf_vert.find(leaf);
        if (it != leaf_vert.end()) return it->second;
        Vec2 c = tree->node_center(leaf);
        mesh.vertices.push_back(c);
        int id = (int)mesh.vertices.size() - 1;
        leaf_vert.emplace(leaf, id);
        return id;
    }

    int vert_at(const Vec2& p) {
        mesh.vertices.push_back(p);
        return (int)mesh.vertices.size() - 1;
    }

    void quad(int a, int b, int c, int d) {
        // orient counterclockwise
        const Vec2 &pa = mesh.vertices[a], &pb = mesh.vertices[b], &pc = mesh.vertices[c],
                   &pd = mesh.vertices[d];
        double area = cross2(pb - pa, pc - pa) + cross2(pc - pa, pd - pa);
        if (area < 0) mesh.quads.push_back({a, d, c, b});
        else mesh.quads.push_back({a, b, c, d});
    }
};

// node at exactly this level covering the given level-lattice cell, or -1
int node_at_level(const Quadtree& t, int level, int64_t cx, int64_t cy) {
    int64_t ext = (int64_t)1 << level;
    if (cx < 0 || cy < 0 || cx >= ext || cy >= ext) return -1;
    int n = 0;
    for (int l = 0; l < level; ++l) {
        if (t.is_leaf(n)) return -1;
        int shift = level - l - 1;
        int ix = (int)((cx >> shift) & 1);
        int iy = (int)((cy >> shift) & 1);
        n = t.child(n, ix | (iy << 1));
    }
    return n;
}

} // namespace

QuadMesh extract_dual_2d(const Quadtree& tree) {
    if (!tree.is_strongly_balanced())
        throw std::invalid_argument("extract_dual_2d: tree is not strongly balanced");

    DualBuilder b;
    b.tree = &tree;

    std::vector<int> leaves = tree.leaves();
    std::unordered_set<uint64_t> consumed;

    // transition edges between same-level footprints: coarse block (children
    // are leaves) next to fine block (children are internal)
    struct Transition {
        int coarse, fine;
        int axis;     // normal axis of the shared edge
        int sign;     // +1: fine at higher coordinate
    };
    std::vector<Transition> transitions;
    for (size_t n = 0; n < tree.nodes().size(); ++n) {
        const Quadrant& q = tree.nodes()[n];
        if (q.is_leaf()) continue;
        bool children_leaves = true;
        for (int i = 0; i < 4; ++i)
            if (!tree.is_leaf(tree.child((int)n, i))) children_leaves = false;
        if (!children_leaves) continue; // only scan from the coarse side
        int level = q.level;
        const int64_t cx = q.x, cy = q.y;
        const int64_t dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (auto& d : dirs) {
            int g = node_at_level(tree, level, cx + d[0], cy + d[1]);
            if (g < 0 || tree.is_leaf(g)) continue;
            bool g_children_internal = true;
            for (int i = 0; i < 4; ++i)
                if (tree.is_leaf(tree.child(g, i))) g_children_internal = false;
            if (!g_children_internal) continue; // same grain
            Transition tr;
            tr.coarse = (int)n;
            tr.fine = g;
            tr.axis = d[0] != 0 ? 0 : 1;
            tr.sign = (d[0] + d[1]) > 0 ? 1 : -1;
            transitions.push_back(tr);
        }
    }

    double s = 1.0 / (double)tree.lattice_extent();

    for (auto& tr : transitions) {
        int64_t fm[2], fsz;
        tree.node_lattice(tr.coarse, fm, &fsz);
        int t_ax = 1 - tr.axis;
        // edge line in finest lattice coords
        int64_t edge_coord = tr.sign > 0 ? fm[tr.axis] + fsz : fm[tr.axis];
        int64_t t0 = fm[t_ax];
        int64_t step = fsz / 4; // fine cell size in finest units

        // consumed interior points of the block transition edge
        for (int k = 1; k <= 3; ++k) {
            int64_t px = tr.axis == 0 ? edge_coord : t0 + k * step;
            int64_t py = tr.axis == 0 ? t0 + k * step : edge_coord;
            consumed.insert(pack2(px, py));
        }

        // coarse cells P1,P2 and fine cells B1..B4 hugging the edge
        auto cell_at = [&](int64_t along, int64_t inward) {
            int64_t px = tr.axis == 0 ? inward : along;
            int64_t py = tr.axis == 0 ? along : inward;
            int leaf = -1;
            int64_t ext = tree.lattice_extent();
            if (px >= 0 && py >= 0 && px < ext && py < ext) {
                int n0 = 0;
                int64_t cxx = px, cyy = py;
                int maxl = tree.max_level();
                (void)maxl;
                // descend
                while (!tree.is_leaf(n0)) {
                    int shift = tree.max_level() - tree.nodes()[n0].level - 1;
                    int ix = (int)((cxx >> shift) & 1);
                    int iy = (int)((cyy >> shift) & 1);
                    n0 = tree.child(n0, ix | (iy << 1));
                }
                leaf = n0;
            }
            return leaf;
        };

        int64_t in_coarse = tr.sign > 0 ? edge_coord - 1 : edge_coord;
        int64_t in_fine = tr.sign > 0 ? edge_coord : edge_coord - 1;
        int P[2], B[4];
        for (int k = 0; k < 2; ++k) P[k] = cell_at(t0 + (2 * k + 1) * step, in_coarse);
        for (int k = 0; k < 4; ++k) B[k] = cell_at(t0 + k * step + step / 2, in_fine);
        for (int k = 0; k < 2; ++k)
            if (P[k] < 0 || tree.nodes()[P[k]].level != tree.nodes()[tr.coarse].level + 1)
                throw std::logic_error("extract_dual_2d: malformed coarse side of transition");
        for (int k = 0; k < 4; ++k)
            if (B[k] < 0 || tree.nodes()[B[k]].level != tree.nodes()[tr.coarse].level + 2)
                throw std::logic_error("extract_dual_2d: malformed fine side of transition");

        int p1 = b.vert_for_leaf(P[0]), p2 = b.vert_for_leaf(P[1]);
        int b1 = b.vert_for_leaf(B[0]), b2 = b.vert_for_leaf(B[1]), b3 = b.vert_for_leaf(B[2]),
            b4 = b.vert_for_leaf(B[3]);

        // new vertices at the midpoints of the middle patch quad's diagonals
        Vec2 n1p = (b.mesh.vertices[p1] + b.mesh.vertices[b3]) * 0.5;
        Vec2 n2p = (b.mesh.vertices[p2] + b.mesh.vertices[b2]) * 0.5;
        int n1 = b.vert_at(n1p), n2 = b.vert_at(n2p);

        b.quad(p1, b1, b2, n1);
        b.quad(n1, b2, b3, n2);
        b.quad(p2, n2, b3, b4);
        b.quad(p1, n1, n2, p2);
    }

    // plain dual quads at unconsumed regular grid points
    std::unordered_set<uint64_t> points;
    (void)s;
    for (int leaf : leaves) {
        int64_t mn[2], size;
        tree.node_lattice(leaf, mn, &size);
        const int64_t cs[4][2] = {{0, 0}, {size, 0}, {0, size}, {size, size}};
        for (auto& c : cs) points.insert(pack2(mn[0] + c[0], mn[1] + c[1]));
    }
    std::vector<uint64_t> sorted_points(points.begin(), points.end());
    std::sort(sorted_points.begin(), sorted_points.end());

    for (uint64_t key : sorted_points) {
        if (consumed.count(key)) continue;
        int64_t px = (int64_t)(uint32_t)(key >> 32);
        int64_t py = (int64_t)(uint32_t)key;
        int64_t ext = tree.lattice_extent();
        if (px <= 0 || py <= 0 || px >= ext || py >= ext) continue;
        int quadrant_leaf[4];
        bool regular = true;
        const int64_t qd[4][2] = {{-1, -1}, {0, -1}, {0, 0}, {-1, 0}}; // (-,-),(+,-),(+,+),(-,+)
        for (int k = 0; k < 4 && regular; ++k) {
            int64_t cxx = px + qd[k][0], cyy = py + qd[k][1];
            int n = 0;
            while (!tree.is_leaf(n)) {
                int shift = tree.max_level() - tree.nodes()[n].level - 1;
                int ix = (int)((cxx >> shift) & 1);
                int iy = (int)((cyy >> shift) & 1);
                n = tree.child(n, ix | (iy << 1));
            }
            int64_t mn[2], size;
            tree.node_lattice(n, mn, &size);
            bool corner = (mn[0] == px || mn[0] + size == px) && (mn[1] == py || mn[1] + size == py);
            if (!corner) regular = false;
            quadrant_leaf[k] = n;
        }
        if (!regular) continue;
        b.quad(b.vert_for_leaf(quadrant_leaf[0]), b.vert_for_leaf(quadrant_leaf[1]),
               b.vert_for_leaf(quadrant_leaf[2]), b.vert_for_leaf(quadrant_leaf[3]));
    }

    return b.mesh;
}

} // namespace hexoct

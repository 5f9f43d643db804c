#include "hexoct/octree.hpp"

#include <algorithm>
#include <stdexcept>

namespace hexoct {

void RefinementConfig::validate() const {
    if (base_level < 0 || max_level < base_level || max_level > 12)
        throw std::invalid_argument("refinement levels out of range");
    size_t want = (size_t)(max_level - base_level + 1);
    if (curvature_thresholds.size() != want)
        throw std::invalid_argument("curvature_thresholds must have " + std::to_string(want) +
                                    " entries, got " + std::to_string(curvature_thresholds.size()));
    if (thickness_thresholds.size() != want)
        throw std::invalid_argument("thickness_thresholds must have " + std::to_string(want) +
                                    " entries, got " + std::to_string(thickness_thresholds.size()));
}

AABB Octree::node_bounds(int n) const {
    const Octant& o = nodes_[n];
    double e = 1.0 / (double)((int64_t)1 << o.level);
    AABB b;
    b.lo = {o.x * e, o.y * e, o.z * e};
    b.hi = {(o.x + 1) * e, (o.y + 1) * e, (o.z + 1) * e};
    return b;
}

Vec3 Octree::node_center(int n) const {
    AABB b = node_bounds(n);
    return b.center();
}

double Octree::node_edge(int n) const { return 1.0 / (double)((int64_t)1 << nodes_[n].level); }

void Octree::node_lattice(int n, int64_t out_min[3], int64_t* out_size) const {
    const Octant& o = nodes_[n];
    int shift = max_level_ - o.level;
    out_min[0] = (int64_t)o.x << shift;
    out_min[1] = (int64_t)o.y << shift;
    out_min[2] = (int64_t)o.z << shift;
    if (out_size) *out_size = (int64_t)1 << shift;
}

void Octree::subdivide(int n) {
    Octant& o = nodes_[n];
    if (!o.is_leaf()) return;
    int32_t base = (int32_t)nodes_.size();
    o.first_child = base;
    Octant parent = o; // nodes_ may reallocate below
    for (int i = 0; i < 8; ++i) {
        Octant c;
        c.level = (int8_t)(parent.level + 1);
        c.parent = n;
        c.x = parent.x * 2 + (uint32_t)(i & 1);
        c.y = parent.y * 2 + (uint32_t)((i >> 1) & 1);
        c.z = parent.z * 2 + (uint32_t)((i >> 2) & 1);
        c.kind = parent.kind == CellKind::Boundary ? CellKind::Unknown : parent.kind;
        nodes_.push_back(c);
    }
}

std::vector<int> Octree::leaves() const {
    std::vector<int> out;
    for (size_t i = 0; i < nodes_.size(); ++i)
        if (nodes_[i].is_leaf()) out.push_back((int)i);
    return out;
}

int Octree::leaf_count() const {
    int n = 0;
    for (auto& o : nodes_)
        if (o.is_leaf()) ++n;
    return n;
}

Octree Octree::make_root(int max_level) {
    Octree t;
    t.max_level_ = max_level;
    t.nodes_.push_back(Octant{});
    return t;
}

Octree Octree::build_initial(const TriangleSurface& surface, const RefinementConfig& cfg) {
    cfg.validate();
    const AABB& sb = surface.bounds();
    AABB root{};
    root.lo = {0, 0, 0};
    root.hi = {1, 1, 1};
    if (sb.lo.x < 0 || sb.lo.y < 0 || sb.lo.z < 0 || sb.hi.x > 1 || sb.hi.y > 1 || sb.hi.z > 1)
        throw std::invalid_argument("surface exceeds the root cube");

    Octree t;
    t.max_level_ = cfg.max_level;
    t.surface_ = &surface;
    t.nodes_.push_back(Octant{});
    t.refine_recursive(0, 0, cfg);
    t.classify();
    return t;
}

void Octree::refine_recursive(int n, int required, const RefinementConfig& cfg) {
    AABB box = node_bounds(n);
    bool intersects = surface_->intersects_box(box);
    if (!intersects) return; // interior/exterior cells stay coarse

    int level = nodes_[n].level;
    required = std::max(required, cfg.base_level);

    int rule_levels = cfg.max_level - cfg.base_level; // rules apply at l = 0..rule_levels
    if (level <= rule_levels) {
        // feature statistics over contained vertices, falling back to the
        // nearest vertex of any overlapping triangle when none is contained
        std::vector<int> vs = surface_->vertices_in_box(box);
        double gmax = 0.0, tmin = std::numeric_limits<double>::infinity();
        if (!vs.empty()) {
            for (int v : vs) {
                gmax = std::max(gmax, surface_->vertex_curvature(v));
                tmin = std::min(tmin, surface_->vertex_thickness(v));
            }
        } else {
            Vec3 c = box.center();
            int best = -1;
            double bd = std::numeric_limits<double>::infinity();
            for (int tr : surface_->triangles_in_box(box)) {
                for (int k = 0; k < 3; ++k) {
                    int v = surface_->triangles()[tr][k];
                    double d = norm(surface_->vertices()[v] - c);
                    if (d < bd) {
                        bd = d;
                        best = v;
                    }
                }
            }
            if (best >= 0) {
                gmax = surface_->vertex_curvature(best);
                tmin = surface_->vertex_thickness(best);
            }
        }
        double finest_edge = 1.0 / (double)((int64_t)1 << cfg.max_level);
        if (gmax > cfg.curvature_thresholds[(size_t)level])
            required = std::max(required, level + cfg.base_level);
        if (tmin < cfg.thickness_thresholds[(size_t)level] * finest_edge)
            required = std::max(required, level + cfg.base_level);
    }

    if (level < required && level < cfg.max_level) {
        subdivide(n);
        for (int i = 0; i < 8; ++i) refine_recursive(child(n, i), required, cfg);
    }
}

int Octree::leaf_at_cell(int64_t cx, int64_t cy, int64_t cz) const {
    int64_t ext = lattice_extent();
    if (cx < 0 || cy < 0 || cz < 0 || cx >= ext || cy >= ext || cz >= ext) return -1;
    int n = 0;
    while (!nodes_[n].is_leaf()) {
        int shift = max_level_ - nodes_[n].level - 1;
        int ix = (int)((cx >> shift) & 1);
        int iy = (int)((cy >> shift) & 1);
        int iz = (int)((cz >> shift) & 1);
        n = child(n, ix | (iy << 1) | (iz << 2));
    }
    return n;
}

std::vector<int> Octree::leaves_in_region(const int64_t lo[3], const int64_t hi[3]) const {
    std::vector<int> out;
    std::vector<int> stack{0};
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        int64_t mn[3], size;
        node_lattice(n, mn, &size);
        bool overlap = true;
        for (int a = 0; a < 3; ++a)
            if (mn[a] > hi[a] || mn[a] + size - 1 < lo[a]) {
                overlap = false;
                break;
            }
        if (!overlap) continue;
        if (nodes_[n].is_leaf()) {
            out.push_back(n);
        } else {
            for (int i = 7; i >= 0; --i) stack.push_back(child(n, i));
        }
    }
    return out;
}

std::vector<int> Octree::leaf_neighbors(int leaf, Adjacency adj) const {
    if (!nodes_[leaf].is_leaf()) throw std::invalid_argument("leaf_neighbors: not a leaf");
    int64_t mn[3], size;
    node_lattice(leaf, mn, &size);
    int64_t lo[3] = {mn[0] - 1, mn[1] - 1, mn[2] - 1};
    int64_t hi[3] = {mn[0] + size, mn[1] + size, mn[2] + size};
    std::vector<int> cand = leaves_in_region(lo, hi);
    std::vector<int> out;
    for (int n : cand) {
        if (n == leaf) continue;
        int64_t bmn[3], bsize;
        node_lattice(n, bmn, &bsize);
        int pos_overlap = 0, touch = 0;
        for (int a = 0; a < 3; ++a) {
            int64_t l = std::max(mn[a], bmn[a]);
            int64_t h = std::min(mn[a] + size, bmn[a] + bsize);
            if (h > l) ++pos_overlap;
            else if (h == l) ++touch;
            // disjoint axes cannot happen for region hits
        }
        if (pos_overlap + touch != 3) continue;
        bool keep = false;
        switch (adj) {
            case Adjacency::Face: keep = pos_overlap == 2; break;
            case Adjacency::Edge: keep = pos_overlap >= 1; break;
            case Adjacency::Vertex: keep = true; break;
        }
        if (keep) out.push_back(n);
    }
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        int64_t am[3], bm[3], as, bs;
        node_lattice(a, am, &as);
        node_lattice(b, bm, &bs);
        return std::tie(am[0], am[1], am[2], as) < std::tie(bm[0], bm[1], bm[2], bs);
    });
    return out;
}

void Octree::enforce_strong_balance() {
    bool changed = true;
    while (changed) {
        changed = false;

        // pairing: sibling groups refine together
        size_t count = nodes_.size();
        for (size_t n = 0; n < count; ++n) {
            if (nodes_[n].is_leaf()) continue;
            bool any_internal = false;
            for (int i = 0; i < 8; ++i)
                if (!nodes_[(size_t)child((int)n, i)].is_leaf()) any_internal = true;
            if (!any_internal) continue;
            for (int i = 0; i < 8; ++i) {
                int c = child((int)n, i);
                if (nodes_[(size_t)c].is_leaf()) {
                    subdivide(c);
                    changed = true;
                }
            }
        }

        // 2:1 balance across vertex adjacency
        std::vector<int> to_split;
        for (size_t n = 0; n < nodes_.size(); ++n) {
            if (!nodes_[n].is_leaf()) continue;
            int64_t mn[3], size;
            node_lattice((int)n, mn, &size);
            int64_t lo[3] = {mn[0] - 1, mn[1] - 1, mn[2] - 1};
            int64_t hi[3] = {mn[0] + size, mn[1] + size, mn[2] + size};
            for (int nb : leaves_in_region(lo, hi)) {
                if (nodes_[(size_t)nb].level >= nodes_[n].level + 2) {
                    to_split.push_back((int)n);
                    break;
                }
            }
        }
        for (int n : to_split)
            if (nodes_[(size_t)n].is_leaf()) {
                subdivide(n);
                changed = true;
            }
    }
    if (surface_) classify();
}

bool Octree::is_strongly_balanced() const {
    for (size_t n = 0; n < nodes_.size(); ++n) {
        if (nodes_[n].is_leaf()) continue;
        int internal = 0;
        for (int i = 0; i < 8; ++i)
            if (!nodes_[(size_t)child((int)n, i)].is_leaf()) ++internal;
        if (internal != 0 && internal != 8) return false;
    }
    for (size_t n = 0; n < nodes_.size(); ++n) {
        if (!nodes_[n].is_leaf()) continue;
        int64_t mn[3], size;
        node_lattice((int)n, mn, &size);
        int64_t lo[3] = {mn[0] - 1, mn[1] - 1, mn[2] - 1};
        int64_t hi[3] = {mn[0] + size, mn[1] + size, mn[2] + size};
        for (int nb : leaves_in_region(lo, hi))
            if (std::abs((int)nodes_[(size_t)nb].level - (int)nodes_[n].level) > 1) return false;
    }
    return true;
}

void Octree::classify() {
    if (!surface_) return;
    for (size_t n = 0; n < nodes_.size(); ++n) {
        if (!nodes_[n].is_leaf()) continue;
        if (nodes_[n].kind == CellKind::Interior || nodes_[n].kind == CellKind::Exterior)
            continue; // inherited from a non-boundary ancestor, still valid
        AABB box = node_bounds((int)n);
        if (surface_->intersects_box(box)) {
            nodes_[n].kind = CellKind::Boundary;
        } else {
            nodes_[n].kind = surface_->signed_distance(box.center()) > 0 ? CellKind::Interior
                                                                         : CellKind::Exterior;
        }
    }
}

} // namespace hexoct

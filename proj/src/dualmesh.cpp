#include "hexoct/dualmesh.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace hexoct {

namespace {

uint64_t pack3(int64_t x, int64_t y, int64_t z) {
    // finest coords fit in 21 bits for max_level <= 12 plus margin
    return ((uint64_t)(x & 0x1FFFFF) << 42) | ((uint64_t)(y & 0x1FFFFF) << 21) |
           (uint64_t)(z & 0x1FFFFF);
}

// node at exactly `level` covering the level-lattice cell, or -1
int node_at_level(const Octree& t, int level, int64_t cx, int64_t cy, int64_t cz) {
    int64_t ext = (int64_t)1 << level;
    if (cx < 0 || cy < 0 || cz < 0 || cx >= ext || cy >= ext || cz >= ext) return -1;
    int n = 0;
    for (int l = 0; l < level; ++l) {
        if (t.is_leaf(n)) return -1;
        int shift = level - l - 1;
        int ix = (int)((cx >> shift) & 1);
        int iy = (int)((cy >> shift) & 1);
        int iz = (int)((cz >> shift) & 1);
        n = t.child(n, ix | (iy << 1) | (iz << 2));
    }
    return n;
}

// block grain relative to footprint level: 1 = children are leaves (coarse),
// 2 = children internal (refined), 0 = not a block at this level
int block_grain(const Octree& t, int n) {
    if (n < 0 || t.is_leaf(n)) return 0;
    int internal = 0;
    for (int i = 0; i < 8; ++i)
        if (!t.is_leaf(t.child(n, i))) ++internal;
    if (internal == 0) return 1;
    if (internal == 8) return 2;
    throw std::invalid_argument("octree not strongly balanced: mixed sibling group under node " +
                                std::to_string(n));
}

} // namespace

std::vector<TransitionRecord> detect_transitions(const Octree& tree) {
    if (!tree.is_strongly_balanced())
        throw std::invalid_argument("detect_transitions: octree is not strongly balanced");

    std::vector<TransitionRecord> out;
    std::set<std::tuple<int, int64_t, int64_t, int64_t>> edge_seen;

    const auto& nodes = tree.nodes();
    for (size_t n = 0; n < nodes.size(); ++n) {
        if (nodes[n].is_leaf()) continue;
        if (block_grain(tree, (int)n) != 1) continue; // scan from coarse blocks
        int level = nodes[n].level;
        int64_t px = nodes[n].x, py = nodes[n].y, pz = nodes[n].z;
        int64_t S = (int64_t)1 << (tree.max_level() - level); // footprint size, finest units

        // transition faces: coarse block next to a refined same-level footprint
        const int64_t dirs[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                    {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
        for (auto& d : dirs) {
            int g = node_at_level(tree, level, px + d[0], py + d[1], pz + d[2]);
            if (block_grain(tree, g) != 2) continue;
            TransitionRecord r;
            r.type = TransitionType::Face;
            r.axis = d[0] != 0 ? 0 : (d[1] != 0 ? 1 : 2);
            r.span = S;
            int64_t fm[3] = {px * S, py * S, pz * S};
            r.anchor[0] = fm[0];
            r.anchor[1] = fm[1];
            r.anchor[2] = fm[2];
            int sign = d[0] + d[1] + d[2];
            // anchor holds the face plane coordinate on the face's axis
            r.anchor[r.axis] = sign > 0 ? fm[r.axis] + S : fm[r.axis];
            r.coarse_sign = sign > 0 ? -1 : +1;
            out.push_back(r);
        }

        // transition edges: mixed grains around a footprint edge
        for (int axis = 0; axis < 3; ++axis) {
            int c1 = (axis + 1) % 3, c2 = (axis + 2) % 3;
            int64_t fp[3] = {px, py, pz};
            for (int s1 = 0; s1 <= 1; ++s1)
                for (int s2 = 0; s2 <= 1; ++s2) {
                    int64_t line1 = fp[c1] + s1, line2 = fp[c2] + s2;
                    int grain[4];
                    bool ok = true;
                    for (int q = 0; q < 4 && ok; ++q) {
                        int64_t cc[3];
                        cc[axis] = fp[axis];
                        cc[c1] = line1 - 1 + (kQuadrantSign[q][0] > 0 ? 1 : 0);
                        cc[c2] = line2 - 1 + (kQuadrantSign[q][1] > 0 ? 1 : 0);
                        int g = node_at_level(tree, level, cc[0], cc[1], cc[2]);
                        grain[q] = block_grain(tree, g);
                        if (grain[q] == 0) ok = false;
                    }
                    if (!ok) continue;
                    uint8_t fine = 0;
                    for (int q = 0; q < 4; ++q)
                        if (grain[q] == 2) fine |= (uint8_t)(1 << q);
                    if (fine == 0 || fine == 0b1111) continue;

                    TransitionRecord r;
                    r.type = TransitionType::Edge;
                    r.axis = axis;
                    r.span = S;
                    r.anchor[axis] = fp[axis] * S;
                    r.anchor[c1] = line1 * S;
                    r.anchor[c2] = line2 * S;
                    r.fine_mask = fine;
                    switch (fine) {
                        case 0b0001: r.edge_kind = EdgeKind::B; r.rotation = 0; break;
                        case 0b0010: r.edge_kind = EdgeKind::B; r.rotation = 1; break;
                        case 0b0100: r.edge_kind = EdgeKind::B; r.rotation = 2; break;
                        case 0b1000: r.edge_kind = EdgeKind::B; r.rotation = 3; break;
                        case 0b0011: r.edge_kind = EdgeKind::C; r.rotation = 0; break;
                        case 0b0110: r.edge_kind = EdgeKind::C; r.rotation = 1; break;
                        case 0b1100: r.edge_kind = EdgeKind::C; r.rotation = 2; break;
                        case 0b1001: r.edge_kind = EdgeKind::C; r.rotation = 3; break;
                        case 0b0111: r.edge_kind = EdgeKind::D; r.rotation = 0; break;
                        case 0b1110: r.edge_kind = EdgeKind::D; r.rotation = 1; break;
                        case 0b1101: r.edge_kind = EdgeKind::D; r.rotation = 2; break;
                        case 0b1011: r.edge_kind = EdgeKind::D; r.rotation = 3; break;
                        case 0b0101: r.edge_kind = EdgeKind::E; r.rotation = 0; break;
                        case 0b1010: r.edge_kind = EdgeKind::E; r.rotation = 1; break;
                        default:
                            throw std::logic_error("unclassifiable transition edge configuration");
                    }
                    auto key = std::make_tuple(axis, r.anchor[0], r.anchor[1], r.anchor[2]);
                    if (edge_seen.insert(key).second) out.push_back(r);
                }
        }
    }

    std::sort(out.begin(), out.end(), [](const TransitionRecord& a, const TransitionRecord& b) {
        return std::tie(a.type, a.axis, a.anchor[0], a.anchor[1], a.anchor[2]) <
               std::tie(b.type, b.axis, b.anchor[0], b.anchor[1], b.anchor[2]);
    });
    return out;
}

// ---------------------------------------------------------------------------

namespace {

struct DualBuilder {
    const Octree* tree = nullptr;
    HexMesh mesh;
    std::unordered_map<int, int> leaf_vert;
    std::map<std::tuple<int, int64_t, int64_t, int64_t, int, int>, int> rim_vert;
    double scale = 1.0; // lattice -> domain

    int vert_for_leaf(int leaf) {
        auto it = leaf_vert.find(leaf);
        if (it != leaf_vert.end()) return it->second;
        int64_t mn[3], size;
        tree->node_lattice(leaf, mn, &size);
        Vec3 c{(mn[0] + size * 0.5) * scale, (mn[1] + size * 0.5) * scale,
               (mn[2] + size * 0.5) * scale};
        mesh.vertices.push_back(c);
        int id = (int)mesh.vertices.size() - 1;
        leaf_vert.emplace(leaf, id);
        return id;
    }

    // leaf center vertex for the leaf covering a finest-lattice cell; the leaf
    // must sit at the expected level or the tree was not balanced
    int vert_for_cell(int64_t cx, int64_t cy, int64_t cz, int expect_level) {
        int leaf = tree->leaf_at_cell(cx, cy, cz);
        if (leaf < 0 || tree->nodes()[(size_t)leaf].level != expect_level)
            throw std::logic_error("extract_dual: leaf level mismatch near cell (" +
                                   std::to_string(cx) + "," + std::to_string(cy) + "," +
                                   std::to_string(cz) + ")");
        return vert_for_leaf(leaf);
    }

    // shared rim vertex on a transition edge: slot 0/1 along the edge,
    // diagonal into world quadrant `quad` of the edge's cross axes
    int rim_vertex(int axis, const int64_t anchor[3], int64_t span, int quad, int slot) {
        auto key = std::make_tuple(axis, anchor[0], anchor[1], anchor[2], quad, slot);
        auto it = rim_vert.find(key);
        if (it != rim_vert.end()) return it->second;
        double u = (double)span / 4.0;
        int c1 = (axis + 1) % 3, c2 = (axis + 2) % 3;
        double p[3] = {(double)anchor[0], (double)anchor[1], (double)anchor[2]};
        p[axis] += (slot == 0 ? kRimS : 4.0 - kRimS) * u;
        p[c1] += kQuadrantSign[quad][0] * rim_depth() * u;
        p[c2] += kQuadrantSign[quad][1] * rim_depth() * u;
        mesh.vertices.push_back(Vec3{p[0] * scale, p[1] * scale, p[2] * scale});
        int id = (int)mesh.vertices.size() - 1;
        rim_vert.emplace(key, id);
        return id;
    }

    void add_hex(const std::array<int, 8>& h, HexTag tag) {
        mesh.hexes.push_back(h);
        mesh.tags.push_back(tag);
    }
};

void emit_face_patch(DualBuilder& b, const TransitionRecord& r) {
    const Octree& t = *b.tree;
    int n = r.axis;
    int t1 = (n + 1) % 3, t2 = (n + 2) % 3;
    int64_t S = r.span;
    int64_t u = S / 4;
    bool flip = r.coarse_sign > 0; // coarse block on the higher side of the plane

    // expected leaf levels from the footprint size
    int lambda = t.max_level() - (int)std::countr_zero((uint64_t)S);
    int coarse_level = lambda + 1, fine_level = lambda + 2;

    // canonical (X,Y,Z) -> world lattice point; Z toward the fine side
    auto map_pt = [&](double X, double Y, double Z, double out[3]) {
        out[n] = (double)r.anchor[n] + (flip ? -Z : Z) * (double)u;
        out[t1] = (double)r.anchor[t1] + (flip ? 4.0 - X : X) * (double)u;
        out[t2] = (double)r.anchor[t2] + Y * (double)u;
    };

    int vid[kFaceTemplateVerts];

    // coarse centers: canonical (1+2i, 1+2j, -1)
    for (int j = 0; j < 2; ++j)
        for (int i = 0; i < 2; ++i) {
            double p[3];
            map_pt(1.0 + 2 * i, 1.0 + 2 * j, -1.0, p);
            int slot = (i ^ j) == 0 ? (i == 0 ? 0 : 2) : (i == 1 ? 1 : 3); // b00,b10,b11,b01
            vid[slot] = b.vert_for_cell((int64_t)std::floor(p[0]), (int64_t)std::floor(p[1]),
                                        (int64_t)std::floor(p[2]), coarse_level);
        }
    // fine centers: canonical (0.5+i, 0.5+j, 0.5)
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) {
            double p[3];
            map_pt(0.5 + i, 0.5 + j, 0.5, p);
            vid[4 + i + 4 * j] = b.vert_for_cell((int64_t)std::floor(p[0]),
                                                 (int64_t)std::floor(p[1]),
                                                 (int64_t)std::floor(p[2]), fine_level);
        }

    // rims of the four bounding edges. The bounding edge along axis `a` at
    // cross position (o1 on the other tangent, plane on n); rim quadrant signs:
    // toward the coarse side on n, into the face on the other tangent.
    auto rim = [&](int edge_axis, bool high_side, int canon_slot) {
        int64_t anchor[3] = {r.anchor[0], r.anchor[1], r.anchor[2]};
        int other = edge_axis == t1 ? t2 : t1;
        if (high_side) anchor[other] += S;
        // quadrant in the edge's own cross axes (edge_axis+1, edge_axis+2)
        int ec1 = (edge_axis + 1) % 3, ec2 = (edge_axis + 2) % 3;
        double sgn[3] = {0, 0, 0};
        sgn[n] = r.coarse_sign;              // toward coarse
        sgn[other] = high_side ? -1.0 : 1.0; // into the face
        int quad = -1;
        for (int q = 0; q < 4; ++q)
            if (kQuadrantSign[q][0] == sgn[ec1] && kQuadrantSign[q][1] == sgn[ec2]) quad = q;
        // slot by world parameter along the edge
        int slot = canon_slot;
        if (edge_axis == t1 && flip) slot = 1 - slot;
        return b.rim_vertex(edge_axis, anchor, S, quad, slot);
    };
    vid[20] = rim(t1, false, 0); // s0
    vid[21] = rim(t1, false, 1); // s1
    vid[24] = rim(t1, true, 0);  // n0
    vid[25] = rim(t1, true, 1);  // n1
    vid[26] = rim(t2, false, 0); // w0
    vid[27] = rim(t2, false, 1); // w1
    vid[22] = rim(t2, true, 0);  // e0
    vid[23] = rim(t2, true, 1);  // e1

    // face center vertices (private to this patch)
    const double q4[4][2] = {{2 - kQSpread, 2 - kQSpread},
                             {2 + kQSpread, 2 - kQSpread},
                             {2 + kQSpread, 2 + kQSpread},
                             {2 - kQSpread, 2 + kQSpread}};
    for (int k = 0; k < 4; ++k) {
        double p[3];
        map_pt(q4[k][0], q4[k][1], -kQDepth, p);
        b.mesh.vertices.push_back(Vec3{p[0] * b.scale, p[1] * b.scale, p[2] * b.scale});
        vid[28 + k] = (int)b.mesh.vertices.size() - 1;
    }

    for (auto& h : kFaceTemplateHexes) {
        std::array<int, 8> world;
        for (int k = 0; k < 8; ++k) world[(size_t)k] = vid[h[(size_t)k]];
        b.add_hex(world, HexTag::TemplateFace);
    }
}

void emit_edge_patch(DualBuilder& b, const TransitionRecord& r) {
    const Octree& t = *b.tree;
    int a = r.axis;
    int c1 = (a + 1) % 3, c2 = (a + 2) % 3;
    int64_t S = r.span;
    int64_t u = S / 4;
    int lambda = t.max_level() - (int)std::countr_zero((uint64_t)S);
    int coarse_level = lambda + 1, fine_level = lambda + 2;

    // canonical cross coords rotated into world quadrants
    auto rot = [&](double cx, double cy, int k, double* wx, double* wy) {
        for (int i = 0; i < k; ++i) {
            double nx = -cy, ny = cx;
            cx = nx;
            cy = ny;
        }
        *wx = cx;
        *wy = cy;
    };

    int vid[16];
    uint8_t canon_fine = edge_kind_fine_mask(r.edge_kind);
    for (int qc = 0; qc < 4; ++qc) {
        int qw = (qc + r.rotation) % 4;
        double sx = kQuadrantSign[qc][0], sy = kQuadrantSign[qc][1];
        if (canon_fine & (1 << qc)) {
            for (int k = 0; k < 4; ++k) {
                double wx, wy;
                rot(sx * 0.5, sy * 0.5, r.rotation, &wx, &wy);
                double p[3];
                p[a] = (double)r.anchor[a] + (k + 0.5) * (double)u;
                p[c1] = (double)r.anchor[c1] + wx * (double)u;
                p[c2] = (double)r.anchor[c2] + wy * (double)u;
                vid[4 * qc + k] = b.vert_for_cell((int64_t)std::floor(p[0]),
                                                  (int64_t)std::floor(p[1]),
                                                  (int64_t)std::floor(p[2]), fine_level);
            }
        } else {
            for (int k = 0; k < 2; ++k) {
                double wx, wy;
                rot(sx, sy, r.rotation, &wx, &wy);
                double p[3];
                p[a] = (double)r.anchor[a] + (1.0 + 2 * k) * (double)u;
                p[c1] = (double)r.anchor[c1] + wx * (double)u;
                p[c2] = (double)r.anchor[c2] + wy * (double)u;
                vid[4 * qc + k] = b.vert_for_cell((int64_t)std::floor(p[0]),
                                                  (int64_t)std::floor(p[1]),
                                                  (int64_t)std::floor(p[2]), coarse_level);
            }
            vid[4 * qc + 2] = b.rim_vertex(a, r.anchor, S, qw, 0);
            vid[4 * qc + 3] = b.rim_vertex(a, r.anchor, S, qw, 1);
        }
    }

    int count = 0;
    auto* hx = edge_kind_hexes(r.edge_kind, &count);
    for (int h = 0; h < count; ++h) {
        std::array<int, 8> world;
        for (int k = 0; k < 8; ++k) world[(size_t)k] = vid[hx[h][k]];
        b.add_hex(world, HexTag::TemplateEdge);
    }
}

} // namespace

HexMesh extract_dual(const Octree& tree, const std::vector<TransitionRecord>& transitions) {
    DualBuilder b;
    b.tree = &tree;
    b.scale = 1.0 / (double)tree.lattice_extent();

    // lattice points consumed by template patches
    std::unordered_set<uint64_t> consumed;
    for (auto& r : transitions) {
        int64_t u = r.span / 4;
        if (r.type == TransitionType::Face) {
            int t1 = (r.axis + 1) % 3, t2 = (r.axis + 2) % 3;
            for (int i = 1; i <= 3; ++i)
                for (int j = 1; j <= 3; ++j) {
                    int64_t p[3];
                    p[r.axis] = r.anchor[r.axis];
                    p[t1] = r.anchor[t1] + i * u;
                    p[t2] = r.anchor[t2] + j * u;
                    consumed.insert(pack3(p[0], p[1], p[2]));
                }
        } else {
            int c1 = (r.axis + 1) % 3, c2 = (r.axis + 2) % 3;
            for (int k = 1; k <= 3; ++k) {
                int64_t p[3];
                p[r.axis] = r.anchor[r.axis] + k * u;
                p[c1] = r.anchor[c1];
                p[c2] = r.anchor[c2];
                consumed.insert(pack3(p[0], p[1], p[2]));
            }
        }
    }

    // plain dual hexes at grid points shared as a corner by exactly 8 leaves
    std::vector<int> leaves = tree.leaves();
    std::unordered_set<uint64_t> candidates;
    std::vector<uint64_t> order;
    for (int leaf : leaves) {
        int64_t mn[3], size;
        tree.node_lattice(leaf, mn, &size);
        for (int dz = 0; dz <= 1; ++dz)
            for (int dy = 0; dy <= 1; ++dy)
                for (int dx = 0; dx <= 1; ++dx) {
                    uint64_t key = pack3(mn[0] + dx * size, mn[1] + dy * size, mn[2] + dz * size);
                    if (candidates.insert(key).second) order.push_back(key);
                }
    }
    std::sort(order.begin(), order.end());

    int64_t ext = tree.lattice_extent();
    for (uint64_t key : order) {
        int64_t px = (int64_t)((key >> 42) & 0x1FFFFF);
        int64_t py = (int64_t)((key >> 21) & 0x1FFFFF);
        int64_t pz = (int64_t)(key & 0x1FFFFF);
        if (px <= 0 || py <= 0 || pz <= 0 || px >= ext || py >= ext || pz >= ext) continue;
        if (consumed.count(key)) continue;
        int octant_leaf[8];
        bool regular = true;
        int min_level = 127, max_level = 0;
        for (int o = 0; o < 8 && regular; ++o) {
            int dx = o & 1, dy = (o >> 1) & 1, dz = (o >> 2) & 1;
            int leaf = tree.leaf_at_cell(px - 1 + dx, py - 1 + dy, pz - 1 + dz);
            int64_t mn[3], size;
            tree.node_lattice(leaf, mn, &size);
            bool corner = (mn[0] == px || mn[0] + size == px) && (mn[1] == py || mn[1] + size == py) &&
                          (mn[2] == pz || mn[2] + size == pz);
            if (!corner) {
                regular = false;
                break;
            }
            octant_leaf[o] = leaf;
            int lv = tree.nodes()[(size_t)leaf].level;
            min_level = std::min(min_level, lv);
            max_level = std::max(max_level, lv);
        }
        if (!regular) continue;
        // octants: bottom (-z) ring counterclockwise, then top
        std::array<int, 8> hex{
            b.vert_for_leaf(octant_leaf[0]), b.vert_for_leaf(octant_leaf[1]),
            b.vert_for_leaf(octant_leaf[3]), b.vert_for_leaf(octant_leaf[2]),
            b.vert_for_leaf(octant_leaf[4]), b.vert_for_leaf(octant_leaf[5]),
            b.vert_for_leaf(octant_leaf[7]), b.vert_for_leaf(octant_leaf[6])};
        b.add_hex(hex, min_level == max_level ? HexTag::GridDual : HexTag::CornerFill);
    }

    for (auto& r : transitions) {
        if (r.type == TransitionType::Face) emit_face_patch(b, r);
        else emit_edge_patch(b, r);
    }

    return std::move(b.mesh);
}

} // namespace hexoct

#include "hexoct/coremesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hexoct {

HexMesh remove_exterior(const HexMesh& mesh, const TriangleSurface& surface) {
    std::vector<double> sd(mesh.vertices.size());
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        sd[v] = surface.signed_distance(mesh.vertices[v]);

    HexMesh out;
    out.vertices = mesh.vertices;
    for (int h = 0; h < mesh.hex_count(); ++h) {
        std::array<double, 8> f;
        for (int k = 0; k < 8; ++k) f[(size_t)k] = sd[(size_t)mesh.hexes[(size_t)h][(size_t)k]];
        if (!exterior_removal_rule(f)) {
            out.hexes.push_back(mesh.hexes[(size_t)h]);
            out.tags.push_back(mesh.tags.empty() ? HexTag::GridDual : mesh.tags[(size_t)h]);
        }
    }
    if (out.hexes.empty())
        throw MeshError("remove_exterior: no hexes remain; the surface is thinner than the finest "
                        "cells, increase max_level");
    compact_vertices(out);
    return out;
}

std::vector<Vec3> boundary_fan_normals(const HexMesh& mesh,
                                       const std::vector<BoundaryQuad>& quads, int vertex) {
    // quads around the vertex
    std::vector<const BoundaryQuad*> fan;
    for (auto& q : quads)
        for (int k = 0; k < 4; ++k)
            if (q.v[(size_t)k] == vertex) {
                fan.push_back(&q);
                break;
            }
    size_t m = fan.size();
    if (m < 3) return {};

    // walk the fan by shared edges at the vertex
    auto corner_of = [&](const BoundaryQuad* q) {
        for (int k = 0; k < 4; ++k)
            if (q->v[(size_t)k] == vertex) return k;
        return -1;
    };
    std::map<int, std::vector<int>> edge_quads; // other endpoint -> fan indices
    for (size_t i = 0; i < m; ++i) {
        int c = corner_of(fan[i]);
        edge_quads[fan[i]->v[(size_t)((c + 1) % 4)]].push_back((int)i);
        edge_quads[fan[i]->v[(size_t)((c + 3) % 4)]].push_back((int)i);
    }
    for (auto& [other, qs] : edge_quads)
        if (qs.size() != 2) return {}; // non-manifold or pinched fan

    std::vector<int> order;
    std::vector<char> used(m, 0);
    int cur = 0;
    int enter = -1; // vertex id of the edge we entered through
    for (size_t step = 0; step < m; ++step) {
        order.push_back(cur);
        used[(size_t)cur] = 1;
        int c = corner_of(fan[(size_t)cur]);
        int nxt = fan[(size_t)cur]->v[(size_t)((c + 1) % 4)];
        int prv = fan[(size_t)cur]->v[(size_t)((c + 3) % 4)];
        int exit_vert = (enter == nxt) ? prv : nxt;
        auto& qs = edge_quads[exit_vert];
        int next_quad = qs[0] == cur ? qs[1] : qs[0];
        enter = exit_vert;
        cur = next_quad;
        if (step + 1 < m && used[(size_t)cur]) return {}; // premature cycle
    }
    if (cur != order[0]) return {}; // open walk

    std::vector<Vec3> normals;
    normals.reserve(m);
    for (int idx : order) {
        const BoundaryQuad* q = fan[(size_t)idx];
        int c = corner_of(q);
        const Vec3& x = mesh.vertices[(size_t)vertex];
        const Vec3& a = mesh.vertices[(size_t)q->v[(size_t)((c + 1) % 4)]];
        const Vec3& b = mesh.vertices[(size_t)q->v[(size_t)((c + 3) % 4)]];
        normals.push_back(normalized(cross(a - x, b - x)));
    }
    return normals;
}

bool fan_satisfies_restriction(const std::vector<Vec3>& normals) {
    size_t m = normals.size();
    if (m < 3) return false;
    for (size_t i = 0; i + 2 < m; ++i)
        for (size_t j = i + 1; j + 1 < m; ++j)
            for (size_t k = j + 1; k < m; ++k)
                if (det3(normals[i], normals[j], normals[k]) <= 0.0) return false;
    return true;
}

namespace {

std::vector<BoundaryQuad> live_boundary(const HexMesh& m, const std::vector<char>& alive) {
    std::map<std::array<int, 4>, std::vector<FaceUse>> census;
    for (int h = 0; h < m.hex_count(); ++h) {
        if (!alive[(size_t)h]) continue;
        for (int f = 0; f < 6; ++f) census[face_key(m.hexes[(size_t)h], f)].push_back({h, f});
    }
    std::vector<BoundaryQuad> out;
    for (auto& [key, uses] : census) {
        if (uses.size() != 1) continue;
        BoundaryQuad q;
        q.hex = uses[0].hex;
        q.face = uses[0].face;
        for (int k = 0; k < 4; ++k) q.v[(size_t)k] = m.hexes[(size_t)q.hex][(size_t)kHexFaces[q.face][k]];
        out.push_back(q);
    }
    return out;
}

} // namespace

HexMesh clear_buffer(const HexMesh& mesh, const TriangleSurface& surface, ClearanceStats* stats) {
    std::vector<char> alive(mesh.hexes.size(), 1);
    std::vector<double> sd(mesh.vertices.size(), std::numeric_limits<double>::quiet_NaN());
    auto signed_dist = [&](int v) {
        if (std::isnan(sd[(size_t)v])) sd[(size_t)v] = surface.signed_distance(mesh.vertices[(size_t)v]);
        return sd[(size_t)v];
    };
    auto hex_size = [&](int h) {
        double mx = 0;
        for (auto& e : kHexEdges)
            mx = std::max(mx, norm(mesh.vertices[(size_t)mesh.hexes[(size_t)h][(size_t)e[0]]] -
                                   mesh.vertices[(size_t)mesh.hexes[(size_t)h][(size_t)e[1]]]));
        return mx;
    };

    auto adjacency = vertex_hex_adjacency(mesh);
    int64_t cap = 10 * (int64_t)mesh.hexes.size();
    int iterations = 0, removed_total = 0;

    for (int64_t iter = 0;; ++iter) {
        if (iter >= cap)
            throw MeshError("clear_buffer: iteration cap reached without a manifold boundary");
        auto quads = live_boundary(mesh, alive);

        // boundary-face count per hex for the deletion priority
        std::map<int, int> bfaces;
        std::set<int> bverts;
        for (auto& q : quads) {
            bfaces[q.hex]++;
            for (int v : q.v) bverts.insert(v);
        }

        std::vector<int> violating;
        for (int v : bverts) {
            auto normals = boundary_fan_normals(mesh, quads, v);
            if (!fan_satisfies_restriction(normals)) violating.push_back(v);
        }
        if (violating.empty()) break;
        ++iterations;

        bool removed_any = false;
        for (int v : violating) {
            // deepest-interior elements are never eligible
            double eps = 0.0;
            for (int h : adjacency[(size_t)v])
                if (alive[(size_t)h]) eps = std::max(eps, 0.5 * hex_size(h));
            int best = -1, best_faces = -1;
            for (int h : adjacency[(size_t)v]) {
                if (!alive[(size_t)h]) continue;
                bool buried = true;
                for (int k = 0; k < 8 && buried; ++k)
                    if (signed_dist(mesh.hexes[(size_t)h][(size_t)k]) <= eps) buried = false;
                if (buried) continue;
                auto it = bfaces.find(h);
                int nf = it == bfaces.end() ? 0 : it->second;
                if (nf > best_faces) {
                    best_faces = nf;
                    best = h;
                }
            }
            if (best >= 0) {
                alive[(size_t)best] = 0;
                removed_any = true;
                ++removed_total;
            }
        }
        if (!removed_any)
            throw MeshError("clear_buffer: violating vertices remain but no removable hex");

        int live = 0;
        for (char a : alive) live += a;
        if (live == 0)
            throw MeshError("clear_buffer: clearance emptied the mesh; topology unresolvable at "
                            "this resolution");
    }

    HexMesh out;
    out.vertices = mesh.vertices;
    for (int h = 0; h < mesh.hex_count(); ++h)
        if (alive[(size_t)h]) {
            out.hexes.push_back(mesh.hexes[(size_t)h]);
            out.tags.push_back(mesh.tags.empty() ? HexTag::GridDual : mesh.tags[(size_t)h]);
        }
    compact_vertices(out);
    if (stats) {
        stats->iterations = iterations;
        stats->removed = removed_total;
    }
    return out;
}

} // namespace hexoct

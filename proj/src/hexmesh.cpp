#include "hexoct/hexmesh.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace hexoct {

// faces wound outward for the 0-3 bottom / 4-7 top corner convention
const int kHexFaces[6][4] = {
    {0, 3, 2, 1}, // bottom (-z)
    {4, 5, 6, 7}, // top (+z)
    {0, 1, 5, 4}, // front (-y)
    {2, 3, 7, 6}, // back (+y)
    {0, 4, 7, 3}, // left (-x)
    {1, 2, 6, 5}, // right (+x)
};

const int kHexCornerNeighbors[8][3] = {
    {1, 3, 4}, {2, 0, 5}, {3, 1, 6}, {0, 2, 7},
    {7, 5, 0}, {4, 6, 1}, {5, 7, 2}, {6, 4, 3},
};

const int kHexEdges[12][2] = {
    {0, 1}, {1, 2}, {2, 3}, {3, 0},
    {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
};

std::array<int, 4> face_key(const std::array<int, 8>& hex, int f) {
    std::array<int, 4> k{hex[kHexFaces[f][0]], hex[kHexFaces[f][1]], hex[kHexFaces[f][2]],
                         hex[kHexFaces[f][3]]};
    std::sort(k.begin(), k.end());
    return k;
}

std::map<std::array<int, 4>, std::vector<FaceUse>> face_census(const HexMesh& m) {
    std::map<std::array<int, 4>, std::vector<FaceUse>> census;
    for (int h = 0; h < m.hex_count(); ++h)
        for (int f = 0; f < 6; ++f) census[face_key(m.hexes[h], f)].push_back({h, f});
    return census;
}

bool is_conforming(const HexMesh& m, std::string* why) {
    for (int h = 0; h < m.hex_count(); ++h) {
        std::set<int> uniq(m.hexes[h].begin(), m.hexes[h].end());
        if (uniq.size() != 8) {
            if (why) *why = "hex " + std::to_string(h) + " has repeated vertices";
            return false;
        }
    }
    auto census = face_census(m);
    for (auto& [key, uses] : census) {
        if (uses.size() > 2) {
            if (why)
                *why = "face shared by " + std::to_string(uses.size()) + " hexes";
            return false;
        }
    }
    return true;
}

std::vector<BoundaryQuad> boundary_quads(const HexMesh& m) {
    auto census = face_census(m);
    std::vector<BoundaryQuad> out;
    for (auto& [key, uses] : census) {
        if (uses.size() != 1) continue;
        BoundaryQuad q;
        q.hex = uses[0].hex;
        q.face = uses[0].face;
        for (int k = 0; k < 4; ++k) q.v[k] = m.hexes[q.hex][kHexFaces[q.face][k]];
        out.push_back(q);
    }
    return out;
}

int64_t boundary_euler_characteristic(const HexMesh& m) {
    auto quads = boundary_quads(m);
    std::set<int> verts;
    std::set<std::pair<int, int>> edges;
    for (auto& q : quads) {
        for (int k = 0; k < 4; ++k) {
            verts.insert(q.v[k]);
            int a = q.v[k], b = q.v[(k + 1) % 4];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    }
    return (int64_t)verts.size() - (int64_t)edges.size() + (int64_t)quads.size();
}

std::vector<std::vector<int>> vertex_hex_adjacency(const HexMesh& m) {
    std::vector<std::vector<int>> adj(m.vertices.size());
    for (int h = 0; h < m.hex_count(); ++h)
        for (int v : m.hexes[h]) adj[(size_t)v].push_back(h);
    return adj;
}

std::vector<int> compact_vertices(HexMesh& m) {
    std::vector<int> remap(m.vertices.size(), -1);
    std::vector<Vec3> verts;
    for (auto& hex : m.hexes)
        for (int& v : hex) {
            if (remap[(size_t)v] < 0) {
                remap[(size_t)v] = (int)verts.size();
                verts.push_back(m.vertices[(size_t)v]);
            }
            v = remap[(size_t)v];
        }
    m.vertices = std::move(verts);
    return remap;
}

// ---------------------------------------------------------------------------

HexQuality hex_quality(const std::array<Vec3, 8>& x) {
    HexQuality q;
    for (int c = 0; c < 8; ++c) {
        Vec3 e0 = x[(size_t)kHexCornerNeighbors[c][0]] - x[(size_t)c];
        Vec3 e1 = x[(size_t)kHexCornerNeighbors[c][1]] - x[(size_t)c];
        Vec3 e2 = x[(size_t)kHexCornerNeighbors[c][2]] - x[(size_t)c];
        double d = det3(e0, e1, e2);
        q.jacobian[(size_t)c] = d;
        double n0 = norm(e0), n1 = norm(e1), n2 = norm(e2);
        if (n0 < 1e-300 || n1 < 1e-300 || n2 < 1e-300)
            q.scaled_jacobian[(size_t)c] = -1.0; // degenerate corner sentinel
        else
            q.scaled_jacobian[(size_t)c] = std::clamp(d / (n0 * n1 * n2), -1.0, 1.0);
    }
    // body center from the three pairs of opposite face centers
    auto fc = [&](int f) {
        return (x[(size_t)kHexFaces[f][0]] + x[(size_t)kHexFaces[f][1]] +
                x[(size_t)kHexFaces[f][2]] + x[(size_t)kHexFaces[f][3]]) * 0.25;
    };
    Vec3 ex = fc(5) - fc(4);
    Vec3 ey = fc(3) - fc(2);
    Vec3 ez = fc(1) - fc(0);
    double d = det3(ex, ey, ez);
    q.jacobian[8] = d;
    double n0 = norm(ex), n1 = norm(ey), n2 = norm(ez);
    if (n0 < 1e-300 || n1 < 1e-300 || n2 < 1e-300) q.scaled_jacobian[8] = -1.0;
    else q.scaled_jacobian[8] = std::clamp(d / (n0 * n1 * n2), -1.0, 1.0);

    q.min_j = *std::min_element(q.jacobian.begin(), q.jacobian.end());
    q.min_sj = *std::min_element(q.scaled_jacobian.begin(), q.scaled_jacobian.end());
    return q;
}

HexQuality hex_quality(const HexMesh& m, int h) {
    std::array<Vec3, 8> x;
    for (int k = 0; k < 8; ++k) x[(size_t)k] = m.vertices[(size_t)m.hexes[(size_t)h][(size_t)k]];
    return hex_quality(x);
}

double mesh_min_scaled_jacobian(const HexMesh& m) {
    double mn = 1.0;
    for (int h = 0; h < m.hex_count(); ++h) mn = std::min(mn, hex_quality(m, h).min_sj);
    return mn;
}

} // namespace hexoct

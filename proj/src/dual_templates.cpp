#include "hexoct/dual_templates.hpp"

namespace hexoct {

// slot names: b00=0 b10=1 b11=2 b01=3; t(i,j)=4+i+4j;
// s0=20 s1=21 e0=22 e1=23 n0=24 n1=25 w0=26 w1=27; q00=28 q10=29 q11=30 q01=31
const std::array<std::array<int, 8>, 13> kFaceTemplateHexes = {{
    {0, 20, 28, 26, 4, 5, 9, 8},     // corner SW
    {1, 22, 29, 21, 7, 11, 10, 6},   // corner SE
    {2, 25, 30, 23, 19, 18, 14, 15}, // corner NE
    {3, 27, 31, 24, 16, 12, 13, 17}, // corner NW
    {20, 21, 29, 28, 5, 6, 10, 9},   // side S
    {22, 23, 30, 29, 11, 15, 14, 10},// side E
    {25, 24, 31, 30, 18, 17, 13, 14},// side N
    {27, 26, 28, 31, 12, 8, 9, 13},  // side W
    {28, 29, 30, 31, 9, 10, 14, 13}, // center top
    {0, 1, 2, 3, 20, 21, 25, 24},    // plug over the coarse quad
    {1, 2, 25, 21, 22, 23, 30, 29},  // east basement
    {3, 0, 20, 24, 27, 26, 28, 31},  // west basement
    {20, 21, 25, 24, 28, 29, 30, 31},// basement top
}};

// edge slots: quadrant q occupies 4q..4q+3 (fine: centers a0..a3;
// coarse: center z=1, center z=3, rim slot 0, rim slot 1)
const std::array<std::array<int, 8>, 5> kEdgeTemplateHexesB = {{
    {0, 4, 8, 12, 1, 6, 10, 14},
    {1, 6, 10, 14, 2, 7, 11, 15},
    {2, 7, 11, 15, 3, 5, 9, 13},
    {4, 8, 10, 6, 5, 9, 11, 7},
    {8, 12, 14, 10, 9, 13, 15, 11},
}};

const std::array<std::array<int, 8>, 4> kEdgeTemplateHexesC = {{
    {0, 4, 8, 12, 1, 5, 10, 14},
    {1, 5, 10, 14, 2, 6, 11, 15},
    {2, 6, 11, 15, 3, 7, 9, 13},
    {8, 12, 14, 10, 9, 13, 15, 11},
}};

const std::array<std::array<int, 8>, 3> kEdgeTemplateHexesD = {{
    {0, 4, 8, 12, 1, 5, 9, 14},
    {1, 5, 9, 14, 2, 6, 10, 15},
    {2, 6, 10, 15, 3, 7, 11, 13},
}};

const std::array<std::array<int, 8>, 3> kEdgeTemplateHexesE = {{
    {0, 4, 8, 12, 1, 6, 9, 14},
    {1, 6, 9, 14, 2, 7, 10, 15},
    {2, 7, 10, 15, 3, 5, 11, 13},
}};

CanonicalPatch face_template_canonical() {
    const double d = rim_depth();
    const double xs = kRimS;
    CanonicalPatch p;
    p.verts.resize(kFaceTemplateVerts);
    // coarse centers
    p.verts[0] = {1, 1, -1};
    p.verts[1] = {3, 1, -1};
    p.verts[2] = {3, 3, -1};
    p.verts[3] = {1, 3, -1};
    // fine centers
    for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) p.verts[(size_t)(4 + i + 4 * j)] = {0.5 + i, 0.5 + j, 0.5};
    // rims
    p.verts[20] = {xs, d, -d};
    p.verts[21] = {4 - xs, d, -d};
    p.verts[22] = {4 - d, xs, -d};
    p.verts[23] = {4 - d, 4 - xs, -d};
    p.verts[24] = {xs, 4 - d, -d};
    p.verts[25] = {4 - xs, 4 - d, -d};
    p.verts[26] = {d, xs, -d};
    p.verts[27] = {d, 4 - xs, -d};
    // face center vertices
    p.verts[28] = {2 - kQSpread, 2 - kQSpread, -kQDepth};
    p.verts[29] = {2 + kQSpread, 2 - kQSpread, -kQDepth};
    p.verts[30] = {2 + kQSpread, 2 + kQSpread, -kQDepth};
    p.verts[31] = {2 - kQSpread, 2 + kQSpread, -kQDepth};
    p.hexes.assign(kFaceTemplateHexes.begin(), kFaceTemplateHexes.end());
    return p;
}

CanonicalPatch edge_template_canonical(EdgeKind kind) {
    const double d = rim_depth();
    const double xs = kRimS;
    uint8_t fine = edge_kind_fine_mask(kind);
    CanonicalPatch p;
    p.verts.resize(16);
    for (int q = 0; q < 4; ++q) {
        double sx = kQuadrantSign[q][0], sy = kQuadrantSign[q][1];
        if (fine & (1 << q)) {
            for (int k = 0; k < 4; ++k) p.verts[(size_t)(4 * q + k)] = {0.5 * sx, 0.5 * sy, k + 0.5};
        } else {
            p.verts[(size_t)(4 * q + 0)] = {sx, sy, 1};
            p.verts[(size_t)(4 * q + 1)] = {sx, sy, 3};
            p.verts[(size_t)(4 * q + 2)] = {sx * d, sy * d, xs};
            p.verts[(size_t)(4 * q + 3)] = {sx * d, sy * d, 4 - xs};
        }
    }
    int count = 0;
    auto* hx = edge_kind_hexes(kind, &count);
    for (int h = 0; h < count; ++h) {
        std::array<int, 8> a;
        for (int k = 0; k < 8; ++k) a[(size_t)k] = hx[h][k];
        p.hexes.push_back(a);
    }
    return p;
}

} // namespace hexoct

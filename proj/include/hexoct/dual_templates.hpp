#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "hexoct/vec3.hpp"

namespace hexoct {

// Transition templates for all-hex dual extraction.
//
// Geometry conventions, in fine-cell units of the refined side:
//  - A transition face spans a 4x4 grid of fine cell faces between a coarse
//    block (2x2x2 cells of the parent level) and a fully refined neighbor
//    block (4x4x4 cells). Its dual patch covers the 9 interior grid points
//    of the face and is re-meshed with 13 hexes.
//  - A transition edge spans 4 fine cells along a block edge shared by four
//    same-size footprints of mixed refinement. Its dual patch covers the 3
//    interior grid points of the edge and is re-meshed with 5/4/3/3 hexes
//    depending on which of the four footprints are refined (one, two
//    side-by-side, three, or two diagonally).
//
// New vertices come in two flavors and are shared between adjacent patches:
//  - "rim" vertices: two per (transition edge, coarse quadrant), placed on the
//    45-degree diagonal into the coarse quadrant at depth kRimDepth and at
//    parameters kRimS / 4-kRimS along the edge. Face patches use the rims of
//    their own bounding edges, which is what makes the three-refined and
//    diagonal edge cases close with only 3 hexes.
//  - "center" vertices: four per transition face, on the coarse side of the
//    face plane around its center.
//
// kRimDepth is derived in closed form so that the worst corner over all
// template hexes (the plug corners of the face template) has scaled Jacobian
// exactly kTemplateMinSJ on an undeformed axis-aligned instantiation.

inline constexpr double kTemplateMinSJ = 0.258;
inline constexpr double kRimS = 1.5;     // rim parameter along the edge
inline constexpr double kQSpread = 0.8;  // face center vertex half-spacing
inline constexpr double kQDepth = 0.2;   // face center vertex depth into the coarse side

inline double rim_depth() {
    // solve u / sqrt((kRimS-1)^2 + 2u^2) = kTemplateMinSJ for u = 1 - depth
    static const double u = (kRimS - 1.0) * kTemplateMinSJ /
                            std::sqrt(1.0 - 2.0 * kTemplateMinSJ * kTemplateMinSJ);
    return 1.0 - u;
}

// Face template vertex slots:
//   0-3   coarse cell centers b00,b10,b11,b01 ((i,j) = (0,0),(1,0),(1,1),(0,1))
//   4-19  fine cell centers t(i,j) = 4 + i + 4j
//   20-27 rims: s0,s1 (south edge), e0,e1 (east), n0,n1 (north), w0,w1 (west)
//   28-31 face center vertices q00,q10,q11,q01
inline constexpr int kFaceTemplateVerts = 32;
extern const std::array<std::array<int, 8>, 13> kFaceTemplateHexes;

// Edge template vertex slots: quadrant q in 0..3 (A,B,C,D = (+,+),(-,+),(-,-),(+,-))
// occupies slots 4q..4q+3. Fine quadrant: the 4 cell centers bottom to top.
// Coarse quadrant: slots 0,1 = the 2 cell centers, slots 2,3 = the 2 rims.
enum class EdgeKind { B, C, D, E }; // one / two adjacent / three / two diagonal refined
extern const std::array<std::array<int, 8>, 5> kEdgeTemplateHexesB;
extern const std::array<std::array<int, 8>, 4> kEdgeTemplateHexesC;
extern const std::array<std::array<int, 8>, 3> kEdgeTemplateHexesD;
extern const std::array<std::array<int, 8>, 3> kEdgeTemplateHexesE;

inline uint8_t edge_kind_fine_mask(EdgeKind k) {
    switch (k) {
        case EdgeKind::B: return 0b0001;
        case EdgeKind::C: return 0b0011;
        case EdgeKind::D: return 0b0111;
        case EdgeKind::E: return 0b0101;
    }
    return 0;
}

inline const int (*edge_kind_hexes(EdgeKind k, int* count))[8] {
    switch (k) {
        case EdgeKind::B: *count = 5; return (const int(*)[8])kEdgeTemplateHexesB.data();
        case EdgeKind::C: *count = 4; return (const int(*)[8])kEdgeTemplateHexesC.data();
        case EdgeKind::D: *count = 3; return (const int(*)[8])kEdgeTemplateHexesD.data();
        case EdgeKind::E: *count = 3; return (const int(*)[8])kEdgeTemplateHexesE.data();
    }
    *count = 0;
    return nullptr;
}

inline const std::array<double, 2> kQuadrantSign[4] = {
    {+1.0, +1.0}, {-1.0, +1.0}, {-1.0, -1.0}, {+1.0, -1.0}};

/// Canonical axis-aligned instantiation of a template, for calibration and
/// direct tests. Vertices in fine-cell units.
struct CanonicalPatch {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 8>> hexes;
};

CanonicalPatch face_template_canonical();
CanonicalPatch edge_template_canonical(EdgeKind kind);

} // namespace hexoct

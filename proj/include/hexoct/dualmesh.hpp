#pragma once

#include <cstdint>
#include <vector>

#include "hexoct/dual_templates.hpp"
#include "hexoct/hexmesh.hpp"
#include "hexoct/octree.hpp"

namespace hexoct {

enum class TransitionType : uint8_t { Face, Edge };

struct TransitionRecord {
    TransitionType type = TransitionType::Face;
    EdgeKind edge_kind = EdgeKind::B; // valid for edges
    int axis = 0;           // face normal axis / edge direction axis
    int64_t anchor[3] = {}; // min corner of the face rect / edge segment (finest lattice)
    int64_t span = 0;       // side length of the face / edge length (finest units)
    int coarse_sign = -1;   // faces: -1 if the coarse block is on the lower side
    uint8_t fine_mask = 0;  // edges: refined quadrants in world cross-axis order
    int rotation = 0;       // edges: canonical->world quadrant rotation steps
};

/// Every transition face and edge of a strongly balanced octree, classified.
/// Throws std::invalid_argument naming the offending nodes when the tree is
/// not strongly balanced.
std::vector<TransitionRecord> detect_transitions(const Octree& tree);

/// All-hex dual mesh: one vertex per leaf center, plain dual hexes at grid
/// points shared by eight leaves, and template patches at every transition.
HexMesh extract_dual(const Octree& tree, const std::vector<TransitionRecord>& transitions);

} // namespace hexoct

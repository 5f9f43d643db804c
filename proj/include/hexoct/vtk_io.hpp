#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hexoct/hexmesh.hpp"
#include "hexoct/octree.hpp"
#include "hexoct/quadtree.hpp"

namespace hexoct {

/// Legacy ASCII unstructured grid of hexahedra (cell type 12), optionally with
/// per-cell scalars and provenance tags as cell data.
void write_hexmesh_vtk(const std::string& path, const HexMesh& mesh,
                       const std::vector<double>* cell_scalar = nullptr,
                       bool write_tags = false);

/// Octree leaves as voxel cells (cell type 11) with the level as cell data.
void write_octree_vtk(const std::string& path, const Octree& tree);

/// Quad mesh as an SVG drawing for visual inspection.
void write_quadmesh_svg(const std::string& path, const QuadMesh& mesh);

} // namespace hexoct

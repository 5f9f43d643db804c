#include "hexoct/vtk_io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hexoct {

namespace {
std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    return out;
}
} // namespace

void write_hexmesh_vtk(const std::string& path, const HexMesh& mesh,
                       const std::vector<double>* cell_scalar, bool write_tags) {
    auto out = open_out(path);
    out << "# vtk DataFile Version 3.0\nhexoct mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertices.size() << " double\n";
    for (auto& p : mesh.vertices) out << p.x << " " << p.y << " " << p.z << "\n";
    out << "CELLS " << mesh.hexes.size() << " " << mesh.hexes.size() * 9 << "\n";
    for (auto& h : mesh.hexes) {
        out << 8;
        for (int v : h) out << " " << v;
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.hexes.size() << "\n";
    for (size_t i = 0; i < mesh.hexes.size(); ++i) out << 12 << "\n";

    bool tags = write_tags && mesh.tags.size() == mesh.hexes.size();
    if (cell_scalar || tags) {
        out << "CELL_DATA " << mesh.hexes.size() << "\n";
        if (cell_scalar) {
            out << "SCALARS min_scaled_jacobian double 1\nLOOKUP_TABLE default\n";
            for (double v : *cell_scalar) out << v << "\n";
        }
        if (tags) {
            out << "SCALARS provenance int 1\nLOOKUP_TABLE default\n";
            for (auto t : mesh.tags) out << (int)t << "\n";
        }
    }
}

void write_octree_vtk(const std::string& path, const Octree& tree) {
    auto out = open_out(path);
    std::vector<int> leaves = tree.leaves();
    out << "# vtk DataFile Version 3.0\nhexoct octree\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << leaves.size() * 8 << " double\n";
    for (int n : leaves) {
        AABB b = tree.node_bounds(n);
        // voxel point order: x fastest, then y, then z
        for (int dz = 0; dz <= 1; ++dz)
            for (int dy = 0; dy <= 1; ++dy)
                for (int dx = 0; dx <= 1; ++dx)
                    out << (dx ? b.hi.x : b.lo.x) << " " << (dy ? b.hi.y : b.lo.y) << " "
                        << (dz ? b.hi.z : b.lo.z) << "\n";
    }
    out << "CELLS " << leaves.size() << " " << leaves.size() * 9 << "\n";
    for (size_t i = 0; i < leaves.size(); ++i) {
        out << 8;
        for (int k = 0; k < 8; ++k) out << " " << i * 8 + (size_t)k;
        out << "\n";
    }
    out << "CELL_TYPES " << leaves.size() << "\n";
    for (size_t i = 0; i < leaves.size(); ++i) out << 11 << "\n";
    out << "CELL_DATA " << leaves.size() << "\nSCALARS level int 1\nLOOKUP_TABLE default\n";
    for (int n : leaves) out << (int)tree.nodes()[(size_t)n].level << "\n";
}

void write_quadmesh_svg(const std::string& path, const QuadMesh& mesh) {
    auto out = open_out(path);
    const double S = 800.0, margin = 10.0;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << S + 2 * margin << "\" height=\""
        << S + 2 * margin << "\">\n";
    auto px = [&](const Vec2& p) { return margin + p.x * S; };
    auto py = [&](const Vec2& p) { return margin + (1.0 - p.y) * S; };
    for (auto& q : mesh.quads) {
        out << "<polygon points=\"";
        for (int k = 0; k < 4; ++k) {
            const Vec2& p = mesh.vertices[(size_t)q[(size_t)k]];
            out << px(p) << "," << py(p) << (k < 3 ? " " : "");
        }
        out << "\" fill=\"#cfe8ff\" stroke=\"#1f3552\" stroke-width=\"0.6\"/>\n";
    }
    out << "</svg>\n";
}

} // namespace hexoct

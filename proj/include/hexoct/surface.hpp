#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "hexoct/vec3.hpp"

namespace hexoct {

class MeshError : public std::runtime_error {
public:
    explicit MeshError(const std::string& what) : std::runtime_error(what) {}
};

/// Affine map between the input model frame and the normalized octree domain
/// (unit cube with the model bounding box centered and covering 90% of the edge).
struct NormalizeTransform {
    double scale = 1.0;       // original -> domain
    Vec3 model_center{0.5, 0.5, 0.5};
    Vec3 domain_center{0.5, 0.5, 0.5};

    Vec3 to_domain(const Vec3& p) const { return (p - model_center) * scale + domain_center; }
    Vec3 to_original(const Vec3& p) const { return (p - domain_center) / scale + model_center; }
};

struct ClosestPointResult {
    Vec3 point;
    int triangle = -1;
    double distance = 0.0;
};

/// Immutable closed manifold triangle surface with per-vertex feature scalars
/// and a uniform-grid spatial index. All queries are const and thread-safe.
class TriangleSurface {
public:
    /// Load an OBJ, OFF or STL file (by extension), validate closed-manifold
    /// invariants and normalize into the unit-cube domain.
    static TriangleSurface load(const std::string& path);

    /// Build from raw arrays. Validation always runs; normalization is optional
    /// so tests can work in the original coordinate frame.
    static TriangleSurface build(std::vector<Vec3> vertices,
                                 std::vector<std::array<int, 3>> triangles,
                                 bool normalize = true);

    const std::vector<Vec3>& vertices() const { return verts_; }
    const std::vector<std::array<int, 3>>& triangles() const { return tris_; }
    const std::vector<Vec3>& vertex_normals() const { return normals_; }
    const NormalizeTransform& transform() const { return xform_; }
    const AABB& bounds() const { return bounds_; }
    double mean_edge_length() const { return mean_edge_; }

    /// Cotangent-weighted curvature magnitude at a vertex: the norm of the
    /// cotangent umbrella vector divided by 4x the mixed Voronoi area.
    double vertex_curvature(int v) const;

    /// Distance from vertex v along the inward normal to the first hit on a
    /// non-incident triangle; +infinity sentinel when the ray escapes.
    double vertex_thickness(int v) const;

    /// Number of thickness rays that found no intersection (sentinel results).
    int thickness_miss_count() const { return thickness_misses_; }

    /// True iff any surface triangle overlaps the closed box (separating axis test).
    bool intersects_box(const AABB& box) const;

    /// Exact triangle/axis-aligned-box overlap predicate.
    static bool tri_box_overlap(const Vec3& a, const Vec3& b, const Vec3& c, const AABB& box);

    /// Globally nearest surface point; with a hint triangle the search is
    /// restricted to a box of half-extent 5x the hint triangle's mean edge
    /// length around q, falling back to the global search when empty.
    ClosestPointResult closest_point(const Vec3& q, int hint_triangle = -1) const;

    /// Signed distance, positive inside the solid.
    double signed_distance(const Vec3& q) const;

    /// Indices of triangles whose AABB overlaps the box (from the grid index).
    std::vector<int> triangles_in_box(const AABB& box) const;

    /// Indices of vertices inside the box.
    std::vector<int> vertices_in_box(const AABB& box) const;

    Vec3 triangle_centroid(int t) const;
    double triangle_mean_edge(int t) const;

private:
    TriangleSurface() = default;

    void validate() const;
    void normalize();
    void build_index();
    void compute_normals();
    void compute_features();

    // ray cast along dir from origin; returns nearest positive hit distance and
    // triangle, or miss. skip_vertex >= 0 excludes triangles incident to it.
    struct RayHit { double t = 0.0; int tri = -1; bool degenerate = false; };
    RayHit raycast(const Vec3& origin, const Vec3& dir, int skip_vertex) const;
    int ray_crossings(const Vec3& q) const;

    std::vector<Vec3> verts_;
    std::vector<std::array<int, 3>> tris_;
    std::vector<Vec3> normals_;
    std::vector<double> curvature_;
    std::vector<double> thickness_;
    int thickness_misses_ = 0;
    NormalizeTransform xform_;
    AABB bounds_;
    double mean_edge_ = 0.0;

    // uniform grid over bounds_, cell size ~2x mean triangle edge
    struct Grid {
        Vec3 origin;
        double cell = 1.0;
        int nx = 0, ny = 0, nz = 0;
        std::vector<std::vector<int>> tri_cells;   // triangle ids per cell
        std::vector<std::vector<int>> vert_cells;  // vertex ids per cell
        int index(int ix, int iy, int iz) const { return (iz * ny + iy) * nx + ix; }
    } grid_;
};

} // namespace hexoct

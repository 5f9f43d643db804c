#pragma once

#include <cstdint>
#include <vector>

#include "hexoct/hexmesh.hpp"
#include "hexoct/surface.hpp"

namespace hexoct {

/// Link from a bound (surface-layer) mesh vertex to its closest surface point.
struct BufferBinding {
    int vertex = -1;        // mesh vertex index of the surface-layer point
    int core_vertex = -1;   // the core boundary vertex it was grown from
    Vec3 surface_point;
    int triangle = -1;      // closest-triangle cache
};

struct BufferResult {
    HexMesh mesh;                        // core + one layer of buffer hexes
    std::vector<BufferBinding> bindings; // one per surface-layer vertex
    std::vector<int> layer1;             // surface-layer vertex ids
    std::vector<int> layer2;             // core boundary vertex ids
    int duplicate_surface_points = 0;    // distinct vertices that share a closest point
};

/// Grow one hex per core boundary quad toward the surface: the quad is the
/// bottom face, the four closest surface points of its corners the top face.
BufferResult build_buffer_layer(const HexMesh& core, const TriangleSurface& surface);

struct OptimizerConfig {
    double alpha = 0.8e-3;          // gradient step
    double eps_sj = 0.01;           // initial scaled Jacobian threshold
    double eps_sj_increment = 0.01;
    int maintenance_period = 1000;  // iterations between cache refresh / smoothing
    double snap_tolerance = 1e-6;
    int64_t max_iterations = 2'000'000;
    int plateau_window = 10;        // maintenance periods without progress
    bool verbose = true;
};

struct EnergyBreakdown {
    double total = 0.0;
    double geometry_fitting = 0.0;
    double scaled_jacobian = 0.0; // sum over positive-Jacobian hexes below threshold
    double jacobian = 0.0;        // sum over negative-Jacobian hexes
    int positive_below = 0;       // m
    int negative = 0;             // n
};

/// E = E_GF - E_SJ - E_J and its analytic gradient per vertex. Hexes at or
/// above the threshold contribute no quality force; negative-Jacobian hexes
/// contribute through the plain Jacobian, which stays differentiable.
EnergyBreakdown energy_and_gradient(const HexMesh& mesh,
                                    const std::vector<BufferBinding>& bindings, double eps_sj,
                                    std::vector<Vec3>* gradient);

/// One smart Laplacian pass over the outermost two vertex layers: a candidate
/// position is applied only when the minimum scaled Jacobian of the affected
/// hexes stays above eps_sj, except for the single surface-layer vertex
/// farthest from the surface, which always moves.
void smart_laplacian(HexMesh& mesh, const TriangleSurface& surface,
                     std::vector<BufferBinding>& bindings, const std::vector<int>& layer2,
                     double eps_sj);

enum class OptimizeStatus { Converged, Plateau, MaxIterations, Diverged };

struct OptimizeResult {
    OptimizeStatus status = OptimizeStatus::Converged;
    int64_t iterations = 0;
    double final_min_sj = -1.0;
    double final_eps_sj = 0.0;
    double max_surface_distance = 0.0;
    bool snapped = false;
};

/// Gradient-descent quality improvement with periodic maintenance: closest
/// point cache refresh, smart Laplacian smoothing, threshold escalation, and
/// the final snap of bound vertices onto the surface.
OptimizeResult optimize(HexMesh& mesh, std::vector<BufferBinding>& bindings,
                        const TriangleSurface& surface, const std::vector<int>& layer2,
                        const OptimizerConfig& cfg);

} // namespace hexoct

#include "hexoct/optimizer.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <tuple>

namespace hexoct {

BufferResult build_buffer_layer(const HexMesh& core, const TriangleSurface& surface) {
    BufferResult r;
    r.mesh = core;
    auto quads = boundary_quads(core);

    std::set<int> bverts;
    for (auto& q : quads)
        for (int v : q.v) bverts.insert(v);

    std::map<int, int> top_of; // core boundary vertex -> surface-layer vertex
    std::map<std::tuple<double, double, double>, int> point_count;
    for (int v : bverts) {
        ClosestPointResult cp = surface.closest_point(r.mesh.vertices[(size_t)v]);
        r.mesh.vertices.push_back(cp.point);
        int id = (int)r.mesh.vertices.size() - 1;
        top_of[v] = id;
        r.layer1.push_back(id);
        r.layer2.push_back(v);
        BufferBinding b;
        b.vertex = id;
        b.core_vertex = v;
        b.surface_point = cp.point;
        b.triangle = cp.triangle;
        r.bindings.push_back(b);
        point_count[{cp.point.x, cp.point.y, cp.point.z}]++;
    }
    for (auto& [p, n] : point_count)
        if (n > 1) r.duplicate_surface_points += n;

    for (auto& q : quads) {
        std::array<int, 8> hex{q.v[0], q.v[1], q.v[2], q.v[3],
                               top_of[q.v[0]], top_of[q.v[1]], top_of[q.v[2]], top_of[q.v[3]]};
        r.mesh.hexes.push_back(hex);
        r.mesh.tags.push_back(HexTag::Buffer);
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

struct HexState {
    double min_j = 0.0;
    double min_sj = 0.0;
    int arg_j = 0;  // achieving sample, 0-7 corners, 8 body center
    int arg_sj = 0;
};

HexState eval_hex(const HexMesh& m, int h) {
    HexQuality q = hex_quality(m, h);
    HexState s;
    s.min_j = q.jacobian[0];
    s.min_sj = q.scaled_jacobian[0];
    s.arg_j = s.arg_sj = 0;
    for (int i = 1; i < 9; ++i) {
        if (q.jacobian[(size_t)i] < s.min_j) {
            s.min_j = q.jacobian[(size_t)i];
            s.arg_j = i;
        }
        if (q.scaled_jacobian[(size_t)i] < s.min_sj) {
            s.min_sj = q.scaled_jacobian[(size_t)i];
            s.arg_sj = i;
        }
    }
    return s;
}

// d(det)/d(e_i) for the corner frame
void corner_edges(const HexMesh& m, const std::array<int, 8>& hex, int c, Vec3 e[3], int vids[4]) {
    vids[0] = hex[(size_t)c];
    for (int i = 0; i < 3; ++i) {
        vids[i + 1] = hex[(size_t)kHexCornerNeighbors[c][i]];
        e[i] = m.vertices[(size_t)vids[i + 1]] - m.vertices[(size_t)vids[0]];
    }
}

// accumulate d(sample)/d(x) into grad with the given sign; sample is the
// corner (0-7) or body-center (8) Jacobian or scaled Jacobian of hex h
void accumulate_sample_gradient(const HexMesh& m, int h, int sample, bool scaled, double sign,
                                std::vector<Vec3>& grad) {
    const auto& hex = m.hexes[(size_t)h];
    if (sample < 8) {
        Vec3 e[3];
        int vids[4];
        corner_edges(m, hex, sample, e, vids);
        Vec3 dd[3] = {cross(e[1], e[2]), cross(e[2], e[0]), cross(e[0], e[1])};
        if (!scaled) {
            Vec3 total{0, 0, 0};
            for (int i = 0; i < 3; ++i) {
                grad[(size_t)vids[i + 1]] += dd[i] * sign;
                total += dd[i];
            }
            grad[(size_t)vids[0]] -= total * sign;
        } else {
            double n0 = norm(e[0]), n1 = norm(e[1]), n2 = norm(e[2]);
            double denom = n0 * n1 * n2;
            if (denom < 1e-300) return; // degenerate sentinel, no direction
            double d = det3(e[0], e[1], e[2]);
            double ns[3] = {n0, n1, n2};
            Vec3 total{0, 0, 0};
            for (int i = 0; i < 3; ++i) {
                Vec3 g = dd[i] / denom - e[i] * (d / (denom * ns[i] * ns[i]));
                grad[(size_t)vids[i + 1]] += g * sign;
                total += g;
            }
            grad[(size_t)vids[0]] -= total * sign;
        }
    } else {
        // body center: e_axis = difference of opposite face centroids
        auto fc = [&](int f) {
            return (m.vertices[(size_t)hex[(size_t)kHexFaces[f][0]]] +
                    m.vertices[(size_t)hex[(size_t)kHexFaces[f][1]]] +
                    m.vertices[(size_t)hex[(size_t)kHexFaces[f][2]]] +
                    m.vertices[(size_t)hex[(size_t)kHexFaces[f][3]]]) * 0.25;
        };
        Vec3 e[3] = {fc(5) - fc(4), fc(3) - fc(2), fc(1) - fc(0)};
        const int plus_face[3] = {5, 3, 1}, minus_face[3] = {4, 2, 0};
        Vec3 dd[3] = {cross(e[1], e[2]), cross(e[2], e[0]), cross(e[0], e[1])};
        Vec3 de[3]; // d(sample)/d(e_i)
        if (!scaled) {
            for (int i = 0; i < 3; ++i) de[i] = dd[i];
        } else {
            double n0 = norm(e[0]), n1 = norm(e[1]), n2 = norm(e[2]);
            double denom = n0 * n1 * n2;
            if (denom < 1e-300) return;
            double d = det3(e[0], e[1], e[2]);
            double ns[3] = {n0, n1, n2};
            for (int i = 0; i < 3; ++i) de[i] = dd[i] / denom - e[i] * (d / (denom * ns[i] * ns[i]));
        }
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k < 4; ++k) {
                grad[(size_t)hex[(size_t)kHexFaces[plus_face[i]][k]]] += de[i] * (0.25 * sign);
                grad[(size_t)hex[(size_t)kHexFaces[minus_face[i]][k]]] -= de[i] * (0.25 * sign);
            }
    }
}

} // namespace

EnergyBreakdown energy_and_gradient(const HexMesh& mesh,
                                    const std::vector<BufferBinding>& bindings, double eps_sj,
                                    std::vector<Vec3>* gradient) {
    EnergyBreakdown e;
    if (gradient) gradient->assign(mesh.vertices.size(), Vec3{});

    for (auto& b : bindings) {
        Vec3 d = mesh.vertices[(size_t)b.vertex] - b.surface_point;
        e.geometry_fitting += norm2(d);
        if (gradient) (*gradient)[(size_t)b.vertex] += d * 2.0;
    }

    for (int h = 0; h < mesh.hex_count(); ++h) {
        HexState s = eval_hex(mesh, h);
        if (s.min_j < 0.0) {
            e.jacobian += s.min_j;
            e.negative++;
            // -E_J in E: the gradient sign of the sample is -1
            if (gradient) accumulate_sample_gradient(mesh, h, s.arg_j, false, -1.0, *gradient);
        } else if (s.min_sj < eps_sj) {
            e.scaled_jacobian += s.min_sj;
            e.positive_below++;
            if (gradient) accumulate_sample_gradient(mesh, h, s.arg_sj, true, -1.0, *gradient);
        }
    }
    e.total = e.geometry_fitting - e.scaled_jacobian - e.jacobian;
    return e;
}

// ---------------------------------------------------------------------------

void smart_laplacian(HexMesh& mesh, const TriangleSurface& surface,
                     std::vector<BufferBinding>& bindings, const std::vector<int>& layer2,
                     double eps_sj) {
    auto adjacency = vertex_hex_adjacency(mesh);

    // vertex neighborhoods over hex edges
    std::vector<std::set<int>> nbrs(mesh.vertices.size());
    for (auto& hex : mesh.hexes)
        for (auto& ed : kHexEdges) {
            int a = hex[(size_t)ed[0]], b = hex[(size_t)ed[1]];
            nbrs[(size_t)a].insert(b);
            nbrs[(size_t)b].insert(a);
        }

    std::vector<char> is_layer1(mesh.vertices.size(), 0);
    std::map<int, int> binding_of;
    for (size_t i = 0; i < bindings.size(); ++i) {
        is_layer1[(size_t)bindings[i].vertex] = 1;
        binding_of[bindings[i].vertex] = (int)i;
    }

    // single farthest-from-surface exemption among the surface layer
    int farthest = -1;
    double fdist = -1.0;
    for (auto& b : bindings) {
        double d = norm(mesh.vertices[(size_t)b.vertex] - b.surface_point);
        if (d > fdist) {
            fdist = d;
            farthest = b.vertex;
        }
    }

    auto min_sj_around = [&](int v, const Vec3& candidate) {
        Vec3 saved = mesh.vertices[(size_t)v];
        mesh.vertices[(size_t)v] = candidate;
        double mn = 1.0;
        for (int h : adjacency[(size_t)v]) mn = std::min(mn, hex_quality(mesh, h).min_sj);
        mesh.vertices[(size_t)v] = saved;
        return mn;
    };

    // surface layer: candidate is the surface projection of the neighbor average
    for (auto& b : bindings) {
        int v = b.vertex;
        Vec3 avg{0, 0, 0};
        int count = 0;
        for (int nb : nbrs[(size_t)v])
            if (is_layer1[(size_t)nb]) {
                avg += mesh.vertices[(size_t)nb];
                ++count;
            }
        if (count == 0) continue;
        avg = avg / (double)count;
        ClosestPointResult cp = surface.closest_point(avg, b.triangle);
        if (min_sj_around(v, cp.point) > eps_sj || v == farthest) {
            mesh.vertices[(size_t)v] = cp.point;
            b.surface_point = cp.point;
            b.triangle = cp.triangle;
        }
    }

    // second layer: plain neighbor average
    for (int v : layer2) {
        Vec3 avg{0, 0, 0};
        int count = 0;
        for (int nb : nbrs[(size_t)v]) {
            avg += mesh.vertices[(size_t)nb];
            ++count;
        }
        if (count == 0) continue;
        avg = avg / (double)count;
        if (min_sj_around(v, avg) > eps_sj) mesh.vertices[(size_t)v] = avg;
    }
}

// ---------------------------------------------------------------------------

OptimizeResult optimize(HexMesh& mesh, std::vector<BufferBinding>& bindings,
                        const TriangleSurface& surface, const std::vector<int>& layer2,
                        const OptimizerConfig& cfg) {
    OptimizeResult res;
    double eps = cfg.eps_sj;

    auto adjacency = vertex_hex_adjacency(mesh);
    int nh = mesh.hex_count();
    std::vector<HexState> state((size_t)nh);
    for (int h = 0; h < nh; ++h) state[(size_t)h] = eval_hex(mesh, h);

    std::vector<Vec3> grad(mesh.vertices.size());
    std::vector<char> moved((size_t)nh, 0); // scratch hex flags for dirty tracking
    std::vector<int> dirty;

    double best_min_sj = -2.0;
    std::vector<Vec3> best_positions;
    int periods_without_progress = 0;
    int energy_rises = 0;
    double prev_energy = std::numeric_limits<double>::infinity();
    int64_t iter = 0;

    auto mesh_min_sj = [&]() {
        double mn = 1.0;
        for (auto& s : state) mn = std::min(mn, s.min_sj);
        return mn;
    };
    auto max_surface_dist = [&]() {
        double mx = 0.0;
        for (auto& b : bindings)
            mx = std::max(mx, norm(mesh.vertices[(size_t)b.vertex] - b.surface_point));
        return mx;
    };

    while (iter < cfg.max_iterations) {
        // one gradient step
        grad.assign(mesh.vertices.size(), Vec3{});
        for (auto& b : bindings)
            grad[(size_t)b.vertex] += (mesh.vertices[(size_t)b.vertex] - b.surface_point) * 2.0;
        for (int h = 0; h < nh; ++h) {
            const HexState& s = state[(size_t)h];
            if (s.min_j < 0.0)
                accumulate_sample_gradient(mesh, h, s.arg_j, false, -1.0, grad);
            else if (s.min_sj < eps)
                accumulate_sample_gradient(mesh, h, s.arg_sj, true, -1.0, grad);
        }

        dirty.clear();
        double grad_norm2 = 0.0;
        for (size_t v = 0; v < mesh.vertices.size(); ++v) {
            if (grad[v].x == 0.0 && grad[v].y == 0.0 && grad[v].z == 0.0) continue;
            mesh.vertices[v] -= grad[v] * cfg.alpha;
            grad_norm2 += norm2(grad[v]);
            for (int h : adjacency[v])
                if (!moved[(size_t)h]) {
                    moved[(size_t)h] = 1;
                    dirty.push_back(h);
                }
        }
        for (int h : dirty) {
            state[(size_t)h] = eval_hex(mesh, h);
            moved[(size_t)h] = 0;
        }
        ++iter;

        if (iter % cfg.maintenance_period != 0) continue;

        // maintenance: refresh closest-point caches
        for (auto& b : bindings) {
            ClosestPointResult cp =
                surface.closest_point(mesh.vertices[(size_t)b.vertex], b.triangle);
            b.surface_point = cp.point;
            b.triangle = cp.triangle;
        }

        smart_laplacian(mesh, surface, bindings, layer2, eps);
        for (int h = 0; h < nh; ++h) state[(size_t)h] = eval_hex(mesh, h);

        // snap once every bound vertex is effectively on the surface
        double max_dist = max_surface_dist();
        if (max_dist < cfg.snap_tolerance) {
            for (auto& b : bindings) {
                ClosestPointResult cp =
                    surface.closest_point(mesh.vertices[(size_t)b.vertex], b.triangle);
                mesh.vertices[(size_t)b.vertex] = cp.point;
                b.surface_point = cp.point;
                b.triangle = cp.triangle;
            }
            res.snapped = true;
            max_dist = 0.0;
            for (int h = 0; h < nh; ++h) state[(size_t)h] = eval_hex(mesh, h);
        }

        double mn_sj = mesh_min_sj();
        EnergyBreakdown e = energy_and_gradient(mesh, bindings, eps, nullptr);

        if (cfg.verbose)
            std::printf("iter=%lld E=%.10g min_sj=%.6f eps_sj=%.3f max_dist=%.3e m=%d n=%d\n",
                        (long long)iter, e.total, mn_sj, eps, max_dist, e.positive_below,
                        e.negative);

        bool bar_met = mn_sj >= eps && max_dist < cfg.snap_tolerance;
        bool improved = mn_sj > best_min_sj + 1e-12;
        if (improved) {
            best_min_sj = mn_sj;
            best_positions = mesh.vertices;
        }

        if (bar_met && grad_norm2 < 1e-24) {
            res.status = OptimizeStatus::Converged;
            break;
        }
        if (e.total > prev_energy + 1e-12) {
            if (++energy_rises >= 3) {
                res.status = OptimizeStatus::Diverged;
                break;
            }
        } else {
            energy_rises = 0;
        }
        prev_energy = e.total;

        if (bar_met) {
            eps += cfg.eps_sj_increment;
            periods_without_progress = 0;
        } else if (!improved) {
            if (++periods_without_progress >= cfg.plateau_window) {
                res.status = OptimizeStatus::Plateau;
                break;
            }
        } else {
            periods_without_progress = 0;
        }
    }
    if (iter >= cfg.max_iterations) res.status = OptimizeStatus::MaxIterations;

    // on a stalled run, return the best state seen
    if (res.status != OptimizeStatus::Converged && !best_positions.empty()) {
        double now = mesh_min_sj();
        if (best_min_sj > now) {
            mesh.vertices = best_positions;
            for (auto& b : bindings) {
                ClosestPointResult cp =
                    surface.closest_point(mesh.vertices[(size_t)b.vertex], b.triangle);
                b.surface_point = cp.point;
                b.triangle = cp.triangle;
            }
        }
    }

    res.iterations = iter;
    double final_mn = 1.0;
    for (int h = 0; h < nh; ++h) final_mn = std::min(final_mn, hex_quality(mesh, h).min_sj);
    res.final_min_sj = final_mn;
    res.final_eps_sj = eps;
    res.max_surface_distance = max_surface_dist();
    return res;
}

} // namespace hexoct

#include "hexoct/surface.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace hexoct {

namespace {

std::string lower_ext(const std::string& path) {
    auto pos = path.find_last_of('.');
    if (pos == std::string::npos) return "";
    std::string ext = path.substr(pos + 1);
    for (char& c : ext) c = (char)std::tolower((unsigned char)c);
    return ext;
}

struct RawMesh {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
};

RawMesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open file: " + path);
    RawMesh m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 p;
            if (!(ss >> p.x >> p.y >> p.z)) throw MeshError("bad vertex at line " + std::to_string(lineno));
            m.verts.push_back(p);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                // take the position index of "v", "v/t", "v//n", "v/t/n"
                size_t slash = tok.find('/');
                int v = std::stoi(slash == std::string::npos ? tok : tok.substr(0, slash));
                if (v < 0) v = (int)m.verts.size() + v + 1;
                if (v < 1 || v > (int)m.verts.size())
                    throw MeshError("face index out of range at line " + std::to_string(lineno));
                idx.push_back(v - 1);
            }
            if (idx.size() != 3)
                throw MeshError("non-triangle face (" + std::to_string(idx.size()) +
                                " vertices) at line " + std::to_string(lineno));
            m.tris.push_back({idx[0], idx[1], idx[2]});
        }
    }
    return m;
}

RawMesh load_off(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MeshError("cannot open file: " + path);
    std::string header;
    in >> header;
    if (header != "OFF") throw MeshError("not an OFF file: " + path);
    size_t nv = 0, nf = 0, ne = 0;
    in >> nv >> nf >> ne;
    RawMesh m;
    m.verts.resize(nv);
    for (size_t i = 0; i < nv; ++i) in >> m.verts[i].x >> m.verts[i].y >> m.verts[i].z;
    for (size_t i = 0; i < nf; ++i) {
        int k;
        in >> k;
        if (k != 3) throw MeshError("non-triangle face in OFF (face " + std::to_string(i) + ")");
        std::array<int, 3> t{};
        in >> t[0] >> t[1] >> t[2];
        m.tris.push_back(t);
    }
    if (!in) throw MeshError("truncated OFF file: " + path);
    return m;
}

RawMesh dedup_stl(const std::vector<std::array<Vec3, 3>>& facets) {
    AABB bb;
    for (auto& f : facets)
        for (auto& p : f) bb.expand(p);
    double tol = 1e-8 * norm(bb.extent());
    if (tol <= 0) tol = 1e-14;
    RawMesh m;
    std::unordered_map<uint64_t, std::vector<int>> cells;
    auto key = [&](int ix, int iy, int iz) {
        return (uint64_t)(uint32_t)ix | ((uint64_t)(uint32_t)iy << 21) | ((uint64_t)(uint32_t)iz << 42);
    };
    auto find_or_add = [&](const Vec3& p) {
        int cx = (int)std::floor(p.x / tol), cy = (int)std::floor(p.y / tol), cz = (int)std::floor(p.z / tol);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = cells.find(key(cx + dx, cy + dy, cz + dz));
                    if (it == cells.end()) continue;
                    for (int v : it->second)
                        if (norm(m.verts[v] - p) <= tol) return v;
                }
        m.verts.push_back(p);
        cells[key(cx, cy, cz)].push_back((int)m.verts.size() - 1);
        return (int)m.verts.size() - 1;
    };
    for (auto& f : facets) {
        std::array<int, 3> t{find_or_add(f[0]), find_or_add(f[1]), find_or_add(f[2])};
        m.tris.push_back(t);
    }
    return m;
}

RawMesh load_stl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MeshError("cannot open file: " + path);
    in.seekg(0, std::ios::end);
    size_t size = (size_t)in.tellg();
    in.seekg(0);
    std::vector<char> data(size);
    in.read(data.data(), (std::streamsize)size);

    std::vector<std::array<Vec3, 3>> facets;
    bool binary = false;
    if (size >= 84) {
        uint32_t n;
        std::memcpy(&n, data.data() + 80, 4);
        if (84 + (size_t)n * 50 == size) binary = true;
    }
    if (binary) {
        uint32_t n;
        std::memcpy(&n, data.data() + 80, 4);
        const char* p = data.data() + 84;
        for (uint32_t i = 0; i < n; ++i, p += 50) {
            float v[12];
            std::memcpy(v, p, 48);
            facets.push_back({Vec3{v[3], v[4], v[5]}, Vec3{v[6], v[7], v[8]}, Vec3{v[9], v[10], v[11]}});
        }
    } else {
        std::istringstream ss(std::string(data.begin(), data.end()));
        std::string tok;
        std::array<Vec3, 3> f;
        int vi = 0;
        while (ss >> tok) {
            if (tok == "vertex") {
                Vec3 p;
                ss >> p.x >> p.y >> p.z;
                f[vi++] = p;
                if (vi == 3) {
                    facets.push_back(f);
                    vi = 0;
                }
            }
        }
    }
    if (facets.empty()) throw MeshError("no facets in STL file: " + path);
    return dedup_stl(facets);
}

// deterministic slight rotations used to retry degenerate ray casts
Vec3 perturb_dir(const Vec3& d, int attempt) {
    if (attempt == 0) return d;
    double a = 1e-4 * attempt;
    double ca = std::cos(a), sa = std::sin(a);
    // rotate around two fixed skew axes alternately
    Vec3 r = d;
    if (attempt % 2 == 1) {
        r = {r.x, ca * r.y - sa * r.z, sa * r.y + ca * r.z};
        r = {ca * r.x + sa * r.z, r.y, -sa * r.x + ca * r.z};
    } else {
        r = {ca * r.x - sa * r.y, sa * r.x + ca * r.y, r.z};
        r = {r.x, ca * r.y + sa * r.z, -sa * r.y + ca * r.z};
    }
    return normalized(r);
}

} // namespace

TriangleSurface TriangleSurface::load(const std::string& path) {
    std::string ext = lower_ext(path);
    RawMesh raw;
    if (ext == "obj") raw = load_obj(path);
    else if (ext == "off") raw = load_off(path);
    else if (ext == "stl") raw = load_stl(path);
    else throw MeshError("unsupported mesh format: ." + ext);
    return build(std::move(raw.verts), std::move(raw.tris), /*normalize=*/true);
}

TriangleSurface TriangleSurface::build(std::vector<Vec3> vertices,
                                       std::vector<std::array<int, 3>> triangles,
                                       bool normalize) {
    TriangleSurface s;
    s.verts_ = std::move(vertices);
    s.tris_ = std::move(triangles);
    s.validate();
    if (normalize) s.normalize();
    for (const Vec3& p : s.verts_) s.bounds_.expand(p);
    double esum = 0.0;
    for (auto& t : s.tris_)
        esum += norm(s.verts_[t[1]] - s.verts_[t[0]]) + norm(s.verts_[t[2]] - s.verts_[t[1]]) +
                norm(s.verts_[t[0]] - s.verts_[t[2]]);
    s.mean_edge_ = esum / (3.0 * (double)s.tris_.size());
    s.build_index();
    s.compute_normals();
    s.compute_features();
    return s;
}

void TriangleSurface::validate() const {
    if (tris_.empty()) throw MeshError("mesh has no triangles");
    for (size_t i = 0; i < tris_.size(); ++i) {
        auto& t = tris_[i];
        for (int k = 0; k < 3; ++k)
            if (t[k] < 0 || t[k] >= (int)verts_.size())
                throw MeshError("triangle " + std::to_string(i) + " has out-of-range vertex index");
        if (t[0] == t[1] || t[1] == t[2] || t[2] == t[0])
            throw MeshError("triangle " + std::to_string(i) + " has repeated vertices");
    }

    // duplicate triangles
    std::map<std::array<int, 3>, int> seen;
    for (size_t i = 0; i < tris_.size(); ++i) {
        std::array<int, 3> k = tris_[i];
        std::sort(k.begin(), k.end());
        auto [it, inserted] = seen.emplace(k, (int)i);
        if (!inserted)
            throw MeshError("duplicate triangle " + std::to_string(i) + " (same as " +
                            std::to_string(it->second) + ")");
    }

    // every undirected edge shared by exactly 2 triangles, traversed once each way
    std::map<std::pair<int, int>, int> undirected;
    std::map<std::pair<int, int>, int> directed;
    for (size_t i = 0; i < tris_.size(); ++i) {
        auto& t = tris_[i];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            auto [it, inserted] = directed.emplace(std::make_pair(a, b), (int)i);
            if (!inserted)
                throw MeshError("inconsistent orientation: directed edge repeated between triangles " +
                                std::to_string(it->second) + " and " + std::to_string(i));
            undirected[{std::min(a, b), std::max(a, b)}]++;
        }
    }
    for (auto& [e, n] : undirected) {
        if (n == 1)
            throw MeshError("open boundary edge (" + std::to_string(e.first) + "," +
                            std::to_string(e.second) + ")");
        if (n > 2)
            throw MeshError("non-manifold edge (" + std::to_string(e.first) + "," +
                            std::to_string(e.second) + ") shared by " + std::to_string(n) +
                            " triangles");
    }
}

void TriangleSurface::normalize() {
    AABB bb;
    for (const Vec3& p : verts_) bb.expand(p);
    Vec3 ext = bb.extent();
    double m = std::max({ext.x, ext.y, ext.z});
    if (m <= 0) throw MeshError("degenerate model: zero bounding box");
    xform_.scale = 0.9 / m;
    xform_.model_center = bb.center();
    xform_.domain_center = {0.5, 0.5, 0.5};
    for (Vec3& p : verts_) p = xform_.to_domain(p);
}

void TriangleSurface::build_index() {
    double cell = 2.0 * mean_edge_;
    Vec3 ext = bounds_.extent();
    grid_.origin = bounds_.lo;
    grid_.cell = cell;
    grid_.nx = std::max(1, (int)std::ceil(ext.x / cell));
    grid_.ny = std::max(1, (int)std::ceil(ext.y / cell));
    grid_.nz = std::max(1, (int)std::ceil(ext.z / cell));
    grid_.tri_cells.assign((size_t)grid_.nx * grid_.ny * grid_.nz, {});
    grid_.vert_cells.assign((size_t)grid_.nx * grid_.ny * grid_.nz, {});

    auto cell_range = [&](const AABB& b, int out[6]) {
        out[0] = std::clamp((int)std::floor((b.lo.x - grid_.origin.x) / cell), 0, grid_.nx - 1);
        out[1] = std::clamp((int)std::floor((b.hi.x - grid_.origin.x) / cell), 0, grid_.nx - 1);
        out[2] = std::clamp((int)std::floor((b.lo.y - grid_.origin.y) / cell), 0, grid_.ny - 1);
        out[3] = std::clamp((int)std::floor((b.hi.y - grid_.origin.y) / cell), 0, grid_.ny - 1);
        out[4] = std::clamp((int)std::floor((b.lo.z - grid_.origin.z) / cell), 0, grid_.nz - 1);
        out[5] = std::clamp((int)std::floor((b.hi.z - grid_.origin.z) / cell), 0, grid_.nz - 1);
    };

    for (size_t i = 0; i < tris_.size(); ++i) {
        AABB b;
        for (int k = 0; k < 3; ++k) b.expand(verts_[tris_[i][k]]);
        int r[6];
        cell_range(b, r);
        for (int iz = r[4]; iz <= r[5]; ++iz)
            for (int iy = r[2]; iy <= r[3]; ++iy)
                for (int ix = r[0]; ix <= r[1]; ++ix)
                    grid_.tri_cells[grid_.index(ix, iy, iz)].push_back((int)i);
    }
    for (size_t v = 0; v < verts_.size(); ++v) {
        AABB b;
        b.expand(verts_[v]);
        int r[6];
        cell_range(b, r);
        grid_.vert_cells[grid_.index(r[0], r[2], r[4])].push_back((int)v);
    }
}

void TriangleSurface::compute_normals() {
    normals_.assign(verts_.size(), Vec3{});
    for (auto& t : tris_) {
        const Vec3 &a = verts_[t[0]], &b = verts_[t[1]], &c = verts_[t[2]];
        Vec3 n = cross(b - a, c - a);
        // angle-weighted accumulation
        for (int k = 0; k < 3; ++k) {
            const Vec3 &p = verts_[t[k]], &q = verts_[t[(k + 1) % 3]], &r = verts_[t[(k + 2) % 3]];
            Vec3 e1 = normalized(q - p), e2 = normalized(r - p);
            double ang = std::acos(std::clamp(dot(e1, e2), -1.0, 1.0));
            normals_[t[k]] += normalized(n) * ang;
        }
    }
    for (Vec3& n : normals_) n = normalized(n);
}

void TriangleSurface::compute_features() {
    size_t nv = verts_.size();
    std::vector<Vec3> umbrella(nv, Vec3{});
    std::vector<double> area(nv, 0.0);

    for (size_t ti = 0; ti < tris_.size(); ++ti) {
        auto& t = tris_[ti];
        const Vec3 p[3] = {verts_[t[0]], verts_[t[1]], verts_[t[2]]};
        double a2 = norm(cross(p[1] - p[0], p[2] - p[0]));
        if (a2 <= 0.0)
            throw MeshError("degenerate (zero-area) triangle " + std::to_string(ti));
        double tri_area = 0.5 * a2;

        double cot[3];
        bool obtuse[3];
        for (int k = 0; k < 3; ++k) {
            Vec3 u = p[(k + 1) % 3] - p[k], v = p[(k + 2) % 3] - p[k];
            double c = dot(u, v);
            double s = norm(cross(u, v));
            cot[k] = c / std::max(s, 1e-300);
            obtuse[k] = c < 0.0;
        }
        bool any_obtuse = obtuse[0] || obtuse[1] || obtuse[2];

        for (int k = 0; k < 3; ++k) {
            int i = t[k], j = t[(k + 1) % 3], o = t[(k + 2) % 3];
            // cot at o is opposite edge (i,j); accumulate for both endpoints
            umbrella[i] += (verts_[j] - verts_[i]) * cot[(k + 2) % 3];
            umbrella[j] += (verts_[i] - verts_[j]) * cot[(k + 2) % 3];
            (void)o;
        }
        // mixed Voronoi area
        for (int k = 0; k < 3; ++k) {
            int i = t[k];
            if (!any_obtuse) {
                double lb = norm2(p[(k + 2) % 3] - p[k]); // edge to prev, opposite angle at (k+1)
                double lc = norm2(p[(k + 1) % 3] - p[k]); // edge to next, opposite angle at (k+2)
                area[i] += (lb * cot[(k + 1) % 3] + lc * cot[(k + 2) % 3]) / 8.0;
            } else if (obtuse[k]) {
                area[i] += tri_area / 2.0;
            } else {
                area[i] += tri_area / 4.0;
            }
        }
    }

    curvature_.resize(nv);
    for (size_t v = 0; v < nv; ++v) {
        if (area[v] < 1e-12)
            throw MeshError("vanishing mixed area at vertex " + std::to_string(v));
        curvature_[v] = norm(umbrella[v]) / (4.0 * area[v]);
    }

    thickness_.resize(nv);
    thickness_misses_ = 0;
    const double inf = std::numeric_limits<double>::infinity();
    for (size_t v = 0; v < nv; ++v) {
        RayHit hit = raycast(verts_[v], -normals_[v], (int)v);
        if (hit.tri < 0) {
            thickness_[v] = inf;
            ++thickness_misses_;
        } else {
            thickness_[v] = hit.t;
        }
    }
}

double TriangleSurface::vertex_curvature(int v) const { return curvature_[(size_t)v]; }
double TriangleSurface::vertex_thickness(int v) const { return thickness_[(size_t)v]; }

// ---------------------------------------------------------------------------
// triangle / box overlap (separating axis test)

namespace {
bool axis_test(const Vec3& axis, const Vec3& v0, const Vec3& v1, const Vec3& v2, const Vec3& half) {
    double p0 = dot(axis, v0), p1 = dot(axis, v1), p2 = dot(axis, v2);
    double r = half.x * std::abs(axis.x) + half.y * std::abs(axis.y) + half.z * std::abs(axis.z);
    double mn = std::min({p0, p1, p2}), mx = std::max({p0, p1, p2});
    return mn > r || mx < -r; // true if separating
}
} // namespace

bool TriangleSurface::tri_box_overlap(const Vec3& a, const Vec3& b, const Vec3& c, const AABB& box) {
    Vec3 ctr = box.center();
    Vec3 half = box.extent() * 0.5;
    Vec3 v0 = a - ctr, v1 = b - ctr, v2 = c - ctr;
    Vec3 e0 = v1 - v0, e1 = v2 - v1, e2 = v0 - v2;

    // box face normals
    if (std::min({v0.x, v1.x, v2.x}) > half.x || std::max({v0.x, v1.x, v2.x}) < -half.x) return false;
    if (std::min({v0.y, v1.y, v2.y}) > half.y || std::max({v0.y, v1.y, v2.y}) < -half.y) return false;
    if (std::min({v0.z, v1.z, v2.z}) > half.z || std::max({v0.z, v1.z, v2.z}) < -half.z) return false;

    // 9 cross-product axes
    const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (const Vec3& e : {e0, e1, e2})
        for (const Vec3& u : axes) {
            Vec3 ax = cross(u, e);
            if (norm2(ax) < 1e-30) continue;
            if (axis_test(ax, v0, v1, v2, half)) return false;
        }

    // triangle plane
    Vec3 n = cross(e0, e1);
    double d = dot(n, v0);
    double r = half.x * std::abs(n.x) + half.y * std::abs(n.y) + half.z * std::abs(n.z);
    return std::abs(d) <= r;
}

bool TriangleSurface::intersects_box(const AABB& box) const {
    for (int t : triangles_in_box(box)) {
        auto& tt = tris_[t];
        if (tri_box_overlap(verts_[tt[0]], verts_[tt[1]], verts_[tt[2]], box)) return true;
    }
    return false;
}

std::vector<int> TriangleSurface::triangles_in_box(const AABB& box) const {
    std::vector<int> out;
    int x0 = std::clamp((int)std::floor((box.lo.x - grid_.origin.x) / grid_.cell), 0, grid_.nx - 1);
    int x1 = std::clamp((int)std::floor((box.hi.x - grid_.origin.x) / grid_.cell), 0, grid_.nx - 1);
    int y0 = std::clamp((int)std::floor((box.lo.y - grid_.origin.y) / grid_.cell), 0, grid_.ny - 1);
    int y1 = std::clamp((int)std::floor((box.hi.y - grid_.origin.y) / grid_.cell), 0, grid_.ny - 1);
    int z0 = std::clamp((int)std::floor((box.lo.z - grid_.origin.z) / grid_.cell), 0, grid_.nz - 1);
    int z1 = std::clamp((int)std::floor((box.hi.z - grid_.origin.z) / grid_.cell), 0, grid_.nz - 1);
    std::vector<char> seen(tris_.size(), 0);
    for (int iz = z0; iz <= z1; ++iz)
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix)
                for (int t : grid_.tri_cells[grid_.index(ix, iy, iz)])
                    if (!seen[t]) {
                        seen[t] = 1;
                        AABB tb;
                        for (int k = 0; k < 3; ++k) tb.expand(verts_[tris_[t][k]]);
                        if (tb.overlaps(box)) out.push_back(t);
                    }
    return out;
}

std::vector<int> TriangleSurface::vertices_in_box(const AABB& box) const {
    std::vector<int> out;
    int x0 = std::clamp((int)std::floor((box.lo.x - grid_.origin.x) / grid_.cell), 0, grid_.nx - 1);
    int x1 = std::clamp((int)std::floor((box.hi.x - grid_.origin.x) / grid_.cell), 0, grid_.nx - 1);
    int y0 = std::clamp((int)std::floor((box.lo.y - grid_.origin.y) / grid_.cell), 0, grid_.ny - 1);
    int y1 = std::clamp((int)std::floor((box.hi.y - grid_.origin.y) / grid_.cell), 0, grid_.ny - 1);
    int z0 = std::clamp((int)std::floor((box.lo.z - grid_.origin.z) / grid_.cell), 0, grid_.nz - 1);
    int z1 = std::clamp((int)std::floor((box.hi.z - grid_.origin.z) / grid_.cell), 0, grid_.nz - 1);
    for (int iz = z0; iz <= z1; ++iz)
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix)
                for (int v : grid_.vert_cells[grid_.index(ix, iy, iz)])
                    if (box.contains(verts_[v])) out.push_back(v);
    return out;
}

Vec3 TriangleSurface::triangle_centroid(int t) const {
    auto& tt = tris_[t];
    return (verts_[tt[0]] + verts_[tt[1]] + verts_[tt[2]]) / 3.0;
}

double TriangleSurface::triangle_mean_edge(int t) const {
    auto& tt = tris_[t];
    return (norm(verts_[tt[1]] - verts_[tt[0]]) + norm(verts_[tt[2]] - verts_[tt[1]]) +
            norm(verts_[tt[0]] - verts_[tt[2]])) / 3.0;
}

// ---------------------------------------------------------------------------
// closest point

namespace {
// Ericson, Real-Time Collision Detection, closest point on triangle
Vec3 closest_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = dot(ab, ap), d2 = dot(ac, ap);
    if (d1 <= 0 && d2 <= 0) return a;
    Vec3 bp = p - b;
    double d3 = dot(ab, bp), d4 = dot(ac, bp);
    if (d3 >= 0 && d4 <= d3) return b;
    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0 && d1 >= 0 && d3 <= 0) return a + ab * (d1 / (d1 - d3));
    Vec3 cp = p - c;
    double d5 = dot(ab, cp), d6 = dot(ac, cp);
    if (d6 >= 0 && d5 <= d6) return c;
    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0 && d2 >= 0 && d6 <= 0) return a + ac * (d2 / (d2 - d6));
    double va = d3 * d6 - d5 * d4;
    if (va <= 0 && (d4 - d3) >= 0 && (d5 - d6) >= 0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}
} // namespace

ClosestPointResult TriangleSurface::closest_point(const Vec3& q, int hint_triangle) const {
    ClosestPointResult best;
    best.distance = std::numeric_limits<double>::infinity();

    auto scan = [&](const std::vector<int>& cand) {
        for (int t : cand) {
            auto& tt = tris_[t];
            Vec3 cp = closest_on_triangle(q, verts_[tt[0]], verts_[tt[1]], verts_[tt[2]]);
            double d = norm(cp - q);
            if (d < best.distance) {
                best.distance = d;
                best.point = cp;
                best.triangle = t;
            }
        }
    };

    if (hint_triangle >= 0) {
        double h = 5.0 * triangle_mean_edge(hint_triangle);
        AABB box;
        box.lo = q - Vec3{h, h, h};
        box.hi = q + Vec3{h, h, h};
        std::vector<int> cand = triangles_in_box(box);
        if (!cand.empty()) {
            scan(cand);
            // only trust the local result if it cannot be beaten outside the box
            if (best.distance <= h) return best;
            best = ClosestPointResult{};
            best.distance = std::numeric_limits<double>::infinity();
        }
    }

    // expanding ring search over the grid
    double cell = grid_.cell;
    int qx = std::clamp((int)std::floor((q.x - grid_.origin.x) / cell), 0, grid_.nx - 1);
    int qy = std::clamp((int)std::floor((q.y - grid_.origin.y) / cell), 0, grid_.ny - 1);
    int qz = std::clamp((int)std::floor((q.z - grid_.origin.z) / cell), 0, grid_.nz - 1);
    int max_r = std::max({grid_.nx, grid_.ny, grid_.nz});
    std::vector<char> seen(tris_.size(), 0);
    for (int r = 0; r <= max_r; ++r) {
        // once we have a result, stop when the next ring cannot improve it
        if (best.triangle >= 0 && (double)(r - 1) * cell > best.distance) break;
        bool any_cell = false;
        for (int iz = qz - r; iz <= qz + r; ++iz) {
            if (iz < 0 || iz >= grid_.nz) continue;
            for (int iy = qy - r; iy <= qy + r; ++iy) {
                if (iy < 0 || iy >= grid_.ny) continue;
                for (int ix = qx - r; ix <= qx + r; ++ix) {
                    if (ix < 0 || ix >= grid_.nx) continue;
                    if (std::max({std::abs(ix - qx), std::abs(iy - qy), std::abs(iz - qz)}) != r)
                        continue; // ring shell only
                    any_cell = true;
                    for (int t : grid_.tri_cells[grid_.index(ix, iy, iz)]) {
                        if (seen[t]) continue;
                        seen[t] = 1;
                        auto& tt = tris_[t];
                        Vec3 cp = closest_on_triangle(q, verts_[tt[0]], verts_[tt[1]], verts_[tt[2]]);
                        double d = norm(cp - q);
                        if (d < best.distance) {
                            best.distance = d;
                            best.point = cp;
                            best.triangle = t;
                        }
                    }
                }
            }
        }
        if (!any_cell && best.triangle >= 0) break;
    }
    return best;
}

// ---------------------------------------------------------------------------
// ray casting and signed distance

TriangleSurface::RayHit TriangleSurface::raycast(const Vec3& origin, const Vec3& dir,
                                                 int skip_vertex) const {
    RayHit best;
    best.t = std::numeric_limits<double>::infinity();
    const double eps = 1e-12;
    for (size_t i = 0; i < tris_.size(); ++i) {
        auto& t = tris_[i];
        if (skip_vertex >= 0 &&
            (t[0] == skip_vertex || t[1] == skip_vertex || t[2] == skip_vertex))
            continue;
        const Vec3 &a = verts_[t[0]], &b = verts_[t[1]], &c = verts_[t[2]];
        Vec3 e1 = b - a, e2 = c - a;
        Vec3 pv = cross(dir, e2);
        double det = dot(e1, pv);
        if (std::abs(det) < 1e-14) continue;
        double inv = 1.0 / det;
        Vec3 tv = origin - a;
        double u = dot(tv, pv) * inv;
        Vec3 qv = cross(tv, e1);
        double v = dot(dir, qv) * inv;
        double tt = dot(e2, qv) * inv;
        if (tt <= eps) continue;
        if (u < -eps || v < -eps || u + v > 1.0 + eps) continue;
        bool boundary_hit = (u < eps || v < eps || u + v > 1.0 - eps);
        if (tt < best.t) {
            best.t = tt;
            best.tri = (int)i;
            best.degenerate = boundary_hit;
        } else if (boundary_hit && std::abs(tt - best.t) < eps) {
            best.degenerate = true; // double hit on a shared edge
        }
    }
    if (best.tri < 0) best.t = 0.0;
    return best;
}

int TriangleSurface::ray_crossings(const Vec3& q) const {
    Vec3 base_dir{0.7548776662466927, 0.5698402909980532, 0.3247179572447458};
    for (int attempt = 0; attempt < 8; ++attempt) {
        Vec3 dir = perturb_dir(base_dir, attempt);
        int crossings = 0;
        bool bad = false;
        const double eps = 1e-12;
        for (size_t i = 0; i < tris_.size() && !bad; ++i) {
            auto& t = tris_[i];
            const Vec3 &a = verts_[t[0]], &b = verts_[t[1]], &c = verts_[t[2]];
            Vec3 e1 = b - a, e2 = c - a;
            Vec3 pv = cross(dir, e2);
            double det = dot(e1, pv);
            if (std::abs(det) < 1e-14) continue;
            double inv = 1.0 / det;
            Vec3 tv = q - a;
            double u = dot(tv, pv) * inv;
            Vec3 qv = cross(tv, e1);
            double v = dot(dir, qv) * inv;
            double tt = dot(e2, qv) * inv;
            if (tt <= eps) continue;
            if (u < -eps || v < -eps || u + v > 1.0 + eps) continue;
            if (u < eps || v < eps || u + v > 1.0 - eps) {
                bad = true; // grazing hit, re-cast
                break;
            }
            ++crossings;
        }
        if (!bad) return crossings;
    }
    throw MeshError("signed_distance: ray casting failed after 8 perturbed retries");
}

double TriangleSurface::signed_distance(const Vec3& q) const {
    ClosestPointResult cp = closest_point(q);
    int crossings = ray_crossings(q);
    bool inside = (crossings % 2) == 1;
    return inside ? cp.distance : -cp.distance;
}

} // namespace hexoct

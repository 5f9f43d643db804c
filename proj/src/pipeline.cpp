#include "hexoct/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "hexoct/coremesh.hpp"
#include "hexoct/dualmesh.hpp"
#include "hexoct/vtk_io.hpp"

namespace hexoct {

const char* const kStageNames[9] = {"load",      "octree",  "balance",  "transitions", "dual",
                                    "exterior",  "clearance", "buffer", "optimize"};

void PipelineConfig::apply_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PipelineError("config", "cannot open config file: " + path, 2);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            while (!s.empty() && std::isspace((unsigned char)s.front())) s.erase(s.begin());
            while (!s.empty() && std::isspace((unsigned char)s.back())) s.pop_back();
        };
        trim(key);
        trim(val);
        if (key.empty()) continue;
        if (key == "base_level") refinement.base_level = std::stoi(val);
        else if (key == "max_level") refinement.max_level = std::stoi(val);
        else if (key == "alpha") optimizer.alpha = std::stod(val);
        else if (key == "eps_sj") optimizer.eps_sj = std::stod(val);
        else if (key == "maintenance_period") optimizer.maintenance_period = std::stoi(val);
        else if (key == "snap_tolerance") optimizer.snap_tolerance = std::stod(val);
        else if (key == "max_iterations") optimizer.max_iterations = std::stoll(val);
        else throw PipelineError("config", "unknown config key: " + key, 2);
    }
}

void PipelineConfig::validate() const {
    if (refinement.max_level > 12)
        throw PipelineError("config", "max_level out of range (<= 12)", 2);
    if (!(optimizer.alpha > 0.0 && optimizer.alpha < 1.0))
        throw PipelineError("config", "alpha must be in (0, 1)", 2);
}

namespace {

// default threshold ladders truncated to the configured level span
RefinementConfig resolve_levels(const RefinementConfig& in) {
    RefinementConfig cfg = in;
    size_t want = (size_t)(cfg.max_level - cfg.base_level + 1);
    RefinementConfig defaults;
    auto fit = [&](std::vector<double>& v, const std::vector<double>& def) {
        if (v.size() == want) return;
        if (v == def || v.empty()) {
            v.assign(def.begin(), def.begin() + std::min(want, def.size()));
            while (v.size() < want) v.push_back(v.back() / 2.0);
        }
    };
    fit(cfg.curvature_thresholds, defaults.curvature_thresholds);
    fit(cfg.thickness_thresholds, defaults.thickness_thresholds);
    return cfg;
}

struct StageTimer {
    QualityReport* report;
    int stage;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    StageTimer(QualityReport* r, int s) : report(r), stage(s) {}
    ~StageTimer() {
        report->stage_seconds[(size_t)stage] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

} // namespace

QualityReport run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    QualityReport report;
    auto dump = [&](const std::string& name, const HexMesh& m) {
        if (!cfg.dump_dir.empty()) write_hexmesh_vtk(cfg.dump_dir + "/" + name + ".vtk", m, nullptr, true);
    };

    TriangleSurface surface = [&] {
        StageTimer t(&report, 0);
        try {
            return TriangleSurface::load(cfg.input_path);
        } catch (const MeshError& e) {
            throw PipelineError("load", e.what(), 2);
        }
    }();

    RefinementConfig rc = resolve_levels(cfg.refinement);
    report.base_level = rc.base_level;
    report.max_level = rc.max_level;

    Octree tree = [&] {
        StageTimer t(&report, 1);
        try {
            return Octree::build_initial(surface, rc);
        } catch (const std::exception& e) {
            throw PipelineError("octree", e.what(), 2);
        }
    }();
    {
        StageTimer t(&report, 2);
        tree.enforce_strong_balance();
    }
    if (!cfg.dump_dir.empty()) write_octree_vtk(cfg.dump_dir + "/octree.vtk", tree);

    int lmin = 127, lmax = 0;
    for (auto& n : tree.nodes())
        if (n.is_leaf()) {
            lmin = std::min(lmin, (int)n.level);
            lmax = std::max(lmax, (int)n.level);
        }
    report.levels_used_min = lmin;
    report.levels_used_max = lmax;

    std::vector<TransitionRecord> transitions = [&] {
        StageTimer t(&report, 3);
        return detect_transitions(tree);
    }();

    HexMesh dual = [&] {
        StageTimer t(&report, 4);
        return extract_dual(tree, transitions);
    }();
    dump("dual", dual);

    HexMesh core = [&] {
        StageTimer t(&report, 5);
        try {
            return remove_exterior(dual, surface);
        } catch (const MeshError& e) {
            throw PipelineError("exterior", e.what(), 3);
        }
    }();

    core = [&] {
        StageTimer t(&report, 6);
        try {
            return clear_buffer(core, surface);
        } catch (const MeshError& e) {
            throw PipelineError("clearance", e.what(), 3);
        }
    }();
    dump("core", core);

    BufferResult buffered = [&] {
        StageTimer t(&report, 7);
        return build_buffer_layer(core, surface);
    }();

    OptimizeResult opt = [&] {
        StageTimer t(&report, 8);
        return optimize(buffered.mesh, buffered.bindings, surface, buffered.layer2, cfg.optimizer);
    }();
    report.optimizer_status = opt.status;
    report.snapped = opt.snapped;
    report.max_surface_distance = opt.max_surface_distance;

    HexMesh& mesh = buffered.mesh;
    report.vertex_count = mesh.vertex_count();
    report.element_count = mesh.hex_count();
    std::vector<double> per_hex_sj((size_t)mesh.hex_count());
    for (int h = 0; h < mesh.hex_count(); ++h) {
        double sj = hex_quality(mesh, h).min_sj;
        per_hex_sj[(size_t)h] = sj;
        report.min_scaled_jacobian = std::min(report.min_scaled_jacobian, sj);
        report.max_scaled_jacobian = std::max(report.max_scaled_jacobian, sj);
        int bin = std::clamp((int)((sj + 1.0) / 2.0 * 20.0), 0, 19);
        report.histogram[(size_t)bin]++;
    }

    if (!cfg.output_path.empty()) {
        // back to the input's coordinate frame
        HexMesh out = mesh;
        for (auto& p : out.vertices) p = surface.transform().to_original(p);
        write_hexmesh_vtk(cfg.output_path, out, &per_hex_sj, false);
    }

    if (!cfg.report_path.empty()) write_report(cfg.report_path, cfg, report);
    return report;
}

void write_report(const std::string& path, const PipelineConfig& cfg, const QualityReport& r) {
    std::ofstream out(path);
    if (!out) throw PipelineError("report", "cannot write report: " + path, 2);
    out.precision(17);
    out << "record=config input=" << cfg.input_path << " base_level=" << r.base_level
        << " max_level=" << r.max_level << " alpha=" << cfg.optimizer.alpha
        << " eps_sj=" << cfg.optimizer.eps_sj
        << " maintenance_period=" << cfg.optimizer.maintenance_period
        << " snap_tolerance=" << cfg.optimizer.snap_tolerance << "\n";
    for (int s = 0; s < 9; ++s)
        out << "record=stage name=" << kStageNames[s] << " seconds=" << r.stage_seconds[(size_t)s]
            << "\n";
    const char* status = r.optimizer_status == OptimizeStatus::Converged      ? "converged"
                         : r.optimizer_status == OptimizeStatus::Plateau      ? "plateau"
                         : r.optimizer_status == OptimizeStatus::MaxIterations ? "max_iterations"
                                                                               : "diverged";
    out << "record=summary vertices=" << r.vertex_count << " elements=" << r.element_count
        << " min_sj=" << r.min_scaled_jacobian << " max_sj=" << r.max_scaled_jacobian
        << " levels_used=" << r.levels_used_min << ".." << r.levels_used_max
        << " optimizer=" << status << " snapped=" << (r.snapped ? 1 : 0)
        << " max_surface_distance=" << r.max_surface_distance << "\n";
    out << "record=histogram";
    for (int b = 0; b < 20; ++b) out << " bin" << b << "=" << r.histogram[(size_t)b];
    out << "\n";
}

} // namespace hexoct

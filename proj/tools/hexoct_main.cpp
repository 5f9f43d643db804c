#include <cstdio>
#include <random>

#include "CLI11.hpp"
#include "hexoct/pipeline.hpp"
#include "hexoct/quadtree.hpp"
#include "hexoct/vtk_io.hpp"

namespace {

int run_mesh(const hexoct::PipelineConfig& cfg) {
    try {
        hexoct::QualityReport r = hexoct::run_pipeline(cfg);
        std::printf("vertices=%d elements=%d min_sj=%.6f max_sj=%.6f\n", r.vertex_count,
                    r.element_count, r.min_scaled_jacobian, r.max_scaled_jacobian);
        bool ok = r.snapped && r.min_scaled_jacobian >= cfg.optimizer.eps_sj;
        if (!ok) {
            std::fprintf(stderr, "optimizer finished below target (min_sj=%.6f, snapped=%d)\n",
                         r.min_scaled_jacobian, (int)r.snapped);
            return 4;
        }
        return 0;
    } catch (const hexoct::PipelineError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return e.exit_code();
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

int run_dual2d(uint64_t seed, int depth, int splits, const std::string& svg) {
    hexoct::Quadtree tree = hexoct::Quadtree::make_root(depth);
    std::mt19937_64 rng(seed);
    for (int s = 0; s < splits; ++s) {
        auto leaves = tree.leaves();
        std::vector<int> eligible;
        for (int n : leaves)
            if (tree.nodes()[(size_t)n].level < depth) eligible.push_back(n);
        if (eligible.empty()) break;
        tree.refine_leaf(eligible[rng() % eligible.size()]);
    }
    tree.enforce_strong_balance();
    hexoct::QuadMesh mesh = hexoct::extract_dual_2d(tree);
    std::printf("leaves=%d quads=%zu\n", (int)tree.leaves().size(), mesh.quads.size());
    if (!svg.empty()) hexoct::write_quadmesh_svg(svg, mesh);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adaptive all-hex mesh generation from closed triangle surfaces"};
    app.require_subcommand(1);

    hexoct::PipelineConfig cfg;
    std::string config_file;
    auto* mesh = app.add_subcommand("mesh", "mesh a surface into hexahedra");
    mesh->add_option("input", cfg.input_path, "input OBJ/OFF/STL surface")->required();
    mesh->add_option("-o,--output", cfg.output_path, "output VTK mesh")->required();
    mesh->add_option("--config", config_file, "key=value config file");
    int base_level = -1, max_level = -1;
    double alpha = -1.0;
    mesh->add_option("--base-level", base_level, "octree level of the boundary (default 5)");
    mesh->add_option("--max-level", max_level, "finest octree level (default 9)");
    mesh->add_option("--alpha", alpha, "optimizer step size (default 0.8e-3)");
    mesh->add_option("--dump-stages", cfg.dump_dir, "directory for per-stage VTK dumps");
    mesh->add_option("--report", cfg.report_path, "write key=value report records");
    bool quiet = false;
    mesh->add_flag("--quiet", quiet, "suppress optimizer progress lines");

    uint64_t seed = 1;
    int depth = 5, splits = 40;
    std::string svg;
    auto* dual2d = app.add_subcommand("dual2d", "all-quad dual of a random balanced quadtree");
    dual2d->add_option("--seed", seed, "random seed");
    dual2d->add_option("--depth", depth, "maximum quadtree level");
    dual2d->add_option("--splits", splits, "random refinement count");
    dual2d->add_option("--svg", svg, "write the quad mesh as SVG");

    CLI11_PARSE(app, argc, argv);

    if (mesh->parsed()) {
        if (!config_file.empty()) cfg.apply_file(config_file);
        if (base_level >= 0) cfg.refinement.base_level = base_level;
        if (max_level >= 0) cfg.refinement.max_level = max_level;
        if (alpha > 0.0) cfg.optimizer.alpha = alpha;
        cfg.optimizer.verbose = !quiet;
        return run_mesh(cfg);
    }
    return run_dual2d(seed, depth, splits, svg);
}

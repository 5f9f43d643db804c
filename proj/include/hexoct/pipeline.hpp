#pragma once

#include <array>
#include <optional>
#include <string>

#include "hexoct/octree.hpp"
#include "hexoct/optimizer.hpp"

namespace hexoct {

struct PipelineConfig {
    std::string input_path;
    std::string output_path;
    RefinementConfig refinement;
    OptimizerConfig optimizer;
    std::string dump_dir;    // per-stage VTK dumps when non-empty
    std::string report_path; // key=value records when non-empty

    /// Load key=value overrides from a flat config file.
    void apply_file(const std::string& path);
    void validate() const;
};

struct QualityReport {
    int vertex_count = 0;
    int element_count = 0;
    double min_scaled_jacobian = 1.0;
    double max_scaled_jacobian = -1.0;
    std::array<int, 20> histogram{}; // per-hex min SJ binned over [-1, 1]
    int base_level = 0;
    int max_level = 0;
    int levels_used_min = 0;
    int levels_used_max = 0;
    OptimizeStatus optimizer_status = OptimizeStatus::Converged;
    bool snapped = false;
    double max_surface_distance = 0.0;
    std::array<double, 9> stage_seconds{}; // load..optimize, write
};

extern const char* const kStageNames[9];

class PipelineError : public std::runtime_error {
public:
    PipelineError(const std::string& stage, const std::string& what, int exit_code)
        : std::runtime_error("[" + stage + "] " + what), stage_(stage), exit_code_(exit_code) {}
    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

/// Full meshing pipeline: load -> octree -> balance -> transitions -> dual ->
/// exterior removal -> buffer clearance -> buffer layer -> optimize -> write.
/// The final mesh is written in the input's original coordinate frame.
QualityReport run_pipeline(const PipelineConfig& cfg);

void write_report(const std::string& path, const PipelineConfig& cfg, const QualityReport& r);

} // namespace hexoct

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mixadc/crb.hpp"
#include "mixadc/mlikes.hpp"
#include "mixadc/refine.hpp"

namespace mixadc {

enum class Experiment { crb_sweep, rmse, imaging };
enum class Scale { paper, desk };

Experiment parse_experiment(const std::string& name);
const char* experiment_name(Experiment e);
Scale parse_scale(const std::string& name);
const char* scale_name(Scale s);

struct SystemConfig {
    int m_tx = 10;
    int m_rx = 10;
    double d_tx = 5.0;  // wavelengths
    double d_rx = 0.5;
    int n_pri = 64;
};

struct GridConfig {
    int k_theta = 128;
    int k_omega = 256;
};

struct AdcSettings {
    std::string pattern = "mixed1";   // receiver used by rmse and the mixed image
    std::vector<int> delta;           // explicit override of `pattern` when non-empty
    int threshold_levels = 8;
    std::vector<std::string> sweep = {"hp", "1b", "mixed1", "mixed2", "mixed3"};
};

struct TargetSpec {
    double theta_deg = 0.0;
    double omega = 0.0;     // rad / PRI
    double amplitude = 1.0; // |b|
    double phase = 0.0;     // rad
};

struct SceneConfig {
    /// Two-target scenes: target 2 gets amplitude |b_1| / r.
    std::vector<TargetSpec> targets = {{22.5, 1.3, 1.0, kPi / 4}, {25.3125, 1.4, 1.0, kPi / 4}};
    std::vector<double> r_values = {1, 3.16227766, 10, 31.6227766, 100, 316.227766, 1000};
    double snr2_db = 10.0;
    bool snap_to_grid = false;
    bool known_noise = true;  // crb-sweep: known-sigma bounds; rmse always compares to unknown-sigma

    // Random imaging scene.
    int n_targets = 30;
    int n_off_grid = 2;
    double amp_min = 0.01;
    double amp_max = 1.0;
    int min_separation_cells = 4;
    double max_theta_deg = 60.0;
    double min_snr_db = 10.0;
};

struct RunConfig {
    int trials = 500;
    std::uint64_t seed = 20240601;
    int workers = 0;  // 0: hardware concurrency
    std::string out_dir = "out";
    int k_max = 4;
    bool write_pgm = true;
    MlikesOptions mlikes{};
    RefineOptions refine{};
};

struct ExperimentConfig {
    Experiment experiment = Experiment::crb_sweep;
    Scale scale = Scale::paper;
    SystemConfig system;
    GridConfig grid;
    AdcSettings adc;
    SceneConfig scene;
    RunConfig run;

    /// Throws DomainError naming the offending field.
    void validate() const;
};

/// Defaults for an experiment at a scale. Paper scale follows the
/// published setup; desk scale is the reduced profile used by the tests.
ExperimentConfig default_config(Experiment e, Scale s);

/// Overwrites system, grid and trial dimensions with the desk profile.
void apply_desk_profile(ExperimentConfig& cfg);

/// Applies a JSON document on top of `base`. Unknown keys are errors.
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base);
ExperimentConfig load_config(const std::string& path, ExperimentConfig base);
std::string config_to_json(const ExperimentConfig& cfg);

/// delta for the configured receiver (explicit vector wins over pattern).
std::vector<int> configured_delta(const ExperimentConfig& cfg);

// ---------------------------------------------------------------- crb sweep

struct CrbSweepRow {
    double r = 1.0;
    std::string receiver;
    RVec root_crb;  // [theta_1..K, omega_1..K, Re b_1..K, Im b_1..K]
    bool singular = false;
    double condition = 0.0;
};

std::vector<CrbSweepRow> run_crb_sweep(const ExperimentConfig& cfg);

// -------------------------------------------------------------- monte carlo

struct RmseRow {
    double r = 1.0;
    std::string parameter;
    double rmse = 0.0;
    double rcrb = 0.0;
    int trials = 0;
};

struct RmseResult {
    std::vector<RmseRow> rows;
    std::map<double, std::map<int, int>> k_hat_histogram;  // r -> K_hat -> count
    std::map<double, int> misses;                           // trials without a match for target 2
    double seconds = 0.0;
};

RmseResult run_rmse_mc(const ExperimentConfig& cfg);

// ------------------------------------------------------------------ imaging

struct MethodImage {
    std::string name;
    RMat image;  // K_theta x K_omega power image
    std::vector<Target> detections;  // mBIC-selected peaks (grid positions, b on data scale)
    int recovered = 0;               // truth targets with a detection within one cell
    double seconds = 0.0;
};

struct ImagingRun {
    std::uint64_t seed = 0;
    Scene truth;
    std::vector<bool> off_grid;
    std::vector<MethodImage> methods;  // mf, likes, 1blikes, mlikes
    std::vector<Target> refined;       // mLIKES after cyclic refinement
    std::vector<double> off_grid_error_cells;  // max(|d theta|/step, |d omega|/step) per off-grid target
};

struct ImagingResult {
    std::vector<ImagingRun> runs;
};

/// One run per trial index 0..trials-1, each with its own scene.
ImagingResult run_imaging(const ExperimentConfig& cfg);
ImagingRun run_imaging_trial(const ExperimentConfig& cfg, int trial);

/// Random imaging scene per the scene block.
Scene random_imaging_scene(const ExperimentConfig& cfg, std::uint64_t seed, std::vector<bool>* off_grid = nullptr);

// ------------------------------------------------------------------- output

void write_crb_csv(const std::string& path, const std::vector<CrbSweepRow>& rows, int k);
void write_rmse_csv(const std::string& path, const RmseResult& res);
void write_khat_csv(const std::string& path, const RmseResult& res);
void write_matrix(const std::string& path, const RMat& m);
/// 8-bit graymap of 10 log10(m / max m) clipped to [-dynamic_db, 0].
void write_pgm(const std::string& path, const RMat& m, double dynamic_db = 40.0);
void write_targets_csv(const std::string& path, const std::vector<Target>& targets);

/// Runs an experiment and writes its outputs under cfg.run.out_dir.
/// Returns the written file paths.
std::vector<std::string> run_and_write(const ExperimentConfig& cfg);

}  // namespace mixadc

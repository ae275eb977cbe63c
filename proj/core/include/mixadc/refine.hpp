#pragma once

#include <vector>

#include "mixadc/likelihood.hpp"
#include "mixadc/optimize.hpp"

namespace mixadc {

struct Peak {
    int k_theta = 0;
    int k_omega = 0;
    cplx amplitude{0.0, 0.0};
    double power = 0.0;
};

/// Sorted by descending power; equal powers ordered by lower angle index,
/// then lower Doppler index.
using PeakList = std::vector<Peak>;

/// Local maxima of |alpha|^2 over the 8-neighbourhood of the
/// K_theta x K_omega image (Doppler wraps, angle does not). On plateaus the
/// cell that comes first in the tie-break order wins. Returns at most max_k.
PeakList pick_peaks(const CVec& alpha, const Grid& grid, int max_k);

/// (6K + 1) ln(M_r M_t N).
double mbic_penalty(int k, const RadarSystem& sys);

struct MbicResult {
    int k_hat = 0;
    std::vector<double> score;  // mBIC for K = 0..k_max
    std::vector<double> nll;
    std::vector<std::vector<TargetEstimate>> coarse;
    std::vector<double> eta;
};

/// For K = 0..k_max fit (beta, eta) with the top-K peaks at their grid
/// positions, score 2 nll + penalty and take the smallest (ties: smaller K).
/// Peak amplitudes are read as beta at eta_init and seed each new target,
/// rescaled to the eta reached at the previous K.
MbicResult mbic_select(const PeakList& peaks, double eta_init, const MeasurementSet& meas, const RadarSystem& sys,
                       const Grid& grid, int k_max);

struct RefineOptions {
    int max_cycles = 50;
    double rel_tol = 1e-6;
    BoxOptions box{};
};

struct RefineResult {
    std::vector<TargetEstimate> targets;
    double eta = 1.0;
    std::vector<double> nll_trace;  // after each cycle, first entry at the start
    int cycles = 0;
    bool converged = false;
    std::vector<int> failed_blocks;  // block indices whose search threw or went non-finite

    /// Targets in data units: b = beta / eta.
    std::vector<Target> amplitudes() const;
};

/// Cyclic maximum-likelihood refinement. Block 1 (the first target, which
/// should be the strongest) is searched jointly with eta; every other block
/// holds the rest fixed. Each block is confined to
/// theta0 +- pi/(2 K_theta), omega0 +- pi/K_omega around its starting point.
RefineResult cyclic_refine(const std::vector<TargetEstimate>& initial, double eta_init, const MeasurementSet& meas,
                           const RadarSystem& sys, const Grid& grid, const RefineOptions& opts = {});

/// Greedy nearest-(theta, omega) assignment in grid-cell units.
/// Entry i is the index in `estimates` matched to truth[i], or -1.
std::vector<int> match_targets(const std::vector<Target>& truth, const std::vector<Target>& estimates, const Grid& grid);

/// True if |d theta| <= one angle cell and |d omega| (wrapped) <= one Doppler cell.
bool within_one_cell(const Target& a, const Target& b, const Grid& grid);

}  // namespace mixadc

#pragma once

#include "pdc/config.hpp"
#include "pdc/fitting.hpp"

#include <string>
#include <vector>

namespace pdc {

// One sweep point, averaged over its frames. Quantities a point does not
// measure stay NaN: difference variance needs the detected probe, and a
// speckle radius is only required for diameter sweeps (for power sweeps
// it is attempted opportunistically, since the mode-diagonal model has no
// resolvable coherence area).
struct SweepRecord {
    int index = 0;
    double value = 0.0;       // MW for power sweeps, mm for diameter sweeps
    double waist_m = 0.0;
    double gain_g = 0.0;      // nominal gain at this point
    int frames = 0;
    double mean_counts = 0.0; // region mean per pixel
    double se_mean_counts = 0.0;
    double radius_px = 0.0;
    double se_radius_px = 0.0;
    double sigma2_raw = 0.0;
    double sigma2_norm = 0.0;
    std::string diagnostic;   // empty when the row completed cleanly
};

struct SweepResult {
    std::vector<SweepRecord> records;
    FitResult fit;            // sinh2 for power, linear_shifted for diameter
    bool fit_ok = false;
    std::string fit_diagnostic;
};

// Runs every sweep point, frames_per_point frames each, with seeds derived
// from (master seed, point, frame) so results do not depend on execution
// order. Writes out_dir/sweep.csv, out_dir/fit.csv and out_dir/config.txt
// (canonical echo plus hash). Identical configurations produce
// byte-identical CSV files. An analysis failure voids the affected row
// and is recorded in its diagnostic column; the sweep carries on.
SweepResult run_sweep(const ExperimentConfig& cfg,
                      const std::string& out_dir);

// the per-point measurement without the file output, for tests
SweepResult run_sweep_in_memory(const ExperimentConfig& cfg);

std::string sweep_csv_text(const SweepResult& r);
std::string fit_csv_text(const SweepResult& r);

} // namespace pdc

#pragma once

#include "pdc/analysis.hpp"
#include "pdc/simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace pdc {

// Parameter scan over pump power (values in MW) or pump diameter
// (values in mm, full 1/e^2-intensity-like diameter = 2 * waist).
struct SweepSpec {
    enum class Kind { none, power, diameter };
    enum class GainMode { fixed_power, fixed_gain };

    Kind kind = Kind::none;
    std::vector<double> values;
    int frames_per_point = 30;
    // diameter sweeps only: fixed_power rescales the gain as the pump
    // spreads (g ~ sqrt(power)/waist), fixed_gain keeps g pinned
    GainMode gain_mode = GainMode::fixed_power;
};

// Everything one run needs, parsed from a flat key=value file. Keys carry
// their unit in the name (wp_mm, lambda_p_nm, power_MW, ...); values are
// stored in SI. echo() serializes the resolved configuration in canonical
// SI form and hash_hex() fingerprints that text, so frames can be traced
// back to the exact configuration that produced them.
struct ExperimentConfig {
    PhysicsParams physics;
    ModeGrid grid;
    SimFidelity fidelity;
    DetectorParams detector;

    double sigma_per_sqrt_mw = 1.91; // gain calibration g = sigma * sqrt(P_MW)
    double ref_waist = 0.65e-3;      // waist at which that calibration holds
    double power_jitter_rms = 0.2;   // relative pump power scatter per frame

    Region r1;                       // analysis region; auto if not given
    bool r1_explicit = false;
    int corr_window = 0;             // 0 = automatic

    SweepSpec sweep;

    std::string echo() const;
    uint64_t hash64() const;
    std::string hash_hex() const;
    void validate() const;
};

ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig read_config(const std::string& path);

} // namespace pdc

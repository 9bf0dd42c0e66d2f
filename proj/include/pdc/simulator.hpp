#pragma once

#include "pdc/array2d.hpp"
#include "pdc/grid.hpp"
#include "pdc/kernel.hpp"

#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace pdc {

// One transverse field on the mode grid, centered indexing
// (cell (iy, ix) holds q = (q_x(ix), q_y(iy))).
struct ComplexField {
    ModeGrid grid;
    ComplexArray values;
};

// Far-field intensity of one temporal mode, signal and idler separately,
// on the mode grid. For the detected probe these are Wigner intensities
// (|b|^2 - 1/2, symmetrically ordered vacuum already subtracted); for the
// generated probe they are the spontaneous intensities |S a*|^2.
struct ModeIntensity {
    RealArray signal;
    RealArray idler;
};

enum class SimModel { diagonal_bogoliubov, split_step };

// detected: both input vacua propagate, output mimics what a camera sees
//   (full quantum statistics including the vacuum floor).
// generated: only the cross-coupled vacuum is injected per output arm, so
//   the intensity contains just the down-converted light. Normalized
//   intensity correlations of this probe equal the normally-ordered ones
//   of the full field at any gain, which keeps speckle geometry measurable
//   at low gain where the vacuum floor would otherwise dominate. It does
//   not preserve signal-idler difference statistics; use the detected
//   probe for those.
enum class Probe { detected, generated };

enum class ShotNoise { round, poisson };

struct SimFidelity {
    SimModel model = SimModel::split_step;
    int n_z_steps = 32;
    int temporal_modes = 100;
    Probe probe = Probe::detected;
    uint64_t rng_seed = 1;

    void validate() const;
};

struct PhysicsParams {
    CrystalParams crystal;
    PumpParams pump;
    DetuningModel detuning;

    void validate(const ModeGrid& grid) const;
};

struct DetectorParams {
    double quantum_efficiency = 0.8;
    double read_noise_rms = 5.0;    // counts per pixel, Gaussian
    int ccd_width_px = 1340;
    int ccd_height_px = 400;
    ShotNoise integerization = ShotNoise::round;

    void validate() const;
};

struct FrameMeta {
    double gain_g = 0.0;       // gain actually used (after power jitter)
    double waist_wp = 0.0;
    double peak_power = 0.0;   // nominal pump power, W
    uint64_t seed = 0;
    std::string model;         // "diagonal" or "splitstep"
    std::string config_hash;
};

// Pixel geometry of an assembled frame: signal block in columns
// [0, block_w), idler block in [block_w, 2*block_w). Twin cells map onto
// each other by point reflection through (center_x, center_y); with one
// grid cell per pixel the doubled center is integer and the reflection is
// exact except for the Nyquist row/column of each block, whose partners
// alias off the reflected range.
struct FrameGeometry {
    ModeGrid grid;
    int cells_per_pixel = 1;
    int block_w = 0;
    int block_h = 0;
    double center_x = 0.0;
    double center_y = 0.0;
};

struct Frame {
    Array2D<int32_t> counts;   // block_h rows x 2*block_w columns
    FrameGeometry geom;
    FrameMeta meta;
};

// Continuous-valued analogue of Frame for the generated probe, which has
// no detector stage.
struct IntensityFrame {
    RealArray values;
    FrameGeometry geom;
    FrameMeta meta;
};

// Independent vacuum fields for signal and idler: every cell iid complex
// Gaussian with <|a|^2> = 1/2 (half photon per mode, symmetric ordering).
std::pair<ComplexField, ComplexField> sample_vacuum(const ModeGrid& grid,
                                                    uint64_t seed);

// Two-mode squeezing of one (q, -q) pair with effective gain g_eff >= 0:
// b_s = cosh(g)a_s + sinh(g)conj(a_i), b_i = cosh(g)a_i + sinh(g)conj(a_s).
std::pair<std::complex<double>, std::complex<double>>
bogoliubov_pair(std::complex<double> a_s, std::complex<double> a_i,
                double g_eff);

// Mode-diagonal model: each (q, -q) pair squeezed independently with
// g_eff(q) = g * sinc(delta_k l / 2). Pump of infinite width, so no mode
// coupling and delta-correlated speckle.
ModeIntensity simulate_diagonal(const PhysicsParams& phys,
                                const ModeGrid& grid,
                                const SimFidelity& fid, uint64_t seed);

// Split-step propagation through the crystal: half-step diffraction in q,
// pointwise hyperbolic coupling under the Gaussian pump in position, half
// step diffraction again. Ideal detuning runs without the diffraction
// phases. Per-step gain g/n_z must stay <= 0.2.
ModeIntensity simulate_split_step(const PhysicsParams& phys,
                                  const ModeGrid& grid,
                                  const SimFidelity& fid, uint64_t seed);

// dispatch on fid.model
ModeIntensity simulate_mode(const PhysicsParams& phys, const ModeGrid& grid,
                            const SimFidelity& fid, uint64_t seed);

// [signal | idler] side by side, plus the implied geometry
RealArray assemble_blocks(const RealArray& signal, const RealArray& idler);
FrameGeometry frame_geometry(const ModeGrid& grid);

// Camera model: sum of per-mode intensities, cell-to-pixel binning,
// integerization (round or per-pixel Poisson), binomial photon loss at
// quantum_efficiency, additive rounded Gaussian read noise, clamp at zero.
Frame detect(const std::vector<ModeIntensity>& modes, const ModeGrid& grid,
             const DetectorParams& det, uint64_t seed);

// One camera frame: temporal_modes independent mode realizations plus the
// detector chain. power_jitter_rms rescales the pump power per frame
// (g scales with sqrt of power). Requires fid.probe == detected.
Frame generate_frame(const PhysicsParams& phys, const ModeGrid& grid,
                     const SimFidelity& fid, const DetectorParams& det,
                     double power_jitter_rms, uint64_t frame_seed,
                     const std::string& config_hash);

// Same orchestration without a detector, for the generated probe.
IntensityFrame generate_intensity_frame(const PhysicsParams& phys,
                                        const ModeGrid& grid,
                                        const SimFidelity& fid,
                                        double power_jitter_rms,
                                        uint64_t frame_seed,
                                        const std::string& config_hash);

} // namespace pdc

#include "pdc/simulator.hpp"

#include "pdc/error.hpp"
#include "pdc/fft.hpp"
#include "pdc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pdc {

void SimFidelity::validate() const
{
    if (n_z_steps < 1)
        throw ConfigError("n_z_steps must be >= 1");
    if (temporal_modes < 1)
        throw ConfigError("temporal_modes must be >= 1");
}

void PhysicsParams::validate(const ModeGrid& grid) const
{
    crystal.validate();
    pump.validate();
    grid.validate();
    const double qx = 0.5 * grid.n_x * grid.dq;
    const double qy = 0.5 * grid.n_y * grid.dq;
    const double q_corner = std::sqrt(qx * qx + qy * qy);
    if (q_corner >= degenerate_wavenumber(crystal, pump))
        throw DomainError("grid corner lies outside the light cone");
}

void DetectorParams::validate() const
{
    if (!(quantum_efficiency > 0.0) || quantum_efficiency > 1.0)
        throw ConfigError("quantum_efficiency must be in (0, 1]");
    if (read_noise_rms < 0.0)
        throw ConfigError("read_noise_rms must be >= 0");
    if (ccd_width_px < 1 || ccd_height_px < 1)
        throw ConfigError("sensor dimensions must be positive");
}

std::pair<ComplexField, ComplexField> sample_vacuum(const ModeGrid& grid,
                                                    uint64_t seed)
{
    grid.validate();
    Rng rng(seed);
    ComplexField s{grid, ComplexArray(grid.n_y, grid.n_x)};
    ComplexField i{grid, ComplexArray(grid.n_y, grid.n_x)};
    // each quadrature N(0, 1/4) so that <|a|^2> = 1/2
    const double sd = 0.5;
    for (auto& v : s.values)
        v = {sd * rng.normal(), sd * rng.normal()};
    for (auto& v : i.values)
        v = {sd * rng.normal(), sd * rng.normal()};
    return {std::move(s), std::move(i)};
}

std::pair<std::complex<double>, std::complex<double>>
bogoliubov_pair(std::complex<double> a_s, std::complex<double> a_i,
                double g_eff)
{
    if (!(g_eff >= 0.0))
        throw DomainError("bogoliubov_pair: g_eff must be >= 0");
    const double ch = std::cosh(g_eff);
    const double sh = std::sinh(g_eff);
    return {ch * a_s + sh * std::conj(a_i), ch * a_i + sh * std::conj(a_s)};
}

ModeIntensity simulate_diagonal(const PhysicsParams& phys,
                                const ModeGrid& grid,
                                const SimFidelity& fid, uint64_t seed)
{
    phys.validate(grid);
    fid.validate();
    auto [vs, vi] = sample_vacuum(grid, seed);
    const int nx = grid.n_x, ny = grid.n_y;

    // gain per (q, -q) pair; the pump factor of the two-photon amplitude
    // is exactly 1 on the anti-diagonal, leaving g * sinc(delta_k l / 2).
    // The sign of sinc only rotates the squeezing phase, so its magnitude
    // carries all the intensity statistics.
    RealArray ch(ny, nx), sh(ny, nx);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            QVec q{grid.q_x(ix), grid.q_y(iy)};
            const double g_eff = std::abs(
                two_photon_amplitude(q, -q, phys.crystal, phys.pump,
                                     phys.detuning).real());
            ch(iy, ix) = std::cosh(g_eff);
            sh(iy, ix) = std::sinh(g_eff);
        }
    }

    ModeIntensity out{RealArray(ny, nx), RealArray(ny, nx)};
    for (int iy = 0; iy < ny; ++iy) {
        const int my = grid.mirror_index_y(iy);
        for (int ix = 0; ix < nx; ++ix) {
            const int mx = grid.mirror_index_x(ix);
            if (fid.probe == Probe::detected) {
                const auto bs = ch(iy, ix) * vs.values(iy, ix) +
                                sh(iy, ix) * std::conj(vi.values(my, mx));
                const auto bi = ch(iy, ix) * vi.values(iy, ix) +
                                sh(iy, ix) * std::conj(vs.values(my, mx));
                out.signal(iy, ix) = std::norm(bs) - 0.5;
                out.idler(iy, ix) = std::norm(bi) - 0.5;
            } else {
                const double s2 = sh(iy, ix) * sh(iy, ix);
                out.signal(iy, ix) = s2 * std::norm(vi.values(my, mx));
                out.idler(iy, ix) = s2 * std::norm(vs.values(my, mx));
            }
        }
    }
    return out;
}

namespace {

// cells in FFT (DC-first) order map to coordinate k*d for k < n/2,
// (k-n)*d beyond
double unshifted_coord(int k, int n, double d)
{
    return (k < n / 2 ? k : k - n) * d;
}

struct SplitStepTables {
    ComplexArray half_phase;  // diffraction over dz/2, empty when unused
    RealArray ch, sh;         // pointwise coupling over dz
    double dk0 = 0.0;
    double dz = 0.0;
    bool diffract = false;
};

SplitStepTables make_tables(const PhysicsParams& phys, const ModeGrid& grid,
                            int n_z)
{
    SplitStepTables t;
    const int nx = grid.n_x, ny = grid.n_y;
    const double l = phys.crystal.length_l;
    t.dz = l / n_z;
    t.diffract = phys.detuning.variant == Detuning::paraxial_degenerate;
    t.dk0 = t.diffract ? phys.detuning.dk0 : 0.0;

    if (t.diffract) {
        const double k_deg = degenerate_wavenumber(phys.crystal, phys.pump);
        t.half_phase = ComplexArray(ny, nx);
        for (int iy = 0; iy < ny; ++iy) {
            const double qy = unshifted_coord(iy, ny, grid.dq);
            for (int ix = 0; ix < nx; ++ix) {
                const double qx = unshifted_coord(ix, nx, grid.dq);
                const double ph = -(qx * qx + qy * qy) * t.dz /
                                  (4.0 * k_deg);
                t.half_phase(iy, ix) = std::polar(1.0, ph);
            }
        }
    }

    const double g_rate = phys.crystal.chi2_gain_g / l;
    const double wp2 = phys.pump.waist_wp * phys.pump.waist_wp;
    t.ch = RealArray(ny, nx);
    t.sh = RealArray(ny, nx);
    for (int iy = 0; iy < ny; ++iy) {
        const double y = unshifted_coord(iy, ny, grid.dy());
        for (int ix = 0; ix < nx; ++ix) {
            const double x = unshifted_coord(ix, nx, grid.dx());
            const double gamma =
                g_rate * std::exp(-(x * x + y * y) / wp2) * t.dz;
            t.ch(iy, ix) = std::cosh(gamma);
            t.sh(iy, ix) = std::sinh(gamma);
        }
    }
    return t;
}

// propagate one signal/idler pair (position space, DC-first order)
// through the crystal
void propagate(ComplexArray& as, ComplexArray& ai, const SplitStepTables& t,
               int n_z)
{
    const int n = static_cast<int>(as.size());
    for (int s = 0; s < n_z; ++s) {
        if (t.diffract) {
            fft2_unitary(as);
            fft2_unitary(ai);
            for (int i = 0; i < n; ++i) {
                as.data()[i] *= t.half_phase.data()[i];
                ai.data()[i] *= t.half_phase.data()[i];
            }
            ifft2_unitary(as);
            ifft2_unitary(ai);
        }
        const double z_mid = (s + 0.5) * t.dz;
        const std::complex<double> pump_ph =
            std::polar(1.0, t.dk0 * z_mid);
        for (int i = 0; i < n; ++i) {
            const auto s0 = as.data()[i], i0 = ai.data()[i];
            const double ch = t.ch.data()[i], sh = t.sh.data()[i];
            as.data()[i] = ch * s0 + sh * pump_ph * std::conj(i0);
            ai.data()[i] = ch * i0 + sh * pump_ph * std::conj(s0);
        }
        if (t.diffract) {
            fft2_unitary(as);
            fft2_unitary(ai);
            for (int i = 0; i < n; ++i) {
                as.data()[i] *= t.half_phase.data()[i];
                ai.data()[i] *= t.half_phase.data()[i];
            }
            ifft2_unitary(as);
            ifft2_unitary(ai);
        }
    }
}

// far field of a position-space (DC-first) field, centered layout
RealArray far_field_intensity(ComplexArray a, double vacuum_floor)
{
    fft2_unitary(a);
    fftshift2(a);
    RealArray out(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out(i, j) = std::norm(a(i, j)) - vacuum_floor;
    return out;
}

} // namespace

ModeIntensity simulate_split_step(const PhysicsParams& phys,
                                  const ModeGrid& grid,
                                  const SimFidelity& fid, uint64_t seed)
{
    phys.validate(grid);
    fid.validate();
    const double per_step = phys.crystal.chi2_gain_g / fid.n_z_steps;
    if (per_step > 0.2 + 1e-12)
        throw ConfigError("split-step gain per z step exceeds 0.2; "
                          "increase n_z_steps");

    auto [vs, vi] = sample_vacuum(grid, seed);
    // to position space, DC-first ordering throughout the propagation
    fftshift2(vs.values);
    fftshift2(vi.values);
    ifft2_unitary(vs.values);
    ifft2_unitary(vi.values);

    const SplitStepTables t = make_tables(phys, grid, fid.n_z_steps);

    if (fid.probe == Probe::detected) {
        propagate(vs.values, vi.values, t, fid.n_z_steps);
        return {far_field_intensity(std::move(vs.values), 0.5),
                far_field_intensity(std::move(vi.values), 0.5)};
    }

    // generated probe: per output arm inject only the conjugate arm's
    // vacuum, so the far field holds just the down-converted light
    ComplexArray zs(grid.n_y, grid.n_x), zi(grid.n_y, grid.n_x);
    zs.fill({0.0, 0.0});
    zi = zs;
    ComplexArray run_s = zs, run_i = vi.values;
    propagate(run_s, run_i, t, fid.n_z_steps);
    ComplexArray run2_s = vs.values, run2_i = zi;
    propagate(run2_s, run2_i, t, fid.n_z_steps);
    return {far_field_intensity(std::move(run_s), 0.0),
            far_field_intensity(std::move(run2_i), 0.0)};
}

ModeIntensity simulate_mode(const PhysicsParams& phys, const ModeGrid& grid,
                            const SimFidelity& fid, uint64_t seed)
{
    return fid.model == SimModel::diagonal_bogoliubov
               ? simulate_diagonal(phys, grid, fid, seed)
               : simulate_split_step(phys, grid, fid, seed);
}

RealArray assemble_blocks(const RealArray& signal, const RealArray& idler)
{
    if (!signal.same_shape(idler))
        throw GeometryError("assemble_blocks: mismatched block shapes");
    RealArray out(signal.rows(), 2 * signal.cols());
    for (int i = 0; i < signal.rows(); ++i) {
        for (int j = 0; j < signal.cols(); ++j) {
            out(i, j) = signal(i, j);
            out(i, j + signal.cols()) = idler(i, j);
        }
    }
    return out;
}

FrameGeometry frame_geometry(const ModeGrid& grid)
{
    FrameGeometry g;
    g.grid = grid;
    g.cells_per_pixel = 1;
    g.block_w = grid.n_x;
    g.block_h = grid.n_y;
    g.center_x = grid.n_x;
    g.center_y = grid.n_y / 2.0;
    return g;
}

Frame detect(const std::vector<ModeIntensity>& modes, const ModeGrid& grid,
             const DetectorParams& det, uint64_t seed)
{
    grid.validate();
    det.validate();
    if (modes.empty())
        throw GeometryError("detect: no mode intensities given");
    for (const auto& m : modes)
        if (m.signal.rows() != grid.n_y || m.signal.cols() != grid.n_x ||
            !m.signal.same_shape(m.idler))
            throw GeometryError("detect: mode intensity shape does not "
                                "match the grid");

    const int bin = grid.cells_per_pixel();
    if (grid.n_x % bin || grid.n_y % bin)
        throw GeometryError("detect: pixel size does not tile the grid");
    const int bw = grid.n_x / bin, bh = grid.n_y / bin;
    if (2 * bw > det.ccd_width_px || bh > det.ccd_height_px)
        throw GeometryError("detect: frame does not fit on the sensor");

    RealArray sig(bh, bw), idl(bh, bw);
    sig.fill(0.0);
    idl.fill(0.0);
    for (const auto& m : modes) {
        for (int iy = 0; iy < grid.n_y; ++iy) {
            for (int ix = 0; ix < grid.n_x; ++ix) {
                sig(iy / bin, ix / bin) += m.signal(iy, ix);
                idl(iy / bin, ix / bin) += m.idler(iy, ix);
            }
        }
    }

    Frame f;
    f.geom.grid = grid;
    f.geom.cells_per_pixel = bin;
    f.geom.block_w = bw;
    f.geom.block_h = bh;
    const double q0 = (grid.n_x / 2 + 0.5) / bin - 0.5;
    f.geom.center_x = q0 + bw / 2.0;
    f.geom.center_y = (grid.n_y / 2 + 0.5) / bin - 0.5;

    Rng rng(seed);
    f.counts = Array2D<int32_t>(bh, 2 * bw);
    auto detect_pixel = [&](double x) -> int32_t {
        // integerize; a summed Wigner intensity can dip below zero, which
        // a photon-counting stage cannot, so negatives floor at zero here
        long long k;
        if (det.integerization == ShotNoise::poisson)
            k = rng.poisson(std::max(0.0, x));
        else
            k = std::max(0LL, std::llround(x));
        if (det.quantum_efficiency < 1.0)
            k = rng.binomial(k, det.quantum_efficiency);
        if (det.read_noise_rms > 0.0)
            k += std::llround(det.read_noise_rms * rng.normal());
        return static_cast<int32_t>(std::max(0LL, k));
    };
    for (int y = 0; y < bh; ++y) {
        for (int x = 0; x < bw; ++x)
            f.counts(y, x) = detect_pixel(sig(y, x));
        for (int x = 0; x < bw; ++x)
            f.counts(y, bw + x) = detect_pixel(idl(y, x));
    }
    return f;
}

namespace {

double jittered_scale(double rms, uint64_t frame_seed)
{
    if (rms <= 0.0)
        return 1.0;
    Rng rng(derive_seed(frame_seed, 0xA001));
    // jitter acts on pump power; keep it physical (positive)
    return std::max(0.05, 1.0 + rms * rng.normal());
}

FrameMeta make_meta(const PhysicsParams& phys, const SimFidelity& fid,
                    double g_actual, uint64_t frame_seed,
                    const std::string& config_hash)
{
    FrameMeta m;
    m.gain_g = g_actual;
    m.waist_wp = phys.pump.waist_wp;
    m.peak_power = phys.pump.peak_power;
    m.seed = frame_seed;
    m.model = fid.model == SimModel::diagonal_bogoliubov ? "diagonal"
                                                         : "splitstep";
    m.config_hash = config_hash;
    return m;
}

std::vector<ModeIntensity> run_modes(const PhysicsParams& phys,
                                     const ModeGrid& grid,
                                     const SimFidelity& fid,
                                     double power_jitter_rms,
                                     uint64_t frame_seed, double* g_used)
{
    PhysicsParams p = phys;
    const double scale = jittered_scale(power_jitter_rms, frame_seed);
    p.crystal.chi2_gain_g *= std::sqrt(scale); // g grows with sqrt(power)
    *g_used = p.crystal.chi2_gain_g;

    std::vector<ModeIntensity> modes;
    modes.reserve(fid.temporal_modes);
    for (int m = 0; m < fid.temporal_modes; ++m)
        modes.push_back(
            simulate_mode(p, grid, fid, derive_seed(frame_seed, 1, m)));
    return modes;
}

} // namespace

Frame generate_frame(const PhysicsParams& phys, const ModeGrid& grid,
                     const SimFidelity& fid, const DetectorParams& det,
                     double power_jitter_rms, uint64_t frame_seed,
                     const std::string& config_hash)
{
    if (fid.probe != Probe::detected)
        throw ConfigError("generate_frame requires the detected probe; "
                          "the generated probe has no detector stage");
    double g_used = 0.0;
    auto modes = run_modes(phys, grid, fid, power_jitter_rms, frame_seed,
                           &g_used);
    Frame f = detect(modes, grid, det, derive_seed(frame_seed, 2));
    f.meta = make_meta(phys, fid, g_used, frame_seed, config_hash);
    return f;
}

IntensityFrame generate_intensity_frame(const PhysicsParams& phys,
                                        const ModeGrid& grid,
                                        const SimFidelity& fid,
                                        double power_jitter_rms,
                                        uint64_t frame_seed,
                                        const std::string& config_hash)
{
    double g_used = 0.0;
    auto modes = run_modes(phys, grid, fid, power_jitter_rms, frame_seed,
                           &g_used);
    RealArray sig(grid.n_y, grid.n_x), idl(grid.n_y, grid.n_x);
    sig.fill(0.0);
    idl.fill(0.0);
    for (const auto& m : modes) {
        for (int i = 0; i < grid.n_y; ++i) {
            for (int j = 0; j < grid.n_x; ++j) {
                sig(i, j) += m.signal(i, j);
                idl(i, j) += m.idler(i, j);
            }
        }
    }
    IntensityFrame f;
    f.values = assemble_blocks(sig, idl);
    f.geom = frame_geometry(grid);
    f.meta = make_meta(phys, fid, g_used, frame_seed, config_hash);
    return f;
}

} // namespace pdc

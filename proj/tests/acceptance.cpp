// End-to-end acceptance checks for the simulator and analysis chain. Each
// check prints one [PASS]/[FAIL] line with its measured numbers; the exit
// code is the number of failures. Tolerances are pinned next to each
// check. A failing check is reported, never silently relaxed.

#include "naive_corr.hpp"
#include "pdc/analysis.hpp"
#include "pdc/fitting.hpp"
#include "pdc/kernel.hpp"
#include "pdc/rng.hpp"
#include "pdc/simulator.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace pdc;

namespace {

constexpr uint64_t kSeedBase = 20260825;

struct Stats {
    double mean = 0.0, se = 0.0;
};

Stats mean_se(const std::vector<double>& v)
{
    Stats s;
    for (double x : v)
        s.mean += x;
    s.mean /= v.size();
    if (v.size() < 2)
        return s;
    double var = 0.0;
    for (double x : v)
        var += (x - s.mean) * (x - s.mean);
    s.se = std::sqrt(var / (v.size() - 1) / v.size());
    return s;
}

std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- 1: low-gain coherence area ----------------------------------------
// One generated-probe frame at g = 0.1, pump waist 0.65 mm, ideal
// detuning, 128x128 grid, 200 temporal modes. The auto-correlation HWHM
// in q units is compared against the pump-width prediction
// sqrt(2 ln 2)/w_p with 10% tolerance.
bool low_gain_coherence_area(std::string& detail)
{
    ModeGrid grid;
    grid.n_x = grid.n_y = 128;
    grid.dq = 430.0;
    PhysicsParams phys;
    phys.crystal.chi2_gain_g = 0.1;
    phys.pump.waist_wp = 0.65e-3;
    phys.detuning.variant = Detuning::ideal;
    SimFidelity fid;
    fid.model = SimModel::split_step;
    fid.n_z_steps = 4;
    fid.temporal_modes = 200;
    fid.probe = Probe::generated;

    const IntensityFrame f = generate_intensity_frame(
        phys, grid, fid, 0.0, derive_seed(kSeedBase, 1), "acc");
    const Region r1 = default_signal_region(f.geom);
    const CorrelationMap map = auto_correlation(f.values, r1, 14);
    const double measured = speckle_radius(map) * grid.dq;
    const double predicted = predicted_hwhm_pump(phys.pump);
    const double rel = std::abs(measured - predicted) / predicted;

    detail = fmt("auto-corr HWHM %.1f rad/m vs pump prediction %.1f rad/m, "
                 "off by %.1f%% (tolerance 10%%)",
                 measured, predicted, 100.0 * rel);
    if (rel > 0.10)
        detail += fmt("; ratio %.3f matches sqrt(2): the intensity "
                      "correlation of a gaussian-correlated field is "
                      "sqrt(2) wider than the field correlation itself",
                      measured / predicted);
    return rel <= 0.10;
}

// ---- 2: inverse-waist law ----------------------------------------------
// Diameter sweep at g = 0.1: the speckle radius against the pump diameter
// must follow a power law with exponent -1.0 +- 0.15.
bool inverse_waist_law(std::string& detail)
{
    ModeGrid grid;
    grid.n_x = grid.n_y = 128;
    grid.dq = 430.0;
    SimFidelity fid;
    fid.model = SimModel::split_step;
    fid.n_z_steps = 4;
    fid.temporal_modes = 24;
    fid.probe = Probe::generated;

    const std::vector<double> waists_mm{0.4, 0.55, 0.7, 0.85,
                                        1.0, 1.15, 1.3};
    CurveData data;
    for (size_t i = 0; i < waists_mm.size(); ++i) {
        PhysicsParams phys;
        phys.crystal.chi2_gain_g = 0.1;
        phys.pump.waist_wp = waists_mm[i] * 1e-3;
        phys.detuning.variant = Detuning::ideal;

        std::vector<double> radii;
        for (int fr = 0; fr < 4; ++fr) {
            const IntensityFrame f = generate_intensity_frame(
                phys, grid, fid, 0.0, derive_seed(kSeedBase, 2, i, fr),
                "acc");
            const Region r1 = default_signal_region(f.geom);
            radii.push_back(
                speckle_radius(auto_correlation(f.values, r1, 16)));
        }
        data.x.push_back(2.0 * waists_mm[i]); // pump diameter, mm
        data.y.push_back(mean_se(radii).mean);
    }

    const FitResult r = fit_power_law(data);
    detail = fmt("radius vs diameter exponent b = %.3f +- %.3f "
                 "(want -1.0 +- 0.15)",
                 r.params[1], r.param_errs[1]);
    return std::abs(r.params[1] + 1.0) <= 0.15;
}

// ---- 3: speckle growth with gain ---------------------------------------
// (a) at fixed waist the radius at g = 3 exceeds the radius at g = 1 by
// at least 3 combined standard errors over 30 frames each; (b) a
// fixed-power diameter sweep at high gain steepens the power law to
// b < -1, because the gain collapse away from the pump axis shrinks the
// emitting area faster than the waist alone.
bool speckle_growth_with_gain(std::string& detail)
{
    ModeGrid grid;
    grid.n_x = grid.n_y = 128;
    grid.dq = 430.0;
    SimFidelity fid;
    fid.model = SimModel::split_step;
    fid.n_z_steps = 24;
    fid.temporal_modes = 8;
    fid.probe = Probe::generated;

    auto radius_stats = [&](double g, double wp, uint64_t tag, int frames,
                            double dq) {
        ModeGrid gr = grid;
        gr.dq = dq;
        PhysicsParams phys;
        phys.crystal.chi2_gain_g = g;
        phys.pump.waist_wp = wp;
        phys.detuning.variant = Detuning::ideal;
        std::vector<double> radii;
        for (int fr = 0; fr < frames; ++fr) {
            const IntensityFrame f = generate_intensity_frame(
                phys, gr, fid, 0.0, derive_seed(kSeedBase, 3, tag, fr),
                "acc");
            const Region r1 = default_signal_region(f.geom);
            radii.push_back(
                speckle_radius(auto_correlation(f.values, r1, 18)));
        }
        return mean_se(radii);
    };

    const Stats r1 = radius_stats(1.0, 0.65e-3, 10, 30, 430.0);
    const Stats r3 = radius_stats(3.0, 0.65e-3, 30, 30, 430.0);
    const double sep = (r3.mean - r1.mean) /
                       std::sqrt(r1.se * r1.se + r3.se * r3.se);
    const bool grew = r3.mean > r1.mean && sep >= 3.0;

    // fixed pump power: g = 3 at 0.65 mm waist, rescaled as 1/waist
    const std::vector<double> diam_mm{1.0, 1.3, 1.6, 2.0};
    CurveData data;
    for (size_t i = 0; i < diam_mm.size(); ++i) {
        const double wp = 0.5 * diam_mm[i] * 1e-3;
        const double g = 3.0 * 0.65e-3 / wp;
        std::vector<double> radii;
        for (int fr = 0; fr < 4; ++fr)
            radii.push_back(radius_stats(g, wp, 100 + 10 * i + fr, 1,
                                         600.0)
                                .mean);
        data.x.push_back(diam_mm[i]);
        data.y.push_back(mean_se(radii).mean);
    }
    const FitResult fit = fit_power_law(data);
    const bool steep = fit.params[1] < -1.0;

    detail = fmt("radius %.2f+-%.2f px at g=1 vs %.2f+-%.2f px at g=3 "
                 "(%.1f sigma apart, want >= 3); fixed-power exponent "
                 "b = %.3f (want < -1)",
                 r1.mean, r1.se, r3.mean, r3.se, sep, fit.params[1]);
    return grew && steep;
}

// ---- 4: gain curve from counts vs power --------------------------------
// Diagonal model, detected probe, 30 frames per power: fit_sinh2 on mean
// counts vs pump power must return sigma within 5% of the 1.91 gain
// calibration and k within 10% of eta * temporal modes.
bool gain_curve_recovery(std::string& detail)
{
    ModeGrid grid;
    grid.n_x = grid.n_y = 64;
    grid.dq = grid.pixel_q_increment();
    SimFidelity fid;
    fid.model = SimModel::diagonal_bogoliubov;
    fid.temporal_modes = 100;
    DetectorParams det; // defaults: eta 0.8, read noise 5
    const double sigma_cfg = 1.91;

    const std::vector<double> powers{0.1, 0.25, 0.45, 0.7, 0.95, 1.2};
    CurveData data;
    for (size_t i = 0; i < powers.size(); ++i) {
        PhysicsParams phys;
        phys.detuning.variant = Detuning::ideal;
        phys.pump.peak_power = powers[i] * 1e6;
        phys.crystal.chi2_gain_g = sigma_cfg * std::sqrt(powers[i]);

        std::vector<double> counts;
        for (int fr = 0; fr < 30; ++fr) {
            const Frame f =
                generate_frame(phys, grid, fid, det, 0.0,
                               derive_seed(kSeedBase, 4, i, fr), "acc");
            const RealArray img = to_real(f);
            counts.push_back(testing_support::region_mean(
                img, default_signal_region(f.geom)));
        }
        const Stats s = mean_se(counts);
        data.x.push_back(powers[i]);
        data.y.push_back(s.mean);
        data.y_err.push_back(s.se);
    }

    const FitResult r = fit_sinh2(data);
    const double k_true = det.quantum_efficiency * fid.temporal_modes;
    const double dk = std::abs(r.params[0] - k_true) / k_true;
    const double ds = std::abs(r.params[1] - sigma_cfg) / sigma_cfg;
    detail = fmt("k = %.2f (want %.0f +- 10%%), sigma = %.4f "
                 "(want %.2f +- 5%%)",
                 r.params[0], k_true, r.params[1], sigma_cfg);
    return dk <= 0.10 && ds <= 0.05;
}

// ---- 5: fit-routine regression on exact generators ----------------------
bool fit_regressions(std::string& detail)
{
    bool ok = true;
    std::string parts;

    auto check = [&](const char* tag, double got, double want, double tol) {
        const double rel =
            std::abs(got - want) / std::max(std::abs(want), 1e-300);
        if (rel > tol) {
            ok = false;
            parts += fmt(" %s=%.6g (want %.6g)", tag, got, want);
        }
    };

    for (const auto& [k, sig] : std::vector<std::pair<double, double>>{
             {31.48, 1.91}, {1.10, 4.87}}) {
        CurveData d;
        for (double x : {0.02, 0.05, 0.09, 0.14, 0.2, 0.28, 0.4, 0.55}) {
            d.x.push_back(x);
            const double s = std::sinh(sig * std::sqrt(x));
            d.y.push_back(k * s * s);
        }
        const FitResult r = fit_sinh2(d);
        check("sinh2.k", r.params[0], k, 5e-3);
        check("sinh2.sigma", r.params[1], sig, 5e-3);
    }

    for (const auto& [a, b] : std::vector<std::pair<double, double>>{
             {1.25, -0.63}, {3.7, -0.27}}) {
        CurveData d;
        for (double x : {0.5, 1.0, 2.0, 3.0, 5.0}) {
            d.x.push_back(x);
            d.y.push_back(a * (x - b));
        }
        const FitResult r = fit_linear_shifted(d);
        check("line.a", r.params[0], a, 1e-12);
        check("line.b", r.params[1], b, 1e-12);
    }

    for (const auto& [a, b] : std::vector<std::pair<double, double>>{
             {8.1, -3.61}, {3.22, -3.73}}) {
        CurveData d;
        for (double x : {0.5, 0.8, 1.3, 2.1, 3.4}) {
            d.x.push_back(x);
            d.y.push_back(a * std::pow(x, b));
        }
        const FitResult r = fit_power_law(d);
        check("pow.a", r.params[0], a, 1e-12);
        check("pow.b", r.params[1], b, 1e-12);
    }

    detail = ok ? "six reference parameter sets recovered (0.5% nonlinear, "
                  "1e-12 closed form)"
                : "mismatches:" + parts;
    return ok;
}

// ---- 6: correlation estimator vs direct summation -----------------------
bool estimator_oracle(std::string& detail)
{
    using testing_support::naive_auto;
    using testing_support::naive_cross;

    const RealArray img = testing_support::noise_image(40, 80, 616);
    const Region r1{3, 2, 32, 32};
    const Center2 c2{79, 41};
    const Region r2 = mirror_region(r1, c2);
    const int w = 6;

    double worst = 0.0;
    bool bounds = true;

    const CorrelationMap cm = cross_correlation(img, r1, r2, c2, w);
    RealArray ref;
    Array2D<int> cnt;
    naive_cross(img, r1, r2, c2, w, ref, cnt);
    for (int i = 0; i < 2 * w + 1; ++i) {
        for (int j = 0; j < 2 * w + 1; ++j) {
            if (cnt(i, j) == 0)
                continue;
            const double err = std::abs(cm.values(i, j) - ref(i, j)) /
                               std::max(1.0, std::abs(ref(i, j)));
            worst = std::max(worst, err);
            bounds = bounds && cm.values(i, j) >= -1.0 &&
                     cm.values(i, j) <= 1.0;
        }
    }

    const Region ra{4, 3, 32, 32};
    const CorrelationMap am = auto_correlation(img, ra, w);
    naive_auto(img, ra, w, ref, cnt);
    for (int i = 0; i < 2 * w + 1; ++i) {
        for (int j = 0; j < 2 * w + 1; ++j) {
            if (cnt(i, j) == 0)
                continue;
            if (i == w && j == w)
                continue; // pinned zero lag checked separately
            const double err = std::abs(am.values(i, j) - ref(i, j)) /
                               std::max(1.0, std::abs(ref(i, j)));
            worst = std::max(worst, err);
            bounds = bounds && am.values(i, j) >= -1.0 &&
                     am.values(i, j) <= 1.0;
        }
    }
    const bool zero_lag = am.at(0, 0) == 1.0;

    detail = fmt("max deviation from direct sums %.2e (tolerance 1e-10), "
                 "zero lag %s 1, values %swithin [-1, 1]",
                 worst, zero_lag ? "==" : "!=", bounds ? "" : "NOT ");
    return worst <= 1e-10 && zero_lag && bounds;
}

// ---- 7: twin-beam correlation and difference squeezing -------------------
bool twin_beam_correlation(std::string& detail)
{
    ModeGrid grid;
    grid.n_x = grid.n_y = 128;
    grid.dq = grid.pixel_q_increment();
    PhysicsParams phys;
    phys.detuning.variant = Detuning::ideal;
    phys.crystal.chi2_gain_g = 1.5;
    SimFidelity fid;
    fid.model = SimModel::diagonal_bogoliubov;
    fid.temporal_modes = 100;

    DetectorParams ideal;
    ideal.quantum_efficiency = 1.0;
    ideal.read_noise_rms = 0.0;
    const Frame fa = generate_frame(phys, grid, fid, ideal, 0.0,
                                    derive_seed(kSeedBase, 7, 1), "acc");
    const CorrelationMap ma = cross_correlation(fa, 8);
    const SsnResult sa = ssn_sigma(fa);

    DetectorParams real;
    real.quantum_efficiency = 0.8;
    real.read_noise_rms = 5.0;
    const Frame fb = generate_frame(phys, grid, fid, real, 0.0,
                                    derive_seed(kSeedBase, 7, 2), "acc");
    const CorrelationMap mb = cross_correlation(fb, 8);

    const bool lossless_ok = ma.peak_dx == 0 && ma.peak_dy == 0 &&
                             ma.peak_value >= 0.95 && sa.normalized < 0.1;
    const bool degraded_ok =
        mb.peak_value >= 0.75 && mb.peak_value <= 0.98;

    detail = fmt("lossless: peak %.3f at (%d,%d), sigma2/<N> = %.4f; "
                 "eta 0.8 + read noise 5: peak %.3f (band [0.75, 0.98])",
                 ma.peak_value, ma.peak_dx, ma.peak_dy, sa.normalized,
                 mb.peak_value);
    return lossless_ok && degraded_ok;
}

// ---- 8: simulator invariants --------------------------------------------
bool simulator_invariants(std::string& detail)
{
    // hyperbolic identity across the working gain range
    double worst_id = 0.0;
    for (double g = 0.0; g <= 3.0; g += 0.125) {
        const double c = std::cosh(g), s = std::sinh(g);
        worst_id = std::max(
            worst_id, std::abs(c * c - s * s - 1.0) / std::max(1.0, c * c));
    }
    const bool identity_ok = worst_id <= 1e-12;

    // bit-identical frames from identical seeds
    ModeGrid grid;
    grid.n_x = grid.n_y = 64;
    grid.dq = grid.pixel_q_increment();
    PhysicsParams phys;
    phys.detuning.variant = Detuning::ideal;
    phys.crystal.chi2_gain_g = 1.0;
    SimFidelity fid;
    fid.model = SimModel::split_step;
    fid.n_z_steps = 8;
    fid.temporal_modes = 10;
    DetectorParams det;
    const uint64_t seed = derive_seed(kSeedBase, 8, 1);
    const Frame f1 = generate_frame(phys, grid, fid, det, 0.2, seed, "acc");
    const Frame f2 = generate_frame(phys, grid, fid, det, 0.2, seed, "acc");
    const Frame f3 =
        generate_frame(phys, grid, fid, det, 0.2, seed + 1, "acc");
    const bool deterministic =
        f1.counts == f2.counts && !(f1.counts == f3.counts);

    // with an effectively infinite pump the split-step model reduces to
    // the mode-diagonal one
    ModeGrid mg;
    mg.n_x = mg.n_y = 64;
    mg.dq = 430.0;
    PhysicsParams flat;
    flat.crystal.chi2_gain_g = 0.5;
    flat.pump.waist_wp = 1.0;
    flat.detuning.variant = Detuning::ideal;
    SimFidelity fd = fid;
    fd.model = SimModel::diagonal_bogoliubov;
    SimFidelity fs = fid;
    fs.model = SimModel::split_step;
    fs.n_z_steps = 4;
    auto grid_mean = [](const RealArray& a) {
        double s = 0.0;
        for (double v : a)
            s += v;
        return s / a.size();
    };
    double md = 0.0, ms = 0.0;
    for (int m = 0; m < 40; ++m) {
        md += grid_mean(
            simulate_diagonal(flat, mg, fd, derive_seed(kSeedBase, 8, 2, m))
                .signal);
        ms += grid_mean(simulate_split_step(
                            flat, mg, fs, derive_seed(kSeedBase, 8, 3, m))
                            .signal);
    }
    const double agree = std::abs(md - ms) / md;
    const bool models_agree = agree <= 0.05;

    // z-step convergence at g = 3 with diffraction in play
    ModeGrid cg;
    cg.n_x = cg.n_y = 64;
    cg.dq = 3000.0;
    PhysicsParams hp;
    hp.crystal.chi2_gain_g = 3.0;
    hp.pump.waist_wp = 0.65e-3;
    hp.detuning.variant = Detuning::paraxial_degenerate;
    auto mean_at = [&](int nz) {
        SimFidelity f = fid;
        f.model = SimModel::split_step;
        f.n_z_steps = nz;
        double acc = 0.0;
        for (int m = 0; m < 30; ++m) {
            const ModeIntensity mi = simulate_split_step(
                hp, cg, f, derive_seed(kSeedBase, 8, 4, m));
            acc += grid_mean(mi.signal) + grid_mean(mi.idler);
        }
        return acc;
    };
    const double m24 = mean_at(24);
    const double m48 = mean_at(48);
    const double dz_change = std::abs(m24 - m48) / m48;
    const bool converged = dz_change < 0.01;

    detail = fmt("cosh^2-sinh^2 off by %.1e; frames %s; flat-pump models "
                 "differ %.2f%%; doubling z-steps at g=3 moves the mean "
                 "%.3f%% (want < 1%%)",
                 worst_id,
                 deterministic ? "reproduce bit-exactly" : "DIFFER",
                 100.0 * agree, 100.0 * dz_change);
    return identity_ok && deterministic && models_agree && converged;
}

} // namespace

int main()
{
    struct Item {
        const char* name;
        std::function<bool(std::string&)> run;
    };
    const std::vector<Item> items{
        {"low-gain coherence area", low_gain_coherence_area},
        {"inverse-waist law", inverse_waist_law},
        {"speckle growth with gain", speckle_growth_with_gain},
        {"gain curve from counts vs power", gain_curve_recovery},
        {"fit regressions on exact generators", fit_regressions},
        {"correlation estimator vs direct sums", estimator_oracle},
        {"twin-beam correlation and squeezing", twin_beam_correlation},
        {"simulator invariants", simulator_invariants},
    };

    int failures = 0;
    for (size_t i = 0; i < items.size(); ++i) {
        std::string detail;
        bool pass = false;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            pass = items[i].run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double dt =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          t0)
                .count();
        std::printf("[%s] %zu. %s: %s (%.1fs)\n", pass ? "PASS" : "FAIL",
                    i + 1, items[i].name, detail.c_str(), dt);
        std::fflush(stdout);
        if (!pass)
            ++failures;
    }
    std::printf("%zu/%zu acceptance checks passed\n",
                items.size() - failures, items.size());
    return failures;
}

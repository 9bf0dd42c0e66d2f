#include "pdc/sweep.hpp"

#include "pdc/analysis.hpp"
#include "pdc/error.hpp"
#include "pdc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

namespace pdc {
namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

struct Stats {
    double mean = kNan, se = kNan;
};

Stats mean_se(const std::vector<double>& v)
{
    Stats s;
    if (v.empty())
        return s;
    double m = 0.0;
    for (double x : v)
        m += x;
    m /= v.size();
    s.mean = m;
    if (v.size() < 2) {
        s.se = 0.0;
        return s;
    }
    double var = 0.0;
    for (double x : v)
        var += (x - m) * (x - m);
    var /= v.size() - 1;
    s.se = std::sqrt(var / v.size());
    return s;
}

double region_mean(const RealArray& img, const Region& r)
{
    double sum = 0.0;
    for (int row = r.y; row < r.y + r.h; ++row)
        for (int col = r.x; col < r.x + r.w; ++col)
            sum += img(row, col);
    return sum / (static_cast<double>(r.w) * r.h);
}

// physics for one sweep point
PhysicsParams point_physics(const ExperimentConfig& cfg, double value)
{
    PhysicsParams p = cfg.physics;
    if (cfg.sweep.kind == SweepSpec::Kind::power) {
        p.pump.peak_power = value * 1e6;
        p.crystal.chi2_gain_g = cfg.sigma_per_sqrt_mw * std::sqrt(value);
    } else if (cfg.sweep.kind == SweepSpec::Kind::diameter) {
        const double waist = 0.5 * value * 1e-3;
        p.pump.waist_wp = waist;
        if (cfg.sweep.gain_mode == SweepSpec::GainMode::fixed_power) {
            const double p_mw = cfg.physics.pump.peak_power / 1e6;
            p.crystal.chi2_gain_g = cfg.sigma_per_sqrt_mw *
                                    std::sqrt(p_mw) * cfg.ref_waist / waist;
        }
    }
    return p;
}

std::string sanitize(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

SweepResult run_sweep_in_memory(const ExperimentConfig& cfg)
{
    if (cfg.sweep.kind == SweepSpec::Kind::none)
        throw ConfigError("configuration defines no sweep");
    cfg.validate();

    const bool detected = cfg.fidelity.probe == Probe::detected;
    const bool want_radius =
        cfg.sweep.kind == SweepSpec::Kind::diameter ||
        cfg.fidelity.model == SimModel::split_step;
    const bool radius_required = cfg.sweep.kind == SweepSpec::Kind::diameter;
    const std::string hash = cfg.hash_hex();

    SweepResult out;
    for (size_t pi = 0; pi < cfg.sweep.values.size(); ++pi) {
        SweepRecord rec;
        rec.index = static_cast<int>(pi);
        rec.value = cfg.sweep.values[pi];
        rec.frames = cfg.sweep.frames_per_point;

        const PhysicsParams phys = point_physics(cfg, rec.value);
        rec.waist_m = phys.pump.waist_wp;
        rec.gain_g = phys.crystal.chi2_gain_g;

        std::vector<double> counts, radii, s2raw, s2norm;
        bool aborted = false;
        for (int fi = 0; fi < cfg.sweep.frames_per_point && !aborted; ++fi) {
            const uint64_t seed = derive_seed(cfg.fidelity.rng_seed,
                                              static_cast<uint64_t>(pi),
                                              static_cast<uint64_t>(fi), 1);
            RealArray img;
            FrameGeometry geom;
            if (detected) {
                Frame f = generate_frame(phys, cfg.grid, cfg.fidelity,
                                         cfg.detector, cfg.power_jitter_rms,
                                         seed, hash);
                img = to_real(f);
                geom = f.geom;
            } else {
                IntensityFrame f = generate_intensity_frame(
                    phys, cfg.grid, cfg.fidelity, cfg.power_jitter_rms,
                    seed, hash);
                img = std::move(f.values);
                geom = f.geom;
            }

            const Region r1 =
                cfg.r1_explicit ? cfg.r1 : default_signal_region(geom);
            try {
                counts.push_back(region_mean(img, r1));
                if (want_radius) {
                    try {
                        const auto map =
                            auto_correlation(img, r1, cfg.corr_window);
                        radii.push_back(speckle_radius(map));
                    } catch (const AnalysisError&) {
                        if (radius_required)
                            throw;
                        // opportunistic radius; note once and move on
                        if (rec.diagnostic.empty())
                            rec.diagnostic = "no resolvable coherence area";
                    }
                }
                if (detected) {
                    const Center2 c2 = doubled_center(geom);
                    const auto s =
                        ssn_sigma(img, r1, mirror_region(r1, c2), c2);
                    s2raw.push_back(s.sigma2);
                    s2norm.push_back(s.normalized);
                }
            } catch (const AnalysisError& e) {
                rec.diagnostic = std::string("frame ") +
                                 std::to_string(fi) + ": " + e.what();
                aborted = true;
            }
        }

        if (aborted) {
            rec.mean_counts = rec.se_mean_counts = kNan;
            rec.radius_px = rec.se_radius_px = kNan;
            rec.sigma2_raw = rec.sigma2_norm = kNan;
        } else {
            const Stats c = mean_se(counts);
            rec.mean_counts = c.mean;
            rec.se_mean_counts = c.se;
            const Stats r = mean_se(radii);
            rec.radius_px = r.mean;
            rec.se_radius_px = r.se;
            const Stats a = mean_se(s2raw);
            const Stats b = mean_se(s2norm);
            rec.sigma2_raw = a.mean;
            rec.sigma2_norm = b.mean;
        }
        out.records.push_back(std::move(rec));
    }

    // matching fit: counts vs power, or inverse radius vs diameter
    CurveData data;
    for (const auto& r : out.records) {
        if (!r.diagnostic.empty() && std::isnan(r.mean_counts))
            continue;
        if (cfg.sweep.kind == SweepSpec::Kind::power) {
            if (std::isnan(r.mean_counts))
                continue;
            data.x.push_back(r.value);
            data.y.push_back(r.mean_counts);
            data.y_err.push_back(r.se_mean_counts);
        } else {
            if (std::isnan(r.radius_px))
                continue;
            data.x.push_back(r.value);
            data.y.push_back(1.0 / r.radius_px);
            data.y_err.push_back(r.se_radius_px / (r.radius_px * r.radius_px));
        }
    }
    if (!data.y_err.empty() &&
        *std::min_element(data.y_err.begin(), data.y_err.end()) <= 0.0)
        data.y_err.clear(); // single-frame points have no scatter estimate
    try {
        out.fit = cfg.sweep.kind == SweepSpec::Kind::power
                      ? fit_sinh2(data)
                      : fit_linear_shifted(data);
        out.fit_ok = true;
    } catch (const FitError& e) {
        out.fit_ok = false;
        out.fit_diagnostic = e.what();
    }
    return out;
}

std::string sweep_csv_text(const SweepResult& r)
{
    std::string s = "index,value,waist_m,gain_g,frames,mean_counts,"
                    "se_mean_counts,radius_px,se_radius_px,sigma2_raw,"
                    "sigma2_norm,diagnostic\n";
    for (const auto& rec : r.records) {
        s += std::to_string(rec.index) + ',' + fmt(rec.value) + ',' +
             fmt(rec.waist_m) + ',' + fmt(rec.gain_g) + ',' +
             std::to_string(rec.frames) + ',' + fmt(rec.mean_counts) + ',' +
             fmt(rec.se_mean_counts) + ',' + fmt(rec.radius_px) + ',' +
             fmt(rec.se_radius_px) + ',' + fmt(rec.sigma2_raw) + ',' +
             fmt(rec.sigma2_norm) + ',' + sanitize(rec.diagnostic) + '\n';
    }
    return s;
}

std::string fit_csv_text(const SweepResult& r)
{
    if (!r.fit_ok)
        return "model,n_points,residual_rms,param,value,stderr,diagnostic\n"
               ",,,,,," +
               sanitize(r.fit_diagnostic) + '\n';
    return fit_result_csv(r.fit);
}

SweepResult run_sweep(const ExperimentConfig& cfg, const std::string& out_dir)
{
    SweepResult res = run_sweep_in_memory(cfg);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec)
        throw IoError("cannot create output directory '" + out_dir + "'");

    auto write = [&](const std::string& name, const std::string& text) {
        const std::string path = out_dir + "/" + name;
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        out << text;
        if (!out)
            throw IoError("write failed for '" + path + "'");
    };
    write("sweep.csv", sweep_csv_text(res));
    write("fit.csv", fit_csv_text(res));
    write("config.txt", cfg.echo() + "hash=" + cfg.hash_hex() + "\n");
    return res;
}

} // namespace pdc

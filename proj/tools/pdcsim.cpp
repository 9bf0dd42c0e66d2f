#include "pdc/analysis.hpp"
#include "pdc/config.hpp"
#include "pdc/error.hpp"
#include "pdc/fitting.hpp"
#include "pdc/frame_io.hpp"
#include "pdc/rng.hpp"
#include "pdc/sweep.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

pdc::Region parse_region(const std::string& spec)
{
    int v[4];
    char tail;
    if (std::sscanf(spec.c_str(), "%d,%d,%d,%d%c", &v[0], &v[1], &v[2],
                    &v[3], &tail) != 4)
        throw pdc::ConfigError("region must be 'x,y,w,h', got '" + spec +
                               "'");
    return {v[0], v[1], v[2], v[3]};
}

void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw pdc::IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out)
        throw pdc::IoError("write failed for '" + path + "'");
}

int cmd_simulate(const std::string& cfg_path, const std::string& out_dir,
                 int frames, uint64_t seed, bool seed_set)
{
    pdc::ExperimentConfig cfg = pdc::read_config(cfg_path);
    if (seed_set)
        cfg.fidelity.rng_seed = seed;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw pdc::IoError("cannot create output directory '" + out_dir +
                           "'");

    const std::string hash = cfg.hash_hex();
    for (int f = 0; f < frames; ++f) {
        const pdc::Frame frame = pdc::generate_frame(
            cfg.physics, cfg.grid, cfg.fidelity, cfg.detector,
            cfg.power_jitter_rms, pdc::derive_seed(cfg.fidelity.rng_seed, f),
            hash);
        char name[32];
        std::snprintf(name, sizeof name, "frame_%04d.pgm", f);
        pdc::write_frame(frame, out_dir + "/" + name);
    }
    write_text(out_dir + "/config.txt", cfg.echo() + "hash=" + hash + "\n");
    std::cout << "wrote " << frames << " frame(s) to " << out_dir
              << " (config " << hash << ")\n";
    return 0;
}

int cmd_analyze(const std::string& frames_dir, const std::string& r1_spec,
                const std::string& r2_spec, int window,
                const std::string& out_csv)
{
    std::vector<std::string> paths;
    if (fs::is_directory(frames_dir)) {
        for (const auto& e : fs::directory_iterator(frames_dir))
            if (e.path().extension() == ".pgm")
                paths.push_back(e.path().string());
        std::sort(paths.begin(), paths.end());
    } else if (fs::exists(frames_dir)) {
        paths.push_back(frames_dir);
    }
    if (paths.empty())
        throw pdc::IoError("no .pgm frames under '" + frames_dir + "'");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::string csv =
        "frame,gain_g,mean_r1,mean_r2,peak_c12,peak_dx,peak_dy,"
        "radius_px,sigma2_raw,sigma2_norm,diagnostic\n";
    for (const auto& p : paths) {
        const pdc::Frame f = pdc::read_frame(p);
        const pdc::RealArray img = pdc::to_real(f);
        const pdc::Center2 c2 = pdc::doubled_center(f.geom);
        const pdc::Region r1 = r1_spec.empty()
                                   ? pdc::default_signal_region(f.geom)
                                   : parse_region(r1_spec);
        const pdc::Region r2 = r2_spec.empty()
                                   ? pdc::mirror_region(r1, c2)
                                   : parse_region(r2_spec);

        auto rmean = [&](const pdc::Region& r) {
            double s = 0.0;
            for (int row = r.y; row < r.y + r.h; ++row)
                for (int col = r.x; col < r.x + r.w; ++col)
                    s += img(row, col);
            return s / (static_cast<double>(r.w) * r.h);
        };

        double peak = nan, radius = nan, s2 = nan, s2n = nan;
        int pdx = 0, pdy = 0;
        std::string diag;
        try {
            const auto cmap =
                pdc::cross_correlation(img, r1, r2, c2, window);
            peak = cmap.peak_value;
            pdx = cmap.peak_dx;
            pdy = cmap.peak_dy;
        } catch (const pdc::AnalysisError& e) {
            diag = e.what();
        }
        try {
            radius =
                pdc::speckle_radius(pdc::auto_correlation(img, r1, window));
        } catch (const pdc::AnalysisError& e) {
            if (diag.empty())
                diag = e.what();
        }
        try {
            const auto s = pdc::ssn_sigma(img, r1, r2, c2);
            s2 = s.sigma2;
            s2n = s.normalized;
        } catch (const pdc::AnalysisError& e) {
            if (diag.empty())
                diag = e.what();
        }
        std::replace(diag.begin(), diag.end(), ',', ';');

        csv += fs::path(p).filename().string() + ',' + fmt(f.meta.gain_g) +
               ',' + fmt(rmean(r1)) + ',' + fmt(rmean(r2)) + ',' +
               fmt(peak) + ',' + std::to_string(pdx) + ',' +
               std::to_string(pdy) + ',' + fmt(radius) + ',' + fmt(s2) +
               ',' + fmt(s2n) + ',' + diag + '\n';
    }
    write_text(out_csv, csv);
    std::cout << "analyzed " << paths.size() << " frame(s) -> " << out_csv
              << "\n";
    return 0;
}

pdc::CurveData read_curve_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw pdc::IoError("cannot open '" + path + "'");

    auto split = [](const std::string& line) {
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string item;
        while (std::getline(ss, item, ','))
            f.push_back(item);
        return f;
    };
    auto numeric = [](const std::string& s, double* out) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || end != s.c_str() + s.size())
            return false;
        *out = v;
        return true;
    };

    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!line.empty())
            rows.push_back(split(line));
    }
    if (rows.empty())
        throw pdc::IoError("'" + path + "' holds no data");

    // columns named x,y(,yerr) if there is a header, else the first
    // two or three columns
    int cx = 0, cy = 1, ce = -1;
    size_t first = 0;
    double probe;
    if (!numeric(rows[0][0], &probe)) {
        first = 1;
        cx = cy = -1;
        for (size_t j = 0; j < rows[0].size(); ++j) {
            if (rows[0][j] == "x")
                cx = static_cast<int>(j);
            else if (rows[0][j] == "y")
                cy = static_cast<int>(j);
            else if (rows[0][j] == "yerr")
                ce = static_cast<int>(j);
        }
        if (cx < 0 || cy < 0)
            throw pdc::IoError("'" + path +
                               "' needs columns named x and y (and "
                               "optionally yerr)");
    } else if (rows[0].size() > 2) {
        ce = 2;
    }

    pdc::CurveData d;
    for (size_t i = first; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const size_t need =
            static_cast<size_t>(std::max(cx, std::max(cy, ce))) + 1;
        if (r.size() < need)
            throw pdc::IoError(path + ": row " + std::to_string(i + 1) +
                               " is short");
        double x, y, e = 0.0;
        if (!numeric(r[cx], &x) || !numeric(r[cy], &y) ||
            (ce >= 0 && !numeric(r[ce], &e)))
            throw pdc::IoError(path + ": row " + std::to_string(i + 1) +
                               " is not numeric");
        d.x.push_back(x);
        d.y.push_back(y);
        if (ce >= 0)
            d.y_err.push_back(e);
    }
    return d;
}

int cmd_fit(const std::string& model, const std::string& in_csv,
            const std::string& out_csv)
{
    const pdc::CurveData data = read_curve_csv(in_csv);
    pdc::FitResult res;
    if (model == "sinh2")
        res = pdc::fit_sinh2(data);
    else if (model == "linear")
        res = pdc::fit_linear_shifted(data);
    else if (model == "powerlaw")
        res = pdc::fit_power_law(data);
    else
        throw pdc::ConfigError("unknown fit model '" + model + "'");

    write_text(out_csv, pdc::fit_result_csv(res));
    std::cout << res.model_id << ":";
    for (size_t i = 0; i < res.params.size(); ++i)
        std::cout << ' ' << res.param_names[i] << '=' << fmt(res.params[i])
                  << "(" << fmt(res.param_errs[i]) << ")";
    std::cout << " rms=" << fmt(res.residual_rms) << "\n";
    return 0;
}

int cmd_sweep(const std::string& cfg_path, const std::string& out_dir)
{
    const pdc::ExperimentConfig cfg = pdc::read_config(cfg_path);
    const pdc::SweepResult res = pdc::run_sweep(cfg, out_dir);
    std::cout << "swept " << res.records.size() << " point(s) -> "
              << out_dir << "\n";
    if (res.fit_ok) {
        std::cout << "fit " << res.fit.model_id << ":";
        for (size_t i = 0; i < res.fit.params.size(); ++i)
            std::cout << ' ' << res.fit.param_names[i] << '='
                      << fmt(res.fit.params[i]);
        std::cout << "\n";
    } else {
        std::cout << "fit failed: " << res.fit_diagnostic << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"twin-beam speckle simulator and analysis toolkit"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir = "out", frames_dir, out_csv;
    std::string r1_spec, r2_spec, model, in_csv;
    int frames = 1, window = 0;
    uint64_t seed = 0;

    auto* sim = app.add_subcommand("simulate", "generate camera frames");
    sim->add_option("--config", cfg_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sim->add_option("--out", out_dir, "output directory");
    sim->add_option("--frames", frames, "number of frames")
        ->check(CLI::PositiveNumber);
    auto* seed_opt =
        sim->add_option("--seed", seed, "override the configured seed");

    auto* ana = app.add_subcommand("analyze", "correlation analysis of "
                                              "stored frames");
    ana->add_option("--frames", frames_dir, "frame directory or file")
        ->required();
    ana->add_option("--r1", r1_spec, "signal region x,y,w,h (default: "
                                     "full signal block)");
    ana->add_option("--r2", r2_spec, "idler region x,y,w,h (default: "
                                     "mirror of r1)");
    ana->add_option("--window", window, "correlation window half width");
    ana->add_option("--out", out_csv, "output CSV")->required();

    auto* fit = app.add_subcommand("fit", "fit a model to CSV data");
    fit->add_option("--model", model, "sinh2, linear or powerlaw")
        ->required();
    fit->add_option("--in", in_csv, "input CSV with x,y(,yerr)")
        ->required()
        ->check(CLI::ExistingFile);
    fit->add_option("--out", out_csv, "output CSV")->required();

    auto* swp = app.add_subcommand("sweep", "run a configured parameter "
                                            "sweep");
    swp->add_option("--config", cfg_path, "configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    swp->add_option("--out", out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sim->parsed())
            return cmd_simulate(cfg_path, out_dir, frames, seed,
                                seed_opt->count() > 0);
        if (ana->parsed())
            return cmd_analyze(frames_dir, r1_spec, r2_spec, window,
                               out_csv);
        if (fit->parsed())
            return cmd_fit(model, in_csv, out_csv);
        if (swp->parsed())
            return cmd_sweep(cfg_path, out_dir);
    } catch (const pdc::Error& e) {
        std::cerr << "error[" << pdc::category_name(e.category())
                  << "]: " << e.what() << "\n";
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

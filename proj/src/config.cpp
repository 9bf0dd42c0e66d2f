#include "pdc/config.hpp"

#include "pdc/error.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace pdc {
namespace {

std::string trim(const std::string& s)
{
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b])))
        ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1])))
        --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& msg)
{
    throw ConfigError("line " + std::to_string(line) + ": " + msg);
}

double parse_num(const std::string& v, int line)
{
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty())
        fail(line, "cannot parse number '" + v + "'");
    return d;
}

int parse_int(const std::string& v, int line)
{
    const double d = parse_num(v, line);
    const int i = static_cast<int>(d);
    if (d != i)
        fail(line, "expected an integer, got '" + v + "'");
    return i;
}

uint64_t parse_u64(const std::string& v, int line)
{
    char* end = nullptr;
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size() || v.empty())
        fail(line, "cannot parse unsigned integer '" + v + "'");
    return u;
}

std::vector<double> parse_list(const std::string& v, int line)
{
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_num(trim(item), line));
    if (out.empty())
        fail(line, "empty list");
    return out;
}

std::string fmt_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ParseState {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    bool g_explicit = false;
    bool power_explicit = false;
    bool dq_explicit = false;

    void once(const std::string& canonical, int line)
    {
        if (!seen.insert(canonical).second)
            fail(line, "'" + canonical + "' specified more than once "
                       "(possibly via different unit suffixes)");
    }
};

void apply_key(ParseState& st, const std::string& key,
               const std::string& val, int line)
{
    ExperimentConfig& c = st.cfg;
    auto num = [&] { return parse_num(val, line); };
    auto integer = [&] { return parse_int(val, line); };

    // crystal
    if (key == "l_m" || key == "l_mm" || key == "l_cm") {
        st.once("l", line);
        const double s = key == "l_m" ? 1.0 : key == "l_mm" ? 1e-3 : 1e-2;
        c.physics.crystal.length_l = num() * s;
    } else if (key == "n_signal") {
        st.once(key, line);
        c.physics.crystal.n_signal = num();
    } else if (key == "n_idler") {
        st.once(key, line);
        c.physics.crystal.n_idler = num();
    } else if (key == "n_pump") {
        st.once(key, line);
        c.physics.crystal.n_pump = num();
    } else if (key == "g") {
        st.once(key, line);
        c.physics.crystal.chi2_gain_g = num();
        st.g_explicit = true;

    // pump
    } else if (key == "wp_m" || key == "wp_mm" || key == "wp_um") {
        st.once("wp", line);
        const double s = key == "wp_m" ? 1.0 : key == "wp_mm" ? 1e-3 : 1e-6;
        c.physics.pump.waist_wp = num() * s;
    } else if (key == "lambda_p_m" || key == "lambda_p_nm") {
        st.once("lambda_p", line);
        c.physics.pump.wavelength_p = num() * (key == "lambda_p_m" ? 1.0 : 1e-9);
    } else if (key == "power_W" || key == "power_MW") {
        st.once("power", line);
        c.physics.pump.peak_power = num() * (key == "power_W" ? 1.0 : 1e6);
        st.power_explicit = true;

    // detuning
    } else if (key == "detuning") {
        st.once(key, line);
        if (val == "ideal")
            c.physics.detuning.variant = Detuning::ideal;
        else if (val == "paraxial")
            c.physics.detuning.variant = Detuning::paraxial_degenerate;
        else
            fail(line, "detuning must be 'ideal' or 'paraxial'");
    } else if (key == "theta_rad" || key == "theta_deg") {
        st.once("theta", line);
        const double s = key == "theta_rad" ? 1.0 : M_PI / 180.0;
        c.physics.detuning.center_angle_theta = num() * s;
    } else if (key == "dk0_per_m") {
        st.once(key, line);
        c.physics.detuning.dk0 = num();

    // grid and far-field mapping
    } else if (key == "grid_n") {
        st.once(key, line);
        c.grid.n_x = c.grid.n_y = integer();
    } else if (key == "grid_nx") {
        st.once(key, line);
        c.grid.n_x = integer();
    } else if (key == "grid_ny") {
        st.once(key, line);
        c.grid.n_y = integer();
    } else if (key == "dq_per_m") {
        st.once(key, line);
        c.grid.dq = num();
        st.dq_explicit = true;
    } else if (key == "focal_m" || key == "focal_mm") {
        st.once("focal", line);
        c.grid.focal_f = num() * (key == "focal_m" ? 1.0 : 1e-3);
    } else if (key == "pitch_m" || key == "pitch_um") {
        st.once("pitch", line);
        c.grid.pixel_pitch = num() * (key == "pitch_m" ? 1.0 : 1e-6);

    // simulation fidelity
    } else if (key == "model") {
        st.once(key, line);
        if (val == "diagonal")
            c.fidelity.model = SimModel::diagonal_bogoliubov;
        else if (val == "splitstep")
            c.fidelity.model = SimModel::split_step;
        else
            fail(line, "model must be 'diagonal' or 'splitstep'");
    } else if (key == "zsteps") {
        st.once(key, line);
        c.fidelity.n_z_steps = integer();
    } else if (key == "temporal_modes") {
        st.once(key, line);
        c.fidelity.temporal_modes = integer();
    } else if (key == "probe") {
        st.once(key, line);
        if (val == "detected")
            c.fidelity.probe = Probe::detected;
        else if (val == "generated")
            c.fidelity.probe = Probe::generated;
        else
            fail(line, "probe must be 'detected' or 'generated'");
    } else if (key == "seed") {
        st.once(key, line);
        c.fidelity.rng_seed = parse_u64(val, line);

    // detector
    } else if (key == "eta") {
        st.once(key, line);
        c.detector.quantum_efficiency = num();
    } else if (key == "read_noise_e") {
        st.once(key, line);
        c.detector.read_noise_rms = num();
    } else if (key == "ccd_w_px") {
        st.once(key, line);
        c.detector.ccd_width_px = integer();
    } else if (key == "ccd_h_px") {
        st.once(key, line);
        c.detector.ccd_height_px = integer();
    } else if (key == "shot_noise") {
        st.once(key, line);
        if (val == "round")
            c.detector.integerization = ShotNoise::round;
        else if (val == "poisson")
            c.detector.integerization = ShotNoise::poisson;
        else
            fail(line, "shot_noise must be 'round' or 'poisson'");

    // calibration and per-frame jitter
    } else if (key == "sigma_per_sqrt_MW") {
        st.once(key, line);
        c.sigma_per_sqrt_mw = num();
    } else if (key == "wref_m" || key == "wref_mm") {
        st.once("wref", line);
        c.ref_waist = num() * (key == "wref_m" ? 1.0 : 1e-3);
    } else if (key == "power_jitter_rms") {
        st.once(key, line);
        c.power_jitter_rms = num();

    // analysis
    } else if (key == "r1_px") {
        st.once(key, line);
        const auto v = parse_list(val, line);
        if (v.size() != 4)
            fail(line, "r1_px must be 'x,y,w,h'");
        for (double d : v)
            if (d != static_cast<int>(d))
                fail(line, "r1_px components must be integers");
        c.r1 = {static_cast<int>(v[0]), static_cast<int>(v[1]),
                static_cast<int>(v[2]), static_cast<int>(v[3])};
        c.r1_explicit = true;
    } else if (key == "corr_window_px") {
        st.once(key, line);
        c.corr_window = integer();

    // sweep
    } else if (key == "sweep") {
        st.once(key, line);
        if (val == "none")
            c.sweep.kind = SweepSpec::Kind::none;
        else if (val == "power")
            c.sweep.kind = SweepSpec::Kind::power;
        else if (val == "diameter")
            c.sweep.kind = SweepSpec::Kind::diameter;
        else
            fail(line, "sweep must be 'none', 'power' or 'diameter'");
    } else if (key == "sweep_values") {
        st.once(key, line);
        c.sweep.values = parse_list(val, line);
    } else if (key == "sweep_frames") {
        st.once(key, line);
        c.sweep.frames_per_point = integer();
    } else if (key == "sweep_gain_mode") {
        st.once(key, line);
        if (val == "fixed_power")
            c.sweep.gain_mode = SweepSpec::GainMode::fixed_power;
        else if (val == "fixed_gain")
            c.sweep.gain_mode = SweepSpec::GainMode::fixed_gain;
        else
            fail(line, "sweep_gain_mode must be 'fixed_power' or "
                       "'fixed_gain'");
    } else {
        fail(line, "unknown key '" + key + "'");
    }
}

} // namespace

ExperimentConfig parse_config_text(const std::string& text)
{
    ParseState st;
    std::stringstream ss(text);
    std::string raw;
    int line = 0;
    while (std::getline(ss, raw)) {
        ++line;
        const size_t hash = raw.find('#');
        if (hash != std::string::npos)
            raw.erase(hash);
        const std::string s = trim(raw);
        if (s.empty())
            continue;
        const size_t eq = s.find('=');
        if (eq == std::string::npos)
            fail(line, "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (key.empty())
            fail(line, "missing key");
        if (val.empty())
            fail(line, "missing value for '" + key + "'");
        apply_key(st, key, val, line);
    }

    ExperimentConfig& c = st.cfg;
    // detected wavelength is the degenerate one, twice the pump's
    c.grid.lambda = 2.0 * c.physics.pump.wavelength_p;
    if (!st.dq_explicit)
        c.grid.dq = c.grid.pixel_q_increment(); // one cell per pixel
    if (!st.g_explicit && st.power_explicit)
        c.physics.crystal.chi2_gain_g =
            c.sigma_per_sqrt_mw *
            std::sqrt(c.physics.pump.peak_power / 1e6);
    c.validate();
    return c;
}

ExperimentConfig read_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void ExperimentConfig::validate() const
{
    physics.validate(grid);
    fidelity.validate();
    detector.validate();
    if (!(sigma_per_sqrt_mw > 0.0))
        throw ConfigError("sigma_per_sqrt_MW must be > 0");
    if (!(ref_waist > 0.0))
        throw ConfigError("wref must be > 0");
    if (power_jitter_rms < 0.0)
        throw ConfigError("power_jitter_rms must be >= 0");
    if (corr_window < 0)
        throw ConfigError("corr_window_px must be >= 0");
    if (r1_explicit && (r1.w < 1 || r1.h < 1 || r1.x < 0 || r1.y < 0))
        throw ConfigError("r1_px must have positive size and origin");
    if (sweep.kind != SweepSpec::Kind::none) {
        if (sweep.values.empty())
            throw ConfigError("sweep_values required when sweep is set");
        for (double v : sweep.values)
            if (!(v > 0.0))
                throw ConfigError("sweep_values must be positive");
        if (sweep.frames_per_point < 1)
            throw ConfigError("sweep_frames must be >= 1");
    }
}

std::string ExperimentConfig::echo() const
{
    std::string out;
    auto kv = [&](const char* k, const std::string& v) {
        out += k;
        out += '=';
        out += v;
        out += '\n';
    };
    auto kd = [&](const char* k, double v) { kv(k, fmt_g17(v)); };
    auto ki = [&](const char* k, long long v) { kv(k, std::to_string(v)); };

    kd("l_m", physics.crystal.length_l);
    kd("n_signal", physics.crystal.n_signal);
    kd("n_idler", physics.crystal.n_idler);
    kd("n_pump", physics.crystal.n_pump);
    kd("g", physics.crystal.chi2_gain_g);
    kd("wp_m", physics.pump.waist_wp);
    kd("lambda_p_m", physics.pump.wavelength_p);
    kd("power_W", physics.pump.peak_power);
    kv("detuning", physics.detuning.variant == Detuning::ideal
                       ? "ideal"
                       : "paraxial");
    kd("theta_rad", physics.detuning.center_angle_theta);
    kd("dk0_per_m", physics.detuning.dk0);
    ki("grid_nx", grid.n_x);
    ki("grid_ny", grid.n_y);
    kd("dq_per_m", grid.dq);
    kd("focal_m", grid.focal_f);
    kd("pitch_m", grid.pixel_pitch);
    kd("lambda_m", grid.lambda);
    kv("model", fidelity.model == SimModel::diagonal_bogoliubov
                    ? "diagonal"
                    : "splitstep");
    ki("zsteps", fidelity.n_z_steps);
    ki("temporal_modes", fidelity.temporal_modes);
    kv("probe",
       fidelity.probe == Probe::detected ? "detected" : "generated");
    kv("seed", std::to_string(fidelity.rng_seed));
    kd("eta", detector.quantum_efficiency);
    kd("read_noise_e", detector.read_noise_rms);
    ki("ccd_w_px", detector.ccd_width_px);
    ki("ccd_h_px", detector.ccd_height_px);
    kv("shot_noise", detector.integerization == ShotNoise::round
                         ? "round"
                         : "poisson");
    kd("sigma_per_sqrt_MW", sigma_per_sqrt_mw);
    kd("wref_m", ref_waist);
    kd("power_jitter_rms", power_jitter_rms);
    if (r1_explicit)
        kv("r1_px", std::to_string(r1.x) + "," + std::to_string(r1.y) + "," +
                        std::to_string(r1.w) + "," + std::to_string(r1.h));
    else
        kv("r1_px", "auto");
    ki("corr_window_px", corr_window);
    switch (sweep.kind) {
    case SweepSpec::Kind::none: kv("sweep", "none"); break;
    case SweepSpec::Kind::power: kv("sweep", "power"); break;
    case SweepSpec::Kind::diameter: kv("sweep", "diameter"); break;
    }
    if (!sweep.values.empty()) {
        std::string list;
        for (size_t i = 0; i < sweep.values.size(); ++i) {
            if (i)
                list += ',';
            list += fmt_g17(sweep.values[i]);
        }
        kv("sweep_values", list);
        ki("sweep_frames", sweep.frames_per_point);
        kv("sweep_gain_mode",
           sweep.gain_mode == SweepSpec::GainMode::fixed_power
               ? "fixed_power"
               : "fixed_gain");
    }
    return out;
}

uint64_t ExperimentConfig::hash64() const
{
    // FNV-1a over the canonical echo text
    uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : echo()) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string ExperimentConfig::hash_hex() const
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(hash64()));
    return buf;
}

} // namespace pdc

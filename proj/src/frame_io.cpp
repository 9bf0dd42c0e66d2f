#include "pdc/frame_io.hpp"

#include "pdc/error.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace pdc {
namespace {

uint64_t fnv1a(const unsigned char* data, size_t n)
{
    uint64_t h = 14695981039346656037ULL;
    for (size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hex16(uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<unsigned char> pack_pixels(const Frame& f)
{
    std::vector<unsigned char> bytes;
    bytes.reserve(static_cast<size_t>(f.counts.size()) * 2);
    for (const int32_t v : f.counts) {
        if (v < 0 || v > 65535)
            throw IoError("pixel value " + std::to_string(v) +
                          " does not fit 16-bit PGM");
        bytes.push_back(static_cast<unsigned char>(v >> 8));
        bytes.push_back(static_cast<unsigned char>(v & 0xff));
    }
    return bytes;
}

} // namespace

std::string sidecar_path(const std::string& frame_path)
{
    return frame_path + ".meta";
}

void write_frame(const Frame& frame, const std::string& path)
{
    if (frame.counts.rows() < 1 || frame.counts.cols() < 1)
        throw IoError("empty frame");
    const auto bytes = pack_pixels(frame);

    {
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw IoError("cannot open '" + path + "' for writing");
        out << "P5\n"
            << frame.counts.cols() << ' ' << frame.counts.rows()
            << "\n65535\n";
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw IoError("write failed for '" + path + "'");
    }

    std::ostringstream m;
    m << "format=pdc-frame-1\n";
    m << "width=" << frame.counts.cols() << '\n';
    m << "height=" << frame.counts.rows() << '\n';
    m << "block_w=" << frame.geom.block_w << '\n';
    m << "block_h=" << frame.geom.block_h << '\n';
    m << "cells_per_pixel=" << frame.geom.cells_per_pixel << '\n';
    m << "grid_nx=" << frame.geom.grid.n_x << '\n';
    m << "grid_ny=" << frame.geom.grid.n_y << '\n';
    m << "dq_per_m=" << fmt_g17(frame.geom.grid.dq) << '\n';
    m << "focal_m=" << fmt_g17(frame.geom.grid.focal_f) << '\n';
    m << "pitch_m=" << fmt_g17(frame.geom.grid.pixel_pitch) << '\n';
    m << "lambda_m=" << fmt_g17(frame.geom.grid.lambda) << '\n';
    m << "center_x=" << fmt_g17(frame.geom.center_x) << '\n';
    m << "center_y=" << fmt_g17(frame.geom.center_y) << '\n';
    m << "g=" << fmt_g17(frame.meta.gain_g) << '\n';
    m << "wp_m=" << fmt_g17(frame.meta.waist_wp) << '\n';
    m << "power_W=" << fmt_g17(frame.meta.peak_power) << '\n';
    m << "seed=" << frame.meta.seed << '\n';
    m << "model=" << frame.meta.model << '\n';
    m << "config_hash=" << frame.meta.config_hash << '\n';
    m << "data_hash=" << hex16(fnv1a(bytes.data(), bytes.size())) << '\n';

    std::ofstream side(sidecar_path(path), std::ios::binary);
    if (!side)
        throw IoError("cannot open '" + sidecar_path(path) +
                      "' for writing");
    side << m.str();
    if (!side)
        throw IoError("write failed for '" + sidecar_path(path) + "'");
}

Frame read_frame(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open frame '" + path + "'");

    std::string magic;
    long w = 0, h = 0, maxval = 0;
    in >> magic >> w >> h >> maxval;
    if (magic != "P5" || w < 1 || h < 1)
        throw IoError("'" + path + "' is not a binary PGM frame");
    if (maxval != 65535)
        throw IoError("'" + path + "' must be 16-bit (maxval 65535)");
    in.get(); // single whitespace after the header

    std::vector<unsigned char> bytes(static_cast<size_t>(w) * h * 2);
    in.read(reinterpret_cast<char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
        throw IoError("'" + path + "' is truncated");

    std::ifstream side(sidecar_path(path), std::ios::binary);
    if (!side)
        throw IoError("missing sidecar '" + sidecar_path(path) + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(side, line)) {
        const size_t eq = line.find('=');
        if (eq != std::string::npos)
            kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto get = [&](const char* k) -> const std::string& {
        auto it = kv.find(k);
        if (it == kv.end())
            throw IoError("sidecar '" + sidecar_path(path) +
                          "' lacks key '" + std::string(k) + "'");
        return it->second;
    };

    if (get("data_hash") != hex16(fnv1a(bytes.data(), bytes.size())))
        throw IntegrityError("pixel data of '" + path +
                             "' does not match its sidecar hash");
    if (std::stol(get("width")) != w || std::stol(get("height")) != h)
        throw IntegrityError("sidecar dimensions disagree with '" + path +
                             "'");

    Frame f;
    f.counts = Array2D<int32_t>(static_cast<int>(h), static_cast<int>(w));
    for (size_t i = 0; i < f.counts.size(); ++i)
        f.counts.data()[i] = static_cast<int32_t>(bytes[2 * i] << 8 |
                                                  bytes[2 * i + 1]);
    f.geom.block_w = std::stoi(get("block_w"));
    f.geom.block_h = std::stoi(get("block_h"));
    f.geom.cells_per_pixel = std::stoi(get("cells_per_pixel"));
    f.geom.grid.n_x = std::stoi(get("grid_nx"));
    f.geom.grid.n_y = std::stoi(get("grid_ny"));
    f.geom.grid.dq = std::stod(get("dq_per_m"));
    f.geom.grid.focal_f = std::stod(get("focal_m"));
    f.geom.grid.pixel_pitch = std::stod(get("pitch_m"));
    f.geom.grid.lambda = std::stod(get("lambda_m"));
    f.geom.center_x = std::stod(get("center_x"));
    f.geom.center_y = std::stod(get("center_y"));
    f.meta.gain_g = std::stod(get("g"));
    f.meta.waist_wp = std::stod(get("wp_m"));
    f.meta.peak_power = std::stod(get("power_W"));
    f.meta.seed = std::stoull(get("seed"));
    f.meta.model = get("model");
    f.meta.config_hash = get("config_hash");
    if (f.geom.block_w * 2 != w || f.geom.block_h != h)
        throw IntegrityError("sidecar block geometry disagrees with '" +
                             path + "'");
    return f;
}

} // namespace pdc

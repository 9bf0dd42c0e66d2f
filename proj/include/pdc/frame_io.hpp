#pragma once

#include "pdc/simulator.hpp"

#include <string>

namespace pdc {

// Frames go to disk as 16-bit binary PGM (big-endian sample order, as the
// format requires) plus a '<path>.meta' sidecar holding the geometry, the
// generating parameters, the configuration hash and a hash of the pixel
// data. read_frame refuses frames whose pixel data does not match the
// sidecar hash. The round trip is bit exact.
//
// Counts above 65535 do not fit the format; write_frame reports that as
// an I/O error rather than silently rescaling.
void write_frame(const Frame& frame, const std::string& path);
Frame read_frame(const std::string& path);

std::string sidecar_path(const std::string& frame_path);

} // namespace pdc

#pragma once

#include <cmath>
#include <string>

#include "pdc/error.hpp"

namespace pdc {

// Discretized transverse-momentum grid. q = 0 sits on the node (n/2, n/2),
// so index i covers q_i = (i - n/2)*dq (standard fftshift layout; the i = 0
// row/column is the self-paired Nyquist mode).
//
// The far field is read out at the focal plane of a lens: x = (lambda f/2pi) q,
// which makes the cell -> detector-pixel map linear and bijective.
struct ModeGrid {
    int n_x = 128;
    int n_y = 128;
    double dq = 0.0;           // radians/meter per cell
    double focal_f = 0.1;      // meters
    double pixel_pitch = 20e-6; // meters
    double lambda = 710e-9;    // detected wavelength, sets the x = (lambda f/2pi) q map

    void validate() const
    {
        if (n_x < 2 || n_y < 2 || n_x % 2 || n_y % 2)
            throw GeometryError("ModeGrid: n_x, n_y must be even and >= 2 (got " +
                                std::to_string(n_x) + "x" + std::to_string(n_y) + ")");
        if (!(dq > 0.0))
            throw GeometryError("ModeGrid: dq must be > 0");
        if (!(focal_f > 0.0) || !(pixel_pitch > 0.0) || !(lambda > 0.0))
            throw GeometryError("ModeGrid: focal length, pixel pitch, wavelength must be > 0");
    }

    double q_x(int i) const { return (i - n_x / 2) * dq; }
    double q_y(int j) const { return (j - n_y / 2) * dq; }

    // index of the mirror mode -q; the Nyquist row/column maps onto itself
    int mirror_index_x(int i) const { return i == 0 ? 0 : n_x - i; }
    int mirror_index_y(int j) const { return j == 0 ? 0 : n_y - j; }

    double x_of_q(double q) const { return lambda * focal_f / (2.0 * M_PI) * q; }

    // q covered by one detector pixel: 2pi*pitch/(lambda f)
    double pixel_q_increment() const
    {
        return 2.0 * M_PI * pixel_pitch / (lambda * focal_f);
    }

    // how many grid cells bin into one detector pixel along one axis;
    // must come out integral or the cell -> pixel map is not clean
    int cells_per_pixel() const
    {
        double ratio = pixel_q_increment() / dq;
        int b = static_cast<int>(std::lround(ratio));
        if (b < 1 || std::abs(ratio - b) > 1e-6 * ratio)
            throw GeometryError("ModeGrid: pixel q-increment (" + std::to_string(pixel_q_increment()) +
                                ") is not an integer multiple of dq (" + std::to_string(dq) + ")");
        return b;
    }

    // position-space step of the conjugate grid (split-step working space)
    double dx() const { return 2.0 * M_PI / (n_x * dq); }
    double dy() const { return 2.0 * M_PI / (n_y * dq); }
};

} // namespace pdc

#pragma once

#include "pdc/array2d.hpp"
#include "pdc/simulator.hpp"

#include <utility>

namespace pdc {

// Rectangular pixel region of an assembled frame. Paired regions
// (signal/idler) must be point reflections of each other through the
// frame's symmetry center.
struct Region {
    int x = 0;      // origin column
    int y = 0;      // origin row
    int w = 0;
    int h = 0;

    bool contains(int col, int row) const
    {
        return col >= x && col < x + w && row >= y && row < y + h;
    }
    void validate_inside(int img_w, int img_h) const;
};

// doubled symmetry center, so half-pixel centers stay exact in integers
struct Center2 {
    int x2 = 0;
    int y2 = 0;
};

// Largest signal-block region whose mirror stays inside the idler block.
// Drops the Nyquist row/column, whose twin cells alias off the frame.
Region default_signal_region(const FrameGeometry& geom);
Region mirror_region(const Region& r, Center2 c2);
Center2 doubled_center(const FrameGeometry& geom);

// counts minus their region mean
RealArray fluctuations(const RealArray& img, const Region& r);

// Normalized correlation over pixel displacements xi, |xi| <= window on
// each axis. Each displacement is normalized by the fluctuation power of
// the pixels that actually overlap at that displacement, so the map is an
// unbiased correlation coefficient even at the window edge.
struct CorrelationMap {
    RealArray values;        // (2*window+1) square, index (xi_y + window, xi_x + window)
    Array2D<int> overlap;    // pixel pairs contributing per displacement
    int window = 0;
    double peak_value = 0.0;
    int peak_dx = 0;
    int peak_dy = 0;

    double at(int dx, int dy) const
    {
        return values(dy + window, dx + window);
    }
};

// Cross-correlation of fluctuations between r1 and the point reflection
// of r1 into r2: C(xi) compares pixel p with pixel (2c - p + xi). The
// peak sits at xi = 0 when the assumed center is exact; a peak offset of
// xi* means the true center is c + xi*/2.
CorrelationMap cross_correlation(const RealArray& img, const Region& r1,
                                 const Region& r2, Center2 c2,
                                 int window = 0);

// Auto-correlation of fluctuations within one region: C(xi) compares
// pixel p with p + xi. C(0) == 1 exactly.
CorrelationMap auto_correlation(const RealArray& img, const Region& r,
                                int window = 0);

// Half width at half maximum of the correlation peak, in pixels: radial
// profile about the peak in half-pixel annuli (skipping radii the pixel
// lattice does not populate), linear interpolation at the first crossing
// of half the peak value. Requires peak_value > 0.2.
double speckle_radius(const CorrelationMap& map);

// Variance of the signal-idler difference across twin pixel pairs,
// raw and normalized to the mean total counts. A coherent beam pair sits
// at normalized variance 1 (shot noise); below 1 the beams are twin-
// correlated beyond classical limits.
struct SsnResult {
    double sigma2 = 0.0;       // Var(N_s - N_i) over twin pairs
    double normalized = 0.0;   // sigma2 / <N_s + N_i>
    double mean_sum = 0.0;
    int n_pairs = 0;
};
SsnResult ssn_sigma(const RealArray& img, const Region& r1, const Region& r2,
                    Center2 c2);

// Sub-pixel symmetry center: scan the cross-correlation peak within
// +-search_px of the geometric center and return the implied center.
std::pair<double, double> find_symmetry_center(const RealArray& img,
                                               const Region& r1, Center2 c2,
                                               int search_px = 10);

// Frame-level conveniences (counts promoted to double, center and default
// regions taken from the frame geometry).
RealArray to_real(const Frame& f);
CorrelationMap cross_correlation(const Frame& f, int window = 0);
CorrelationMap auto_correlation(const Frame& f, const Region& r,
                                int window = 0);
SsnResult ssn_sigma(const Frame& f);

} // namespace pdc

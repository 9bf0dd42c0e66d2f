#include "pdc/analysis.hpp"

#include "pdc/error.hpp"
#include "pdc/fft.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace pdc {

void Region::validate_inside(int img_w, int img_h) const
{
    if (w < 1 || h < 1)
        throw AnalysisError("region is empty");
    if (x < 0 || y < 0 || x + w > img_w || y + h > img_h)
        throw AnalysisError("region exceeds the frame");
}

Center2 doubled_center(const FrameGeometry& geom)
{
    const double cx2 = 2.0 * geom.center_x;
    const double cy2 = 2.0 * geom.center_y;
    Center2 c{static_cast<int>(std::llround(cx2)),
              static_cast<int>(std::llround(cy2))};
    if (std::abs(cx2 - c.x2) > 1e-9 || std::abs(cy2 - c.y2) > 1e-9)
        throw AnalysisError("symmetry center must lie on the half-pixel "
                            "lattice for twin-pair analysis");
    return c;
}

Region default_signal_region(const FrameGeometry& geom)
{
    // skip the Nyquist row and column: their twins alias off the frame
    return {1, 1, geom.block_w - 1, geom.block_h - 1};
}

Region mirror_region(const Region& r, Center2 c2)
{
    return {c2.x2 - (r.x + r.w - 1), c2.y2 - (r.y + r.h - 1), r.w, r.h};
}

RealArray fluctuations(const RealArray& img, const Region& r)
{
    r.validate_inside(img.cols(), img.rows());
    double sum = 0.0;
    for (int row = r.y; row < r.y + r.h; ++row)
        for (int col = r.x; col < r.x + r.w; ++col)
            sum += img(row, col);
    const double mean = sum / (static_cast<double>(r.w) * r.h);
    RealArray out(r.h, r.w);
    for (int row = 0; row < r.h; ++row)
        for (int col = 0; col < r.w; ++col)
            out(row, col) = img(r.y + row, r.x + col) - mean;
    return out;
}

namespace {

// summed-area table; rect sums of squares come out exact up to ordinary
// accumulation error, with no FFT roundoff
class Sat {
public:
    explicit Sat(const RealArray& a) : s_(a.rows() + 1, a.cols() + 1)
    {
        s_.fill(0.0);
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j)
                s_(i + 1, j + 1) = a(i, j) * a(i, j) + s_(i, j + 1) +
                                   s_(i + 1, j) - s_(i, j);
    }
    // inclusive box sum
    double rect(int r0, int c0, int r1, int c1) const
    {
        return s_(r1 + 1, c1 + 1) - s_(r0, c1 + 1) - s_(r1 + 1, c0) +
               s_(r0, c0);
    }

private:
    RealArray s_;
};

int default_window(int w, int h)
{
    const int m = std::min(w, h);
    return std::clamp(m / 8, 4, std::max(4, m - 1));
}

// C(xi) = sum_u A[u] B[K + xi - u] normalized per displacement by the
// fluctuation power inside the overlap
CorrelationMap corr_general(const RealArray& A, const RealArray& B, int Kr,
                            int Kc, int window)
{
    if (window < 1)
        throw AnalysisError("correlation window must be >= 1");
    const int h1 = A.rows(), w1 = A.cols();
    const int h2 = B.rows(), w2 = B.cols();

    const RealArray conv = conv2_full(A, B);
    const Sat sa(A), sb(B);
    if (sa.rect(0, 0, h1 - 1, w1 - 1) <= 0.0 ||
        sb.rect(0, 0, h2 - 1, w2 - 1) <= 0.0)
        throw AnalysisError("region has no fluctuation power");

    CorrelationMap map;
    map.window = window;
    map.values = RealArray(2 * window + 1, 2 * window + 1);
    map.overlap = Array2D<int>(2 * window + 1, 2 * window + 1);
    map.values.fill(0.0);
    map.overlap.fill(0);

    bool have_peak = false;
    for (int xr = -window; xr <= window; ++xr) {
        for (int xc = -window; xc <= window; ++xc) {
            const int tr = Kr + xr, tc = Kc + xc;
            const int ur0 = std::max(0, tr - (h2 - 1));
            const int ur1 = std::min(h1 - 1, tr);
            const int uc0 = std::max(0, tc - (w2 - 1));
            const int uc1 = std::min(w1 - 1, tc);
            if (ur0 > ur1 || uc0 > uc1)
                continue;
            const int n = (ur1 - ur0 + 1) * (uc1 - uc0 + 1);
            const double d1 = sa.rect(ur0, uc0, ur1, uc1);
            const double d2 = sb.rect(tr - ur1, tc - uc1, tr - ur0, tc - uc0);
            map.overlap(xr + window, xc + window) = n;
            if (d1 <= 0.0 || d2 <= 0.0)
                continue;
            const double den = d1 == d2 ? d1 : std::sqrt(d1 * d2);
            double c = conv(tr, tc) / den;
            if (std::abs(c) > 1.0) {
                if (std::abs(c) > 1.0 + 1e-9)
                    throw AnalysisError("correlation magnitude exceeded 1 "
                                        "beyond roundoff");
                c = std::copysign(1.0, c);
            }
            map.values(xr + window, xc + window) = c;
            if (!have_peak || c > map.peak_value) {
                have_peak = true;
                map.peak_value = c;
                map.peak_dx = xc;
                map.peak_dy = xr;
            }
        }
    }
    if (!have_peak)
        throw AnalysisError("correlation window has no overlapping pixels");
    return map;
}

void rescan_peak(CorrelationMap& map)
{
    bool have = false;
    for (int xr = -map.window; xr <= map.window; ++xr) {
        for (int xc = -map.window; xc <= map.window; ++xc) {
            if (map.overlap(xr + map.window, xc + map.window) == 0)
                continue;
            const double c = map.at(xc, xr);
            if (!have || c > map.peak_value) {
                have = true;
                map.peak_value = c;
                map.peak_dx = xc;
                map.peak_dy = xr;
            }
        }
    }
}

Region expand_clipped(const Region& r, int margin, int img_w, int img_h)
{
    const int x0 = std::max(0, r.x - margin);
    const int y0 = std::max(0, r.y - margin);
    const int x1 = std::min(img_w, r.x + r.w + margin);
    const int y1 = std::min(img_h, r.y + r.h + margin);
    return {x0, y0, x1 - x0, y1 - y0};
}

} // namespace

CorrelationMap cross_correlation(const RealArray& img, const Region& r1,
                                 const Region& r2, Center2 c2, int window)
{
    r1.validate_inside(img.cols(), img.rows());
    r2.validate_inside(img.cols(), img.rows());
    if (window == 0)
        window = default_window(std::min(r1.w, r2.w),
                                std::min(r1.h, r2.h));
    const RealArray d1 = fluctuations(img, r1);
    const RealArray d2 = fluctuations(img, r2);
    const int Kr = c2.y2 - r1.y - r2.y;
    const int Kc = c2.x2 - r1.x - r2.x;
    return corr_general(d1, d2, Kr, Kc, window);
}

CorrelationMap auto_correlation(const RealArray& img, const Region& r,
                                int window)
{
    r.validate_inside(img.cols(), img.rows());
    if (window == 0)
        window = default_window(r.w, r.h);
    const RealArray d = fluctuations(img, r);
    RealArray rev(r.h, r.w);
    for (int i = 0; i < r.h; ++i)
        for (int j = 0; j < r.w; ++j)
            rev(i, j) = d(r.h - 1 - i, r.w - 1 - j);
    // S(xi) = sum_u d[u] d[u + xi] in cross form with B = reversed d and
    // K at the reversal pivot; the map of -xi equals the map of xi
    CorrelationMap map = corr_general(d, rev, r.h - 1, r.w - 1, window);
    // zero-lag numerator and denominator are the same sum of squares, so
    // pin the entry to its mathematical value
    map.values(window, window) = 1.0;
    rescan_peak(map);
    return map;
}

double speckle_radius(const CorrelationMap& map)
{
    if (!(map.peak_value > 0.2))
        throw AnalysisError("correlation peak below 0.2; no resolvable "
                            "coherence area");
    const double half = 0.5 * map.peak_value;

    // radial profile about the peak in half-pixel annuli; annuli the
    // integer lattice leaves empty are skipped rather than treated as 0
    const double dr = 0.5;
    std::vector<double> sum_v, sum_r;
    std::vector<int> cnt;
    for (int xr = -map.window; xr <= map.window; ++xr) {
        for (int xc = -map.window; xc <= map.window; ++xc) {
            if (map.overlap(xr + map.window, xc + map.window) == 0)
                continue;
            const double r = std::hypot(xc - map.peak_dx, xr - map.peak_dy);
            const auto b = static_cast<size_t>(r / dr);
            if (b >= cnt.size()) {
                sum_v.resize(b + 1, 0.0);
                sum_r.resize(b + 1, 0.0);
                cnt.resize(b + 1, 0);
            }
            sum_v[b] += map.at(xc, xr);
            sum_r[b] += r;
            ++cnt[b];
        }
    }

    double prev_r = 0.0, prev_v = map.peak_value;
    bool first = true;
    for (size_t b = 0; b < cnt.size(); ++b) {
        if (!cnt[b])
            continue;
        const double r = sum_r[b] / cnt[b];
        const double v = sum_v[b] / cnt[b];
        if (first) { // bin of the peak itself
            prev_r = r;
            prev_v = v;
            first = false;
            continue;
        }
        if (v <= half)
            return prev_r + (prev_v - half) * (r - prev_r) / (prev_v - v);
        prev_r = r;
        prev_v = v;
    }
    throw AnalysisError("correlation did not fall to half maximum inside "
                        "the window; enlarge the window or region");
}

SsnResult ssn_sigma(const RealArray& img, const Region& r1, const Region& r2,
                    Center2 c2)
{
    r1.validate_inside(img.cols(), img.rows());
    r2.validate_inside(img.cols(), img.rows());
    const Region m = mirror_region(r1, c2);
    if (m.x != r2.x || m.y != r2.y || m.w != r2.w || m.h != r2.h)
        throw AnalysisError("r2 is not the point reflection of r1 through "
                            "the symmetry center");

    const int n = r1.w * r1.h;
    double mean_d = 0.0, mean_sum = 0.0;
    for (int row = r1.y; row < r1.y + r1.h; ++row) {
        for (int col = r1.x; col < r1.x + r1.w; ++col) {
            const double a = img(row, col);
            const double b = img(c2.y2 - row, c2.x2 - col);
            mean_d += a - b;
            mean_sum += a + b;
        }
    }
    mean_d /= n;
    mean_sum /= n;

    double var = 0.0;
    for (int row = r1.y; row < r1.y + r1.h; ++row) {
        for (int col = r1.x; col < r1.x + r1.w; ++col) {
            const double d = img(row, col) - img(c2.y2 - row, c2.x2 - col);
            var += (d - mean_d) * (d - mean_d);
        }
    }

    SsnResult res;
    res.sigma2 = var / n;
    res.mean_sum = mean_sum;
    res.n_pairs = n;
    if (!(mean_sum > 0.0))
        throw AnalysisError("mean total counts not positive; cannot "
                            "normalize the difference variance");
    res.normalized = res.sigma2 / mean_sum;
    return res;
}

std::pair<double, double> find_symmetry_center(const RealArray& img,
                                               const Region& r1, Center2 c2,
                                               int search_px)
{
    if (search_px < 1)
        throw AnalysisError("center search range must be >= 1");
    const Region r2 = expand_clipped(mirror_region(r1, c2), search_px,
                                     img.cols(), img.rows());
    const CorrelationMap map =
        cross_correlation(img, r1, r2, c2, search_px);
    return {(c2.x2 + map.peak_dx) / 2.0, (c2.y2 + map.peak_dy) / 2.0};
}

RealArray to_real(const Frame& f)
{
    RealArray out(f.counts.rows(), f.counts.cols());
    for (int i = 0; i < out.rows(); ++i)
        for (int j = 0; j < out.cols(); ++j)
            out(i, j) = f.counts(i, j);
    return out;
}

CorrelationMap cross_correlation(const Frame& f, int window)
{
    const Region r1 = default_signal_region(f.geom);
    const Center2 c2 = doubled_center(f.geom);
    return cross_correlation(to_real(f), r1, mirror_region(r1, c2), c2,
                             window);
}

CorrelationMap auto_correlation(const Frame& f, const Region& r, int window)
{
    return auto_correlation(to_real(f), r, window);
}

SsnResult ssn_sigma(const Frame& f)
{
    const Region r1 = default_signal_region(f.geom);
    const Center2 c2 = doubled_center(f.geom);
    return ssn_sigma(to_real(f), r1, mirror_region(r1, c2), c2);
}

} // namespace pdc

#pragma once

#include "pdc/array2d.hpp"

namespace pdc {

// Thin FFTW3 front end. Plans are cached per (rows, cols, direction),
// created with FFTW_ESTIMATE so the algorithm choice (and therefore the
// bit pattern of results) never depends on runtime measurement.

// in-place c2c transform with unitary normalization (1/sqrt(N) both ways)
void fft2_unitary(ComplexArray& a);
void ifft2_unitary(ComplexArray& a);

// in-place c2c without normalization (forward) / with 1/N (backward);
// used by the convolution helper
void fft2_raw(ComplexArray& a);
void ifft2_scaled(ComplexArray& a);

// swap quadrants in place; self-inverse for even dimensions
template <typename T>
void fftshift2(Array2D<T>& a)
{
    const int r = a.rows(), c = a.cols();
    if (r % 2 || c % 2)
        throw GeometryError("fftshift2: even dimensions required");
    const int hr = r / 2, hc = c / 2;
    for (int i = 0; i < hr; ++i)
        for (int j = 0; j < c; ++j)
            std::swap(a(i, j), a((i + hr) % r, (j + hc) % c));
}

// full linear 2D convolution: out[t] = sum_u A[u] * B[t-u],
// shape (ra+rb-1) x (ca+cb-1); zero-padded FFT under the hood
RealArray conv2_full(const RealArray& A, const RealArray& B);

} // namespace pdc

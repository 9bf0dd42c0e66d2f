#include "pdc/fft.hpp"
#include "pdc/error.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace pdc {
namespace {

// One cached plan per (rows, cols, sign). Plans are made on a scratch
// buffer with FFTW_UNALIGNED, which keeps fftw_execute_dft valid for any
// later array regardless of its alignment.
fftw_plan get_plan(int rows, int cols, int sign)
{
    static std::map<std::tuple<int, int, int>, fftw_plan> cache;
    static std::mutex mx;
    std::lock_guard<std::mutex> lock(mx);

    auto key = std::make_tuple(rows, cols, sign);
    auto it = cache.find(key);
    if (it != cache.end())
        return it->second;

    fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(rows) * cols);
    if (!buf)
        throw std::bad_alloc();
    fftw_plan p = fftw_plan_dft_2d(rows, cols, buf, buf, sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(buf);
    if (!p)
        throw DomainError("fftw plan creation failed");
    cache.emplace(key, p);
    return p;
}

void exec(ComplexArray& a, int sign)
{
    if (a.rows() == 0 || a.cols() == 0)
        throw GeometryError("fft2: empty array");
    fftw_plan p = get_plan(a.rows(), a.cols(), sign);
    auto* d = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, d, d);
}

void scale(ComplexArray& a, double s)
{
    for (auto& v : a)
        v *= s;
}

} // namespace

void fft2_raw(ComplexArray& a) { exec(a, FFTW_FORWARD); }

void ifft2_scaled(ComplexArray& a)
{
    exec(a, FFTW_BACKWARD);
    scale(a, 1.0 / (static_cast<double>(a.rows()) * a.cols()));
}

void fft2_unitary(ComplexArray& a)
{
    exec(a, FFTW_FORWARD);
    scale(a, 1.0 / std::sqrt(static_cast<double>(a.rows()) * a.cols()));
}

void ifft2_unitary(ComplexArray& a)
{
    exec(a, FFTW_BACKWARD);
    scale(a, 1.0 / std::sqrt(static_cast<double>(a.rows()) * a.cols()));
}

RealArray conv2_full(const RealArray& A, const RealArray& B)
{
    if (A.rows() == 0 || A.cols() == 0 || B.rows() == 0 || B.cols() == 0)
        throw GeometryError("conv2_full: empty input");

    const int pr = A.rows() + B.rows() - 1;
    const int pc = A.cols() + B.cols() - 1;

    ComplexArray fa(pr, pc), fb(pr, pc);
    fa.fill({0.0, 0.0});
    fb.fill({0.0, 0.0});
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            fa(i, j) = A(i, j);
    for (int i = 0; i < B.rows(); ++i)
        for (int j = 0; j < B.cols(); ++j)
            fb(i, j) = B(i, j);

    fft2_raw(fa);
    fft2_raw(fb);
    for (int i = 0; i < pr; ++i)
        for (int j = 0; j < pc; ++j)
            fa(i, j) *= fb(i, j);
    ifft2_scaled(fa);

    RealArray out(pr, pc);
    for (int i = 0; i < pr; ++i)
        for (int j = 0; j < pc; ++j)
            out(i, j) = fa(i, j).real();
    return out;
}

} // namespace pdc

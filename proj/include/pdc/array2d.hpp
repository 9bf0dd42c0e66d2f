#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "pdc/error.hpp"

namespace pdc {

// Dense row-major 2D array, minimal on purpose (FFTW and the estimators
// want contiguous buffers, not expression templates).
template <typename T>
class Array2D {
public:
    Array2D() : rows_(0), cols_(0) {}
    Array2D(int rows, int cols, T init = T{})
        : rows_(rows), cols_(cols), v_(static_cast<size_t>(rows) * cols, init)
    {
        if (rows < 0 || cols < 0)
            throw GeometryError("Array2D: negative shape");
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    size_t size() const { return v_.size(); }

    T& operator()(int r, int c) { return v_[static_cast<size_t>(r) * cols_ + c]; }
    const T& operator()(int r, int c) const { return v_[static_cast<size_t>(r) * cols_ + c]; }

    T* data() { return v_.data(); }
    const T* data() const { return v_.data(); }

    auto begin() { return v_.begin(); }
    auto end() { return v_.end(); }
    auto begin() const { return v_.begin(); }
    auto end() const { return v_.end(); }

    void fill(T x) { std::fill(v_.begin(), v_.end(), x); }

    bool same_shape(const Array2D& o) const { return rows_ == o.rows_ && cols_ == o.cols_; }

    friend bool operator==(const Array2D& a, const Array2D& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.v_ == b.v_;
    }

private:
    int rows_, cols_;
    std::vector<T> v_;
};

using RealArray = Array2D<double>;
using ComplexArray = Array2D<std::complex<double>>;

} // namespace pdc

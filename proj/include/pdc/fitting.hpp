#pragma once

#include <string>
#include <vector>

namespace pdc {

struct CurveData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_err; // optional; empty means unweighted

    void validate(size_t min_points) const;
};

struct FitResult {
    std::string model_id;
    std::vector<std::string> param_names;
    std::vector<double> params;
    std::vector<double> param_errs; // 1-sigma, from the residual covariance
    double residual_rms = 0.0;
    int n_points = 0;
};

// y = k * sinh^2(sigma * sqrt(x)): mean counts versus pump power when the
// gain scales with the square root of power. Nelder-Mead on (ln k,
// ln sigma) from several sigma starting points; parameter errors from the
// Gauss-Newton covariance at the optimum.
FitResult fit_sinh2(const CurveData& data);

// y = a * (x - b): straight line parameterized by slope and x-intercept,
// e.g. inverse speckle radius versus pump diameter. Closed form.
FitResult fit_linear_shifted(const CurveData& data);

// y = a * x^b via linear regression in log-log coordinates. Requires
// strictly positive x and y.
FitResult fit_power_law(const CurveData& data);

// one CSV row per parameter, stable column layout and number formatting
std::string fit_result_csv(const FitResult& res, bool with_header = true);

} // namespace pdc

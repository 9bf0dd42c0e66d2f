#include "doctest.h"

#include "pdc/error.hpp"
#include "pdc/fitting.hpp"
#include "pdc/rng.hpp"

#include <cmath>
#include <vector>

using namespace pdc;
using doctest::Approx;

namespace {

CurveData sinh2_curve(double k, double sigma, const std::vector<double>& xs)
{
    CurveData d;
    for (double x : xs) {
        d.x.push_back(x);
        const double s = std::sinh(sigma * std::sqrt(x));
        d.y.push_back(k * s * s);
    }
    return d;
}

} // namespace

TEST_CASE("sinh^2 fit recovers exact synthetic parameters")
{
    const std::vector<double> xs{0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.85, 1.0};
    const CurveData d = sinh2_curve(2.3, 1.91, xs);
    const FitResult r = fit_sinh2(d);

    REQUIRE(r.params.size() == 2);
    CHECK(r.model_id == "sinh2");
    CHECK(r.param_names[0] == "k");
    CHECK(r.param_names[1] == "sigma");
    CHECK(r.params[0] == Approx(2.3).epsilon(1e-6));
    CHECK(r.params[1] == Approx(1.91).epsilon(1e-6));
    CHECK(r.residual_rms < 1e-6);
    CHECK(r.n_points == 8);
}

TEST_CASE("sinh^2 fit: scale equivariance and noise robustness")
{
    const std::vector<double> xs{0.05, 0.1, 0.2, 0.35, 0.5, 0.7, 0.85, 1.0};
    CurveData d = sinh2_curve(2.3, 1.91, xs);
    for (double& y : d.y)
        y *= 1000.0;
    const FitResult scaled = fit_sinh2(d);
    CHECK(scaled.params[0] == Approx(2300.0).epsilon(1e-6));
    CHECK(scaled.params[1] == Approx(1.91).epsilon(1e-6));

    CurveData noisy = sinh2_curve(2.3, 1.91, xs);
    Rng rng(12);
    for (size_t i = 0; i < noisy.y.size(); ++i) {
        noisy.y[i] *= 1.0 + 0.01 * rng.normal();
        noisy.y_err.push_back(0.01 * noisy.y[i]);
    }
    const FitResult r = fit_sinh2(noisy);
    CHECK(r.params[0] == Approx(2.3).epsilon(0.05));
    CHECK(r.params[1] == Approx(1.91).epsilon(0.02));
    // 1% relative noise should land within a few estimated sigma
    CHECK(std::abs(r.params[1] - 1.91) < 4.0 * r.param_errs[1]);
}

TEST_CASE("sinh^2 fit input validation")
{
    CurveData neg = sinh2_curve(1.0, 1.0, {0.1, 0.4, 0.8});
    neg.x[1] = -0.4;
    CHECK_THROWS_AS(fit_sinh2(neg), FitError);

    CurveData flat;
    flat.x = {0.1, 0.2, 0.3};
    flat.y = {0.0, 0.0, 0.0}; // nothing positive to set the scale
    CHECK_THROWS_AS(fit_sinh2(flat), FitError);

    CurveData two;
    two.x = {0.1, 0.2};
    two.y = {1.0, 2.0};
    CHECK_THROWS_AS(fit_sinh2(two), FitError); // fewer points than params+1

    CurveData bad_err = sinh2_curve(1.0, 1.0, {0.1, 0.4, 0.8});
    bad_err.y_err = {0.1, 0.1}; // length mismatch
    CHECK_THROWS_AS(fit_sinh2(bad_err), FitError);
}

TEST_CASE("shifted line fit is exact on collinear data")
{
    CurveData d;
    for (double x : {1.0, 2.0, 4.0, 5.5, 8.0}) {
        d.x.push_back(x);
        d.y.push_back(2.0 * (x - 3.0));
    }
    const FitResult r = fit_linear_shifted(d);
    CHECK(r.model_id == "linear_shifted");
    CHECK(r.param_names[0] == "a");
    CHECK(r.param_names[1] == "b");
    CHECK(r.params[0] == Approx(2.0).epsilon(1e-12));
    CHECK(r.params[1] == Approx(3.0).epsilon(1e-12));
    CHECK(r.residual_rms < 1e-12);

    // weights must not move an exact fit
    d.y_err = {0.1, 0.5, 0.2, 0.9, 0.3};
    const FitResult w = fit_linear_shifted(d);
    CHECK(w.params[0] == Approx(2.0).epsilon(1e-12));
    CHECK(w.params[1] == Approx(3.0).epsilon(1e-12));
}

TEST_CASE("shifted line fit: errors shrink with tighter weights, zero "
          "slope rejected")
{
    CurveData d;
    d.x = {1.0, 2.0, 3.0, 4.0};
    d.y = {0.9, 2.1, 2.9, 4.1};
    const FitResult r = fit_linear_shifted(d);
    CHECK(r.params[0] == Approx(1.04).epsilon(1e-9));
    // residuals are symmetric, intercept close to zero
    CHECK(std::abs(r.params[1]) < 0.1);
    CHECK(r.param_errs[0] > 0.0);
    CHECK(r.param_errs[1] > 0.0);

    CurveData flat;
    flat.x = {1.0, 2.0, 3.0};
    flat.y = {5.0, 5.0, 5.0};
    CHECK_THROWS_AS(fit_linear_shifted(flat), FitError);
}

TEST_CASE("power law fit is exact in log-log coordinates")
{
    CurveData d;
    for (double x : {0.5, 1.0, 2.0, 3.0, 5.0}) {
        d.x.push_back(x);
        d.y.push_back(4.2 * std::pow(x, -1.014));
    }
    const FitResult r = fit_power_law(d);
    CHECK(r.model_id == "powerlaw");
    CHECK(r.params[0] == Approx(4.2).epsilon(1e-12));
    CHECK(r.params[1] == Approx(-1.014).epsilon(1e-12));

    CurveData inv;
    for (double x : {1.0, 2.0, 4.0}) {
        inv.x.push_back(x);
        inv.y.push_back(1.0 / x);
    }
    const FitResult ri = fit_power_law(inv);
    CHECK(ri.params[1] == Approx(-1.0).epsilon(1e-12));

    CurveData bad = d;
    bad.y[2] = 0.0;
    CHECK_THROWS_AS(fit_power_law(bad), FitError);
    bad = d;
    bad.x[0] = -0.5;
    CHECK_THROWS_AS(fit_power_law(bad), FitError);
}

TEST_CASE("fit results serialize to a stable CSV layout")
{
    FitResult r;
    r.model_id = "powerlaw";
    r.n_points = 5;
    r.residual_rms = 0.5;
    r.param_names = {"a", "b"};
    r.params = {4.25, -1.0};
    r.param_errs = {0.125, 0.0625};

    CHECK(fit_result_csv(r) ==
          "model,n_points,residual_rms,param,value,stderr,diagnostic\n"
          "powerlaw,5,0.5,a,4.25,0.125,\n"
          "powerlaw,5,0.5,b,-1,0.0625,\n");
    CHECK(fit_result_csv(r, false) ==
          "powerlaw,5,0.5,a,4.25,0.125,\n"
          "powerlaw,5,0.5,b,-1,0.0625,\n");
}

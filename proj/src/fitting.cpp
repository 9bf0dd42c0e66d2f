#include "pdc/fitting.hpp"

#include "pdc/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace pdc {

void CurveData::validate(size_t min_points) const
{
    if (x.size() != y.size())
        throw FitError("x and y lengths differ");
    if (!y_err.empty() && y_err.size() != y.size())
        throw FitError("y_err length differs from y");
    if (x.size() < min_points)
        throw FitError("need at least " + std::to_string(min_points) +
                       " points");
    for (double v : x)
        if (!std::isfinite(v))
            throw FitError("non-finite x value");
    for (double v : y)
        if (!std::isfinite(v))
            throw FitError("non-finite y value");
    for (double v : y_err)
        if (!(v > 0.0))
            throw FitError("y_err values must be positive");
}

namespace {

struct LineFit {
    double a = 0.0, q = 0.0;          // y = a x + q
    double var_a = 0.0, var_q = 0.0, cov_aq = 0.0;
    double sse = 0.0;                 // weighted
    double sxx = 0.0;
};

LineFit weighted_line(const std::vector<double>& x,
                      const std::vector<double>& y,
                      const std::vector<double>& w)
{
    const size_t n = x.size();
    double W = 0.0, mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        W += w[i];
        mx += w[i] * x[i];
        my += w[i] * y[i];
    }
    mx /= W;
    my /= W;
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += w[i] * (x[i] - mx) * (x[i] - mx);
        sxy += w[i] * (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0))
        throw FitError("x values are all identical");

    LineFit f;
    f.a = sxy / sxx;
    f.q = my - f.a * mx;
    f.sxx = sxx;
    for (size_t i = 0; i < n; ++i) {
        const double r = y[i] - (f.a * x[i] + f.q);
        f.sse += w[i] * r * r;
    }
    // scatter-scaled covariance of (a, q)
    const double s2 = n > 2 ? f.sse / (n - 2) : 0.0;
    f.var_a = s2 / sxx;
    f.var_q = s2 * (1.0 / W + mx * mx / sxx);
    f.cov_aq = -s2 * mx / sxx;
    return f;
}

std::vector<double> make_weights(const CurveData& d,
                                 const std::function<double(size_t)>& sigma)
{
    std::vector<double> w(d.x.size(), 1.0);
    if (!d.y_err.empty())
        for (size_t i = 0; i < w.size(); ++i) {
            const double s = sigma(i);
            w[i] = 1.0 / (s * s);
        }
    return w;
}

double rms_of(const std::vector<double>& y,
              const std::function<double(size_t)>& model)
{
    double sse = 0.0;
    for (size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - model(i);
        sse += r * r;
    }
    return std::sqrt(sse / y.size());
}

// ---- Nelder-Mead in 2 parameters ------------------------------------

struct Vertex {
    std::array<double, 2> t{};
    double f = std::numeric_limits<double>::infinity();
};

bool nelder_mead_2d(const std::function<double(const std::array<double, 2>&)>& fn,
                    std::array<double, 2>& theta, double& f_out)
{
    std::array<Vertex, 3> s;
    s[0].t = theta;
    s[1].t = {theta[0] + 0.3, theta[1]};
    s[2].t = {theta[0], theta[1] + 0.3};
    for (auto& v : s)
        v.f = fn(v.t);

    auto order = [&] {
        std::sort(s.begin(), s.end(),
                  [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    };
    order();

    for (int it = 0; it < 2000; ++it) {
        const double fspread = s[2].f - s[0].f;
        const double size = std::max(
            std::abs(s[1].t[0] - s[0].t[0]) + std::abs(s[1].t[1] - s[0].t[1]),
            std::abs(s[2].t[0] - s[0].t[0]) + std::abs(s[2].t[1] - s[0].t[1]));
        // Done when the objective spread reaches rounding level or the
        // simplex has collapsed in parameter space. Heavily weighted fits
        // bottom out on evaluation noise in f while the parameters keep
        // converging, so either signal alone must count.
        if (fspread <= 1e-14 * (1.0 + std::abs(s[0].f)) || size <= 1e-9) {
            theta = s[0].t;
            f_out = s[0].f;
            return true;
        }

        const std::array<double, 2> c = {(s[0].t[0] + s[1].t[0]) / 2.0,
                                         (s[0].t[1] + s[1].t[1]) / 2.0};
        auto mix = [&](double k) {
            return std::array<double, 2>{c[0] + k * (c[0] - s[2].t[0]),
                                         c[1] + k * (c[1] - s[2].t[1])};
        };
        Vertex refl{mix(1.0), 0.0};
        refl.f = fn(refl.t);
        if (refl.f < s[0].f) {
            Vertex expd{mix(2.0), 0.0};
            expd.f = fn(expd.t);
            s[2] = expd.f < refl.f ? expd : refl;
        } else if (refl.f < s[1].f) {
            s[2] = refl;
        } else {
            Vertex con{mix(refl.f < s[2].f ? 0.5 : -0.5), 0.0};
            con.f = fn(con.t);
            if (con.f < std::min(refl.f, s[2].f)) {
                s[2] = con;
            } else { // shrink toward the best vertex
                for (int i = 1; i < 3; ++i) {
                    s[i].t = {(s[i].t[0] + s[0].t[0]) / 2.0,
                              (s[i].t[1] + s[0].t[1]) / 2.0};
                    s[i].f = fn(s[i].t);
                }
            }
        }
        order();
    }
    theta = s[0].t;
    f_out = s[0].f;
    return false;
}

} // namespace

FitResult fit_sinh2(const CurveData& data)
{
    data.validate(3);
    for (double v : data.x)
        if (v < 0.0)
            throw FitError("sinh2 model requires x >= 0");
    const auto w = make_weights(data, [&](size_t i) { return data.y_err[i]; });

    size_t im = 0; // anchor point for initial k: largest x with positive y
    bool found = false;
    for (size_t i = 0; i < data.x.size(); ++i)
        if (data.y[i] > 0.0 && (!found || data.x[i] > data.x[im])) {
            im = i;
            found = true;
        }
    if (!found)
        throw FitError("sinh2 model requires at least one positive y");

    auto sse = [&](const std::array<double, 2>& t) {
        const double k = std::exp(t[0]), sig = std::exp(t[1]);
        double acc = 0.0;
        for (size_t i = 0; i < data.x.size(); ++i) {
            const double sh = std::sinh(sig * std::sqrt(data.x[i]));
            const double r = data.y[i] - k * sh * sh;
            acc += w[i] * r * r;
        }
        return std::isfinite(acc) ? acc
                                  : std::numeric_limits<double>::infinity();
    };

    std::array<double, 2> best{};
    double best_f = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (double sig0 : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double sh0 = std::sinh(sig0 * std::sqrt(data.x[im]));
        const double k0 = data.y[im] / (sh0 * sh0);
        if (!(k0 > 0.0) || !std::isfinite(k0))
            continue;
        std::array<double, 2> t{std::log(k0), std::log(sig0)};
        double f = 0.0;
        const bool ok = nelder_mead_2d(sse, t, f);
        if (f < best_f) {
            best_f = f;
            best = t;
            converged = ok;
        }
    }
    if (!std::isfinite(best_f))
        throw FitError("sinh2 fit found no finite objective");
    const double k = std::exp(best[0]), sig = std::exp(best[1]);
    if (!converged)
        throw FitError("sinh2 fit did not converge; best so far k=" +
                       std::to_string(k) + " sigma=" + std::to_string(sig));

    // Gauss-Newton covariance in (k, sigma) at the optimum
    const size_t n = data.x.size();
    double jkk = 0.0, jks = 0.0, jss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double rx = std::sqrt(data.x[i]);
        const double u = sig * rx;
        const double dk = std::sinh(u) * std::sinh(u);
        const double ds = k * std::sinh(2.0 * u) * rx;
        jkk += w[i] * dk * dk;
        jks += w[i] * dk * ds;
        jss += w[i] * ds * ds;
    }
    const double det = jkk * jss - jks * jks;
    const double s2 = n > 2 ? best_f / (n - 2) : 0.0;
    double ek = 0.0, es = 0.0;
    if (det > 0.0) {
        ek = std::sqrt(std::max(0.0, s2 * jss / det));
        es = std::sqrt(std::max(0.0, s2 * jkk / det));
    }

    FitResult res;
    res.model_id = "sinh2";
    res.param_names = {"k", "sigma"};
    res.params = {k, sig};
    res.param_errs = {ek, es};
    res.n_points = static_cast<int>(n);
    res.residual_rms = rms_of(data.y, [&](size_t i) {
        const double sh = std::sinh(sig * std::sqrt(data.x[i]));
        return k * sh * sh;
    });
    return res;
}

FitResult fit_linear_shifted(const CurveData& data)
{
    data.validate(2);
    const auto w = make_weights(data, [&](size_t i) { return data.y_err[i]; });
    const LineFit lf = weighted_line(data.x, data.y, w);

    double yscale = 0.0, xscale = 0.0;
    for (size_t i = 0; i < data.x.size(); ++i) {
        yscale = std::max(yscale, std::abs(data.y[i]));
        xscale = std::max(xscale, std::abs(data.x[i]));
    }
    if (std::abs(lf.a) * std::max(xscale, 1.0) <= 1e-12 * std::max(yscale, 1.0))
        throw FitError("slope is zero; the x-intercept is undefined");

    const double b = -lf.q / lf.a;
    // b = -q/a: propagate the (a, q) covariance
    const double db_da = lf.q / (lf.a * lf.a);
    const double db_dq = -1.0 / lf.a;
    const double var_b = db_da * db_da * lf.var_a + db_dq * db_dq * lf.var_q +
                         2.0 * db_da * db_dq * lf.cov_aq;

    FitResult res;
    res.model_id = "linear_shifted";
    res.param_names = {"a", "b"};
    res.params = {lf.a, b};
    res.param_errs = {std::sqrt(std::max(0.0, lf.var_a)),
                      std::sqrt(std::max(0.0, var_b))};
    res.n_points = static_cast<int>(data.x.size());
    res.residual_rms = rms_of(data.y, [&](size_t i) {
        return lf.a * (data.x[i] - b);
    });
    return res;
}

FitResult fit_power_law(const CurveData& data)
{
    data.validate(2);
    for (size_t i = 0; i < data.x.size(); ++i)
        if (!(data.x[i] > 0.0) || !(data.y[i] > 0.0))
            throw FitError("power law requires positive x and y");

    std::vector<double> lx(data.x.size()), ly(data.y.size());
    for (size_t i = 0; i < data.x.size(); ++i) {
        lx[i] = std::log(data.x[i]);
        ly[i] = std::log(data.y[i]);
    }
    // relative y errors become absolute errors of ln y
    const auto w =
        make_weights(data, [&](size_t i) { return data.y_err[i] / data.y[i]; });
    const LineFit lf = weighted_line(lx, ly, w);

    const double a = std::exp(lf.q);
    FitResult res;
    res.model_id = "powerlaw";
    res.param_names = {"a", "b"};
    res.params = {a, lf.a};
    res.param_errs = {a * std::sqrt(std::max(0.0, lf.var_q)),
                      std::sqrt(std::max(0.0, lf.var_a))};
    res.n_points = static_cast<int>(data.x.size());
    res.residual_rms = rms_of(data.y, [&](size_t i) {
        return a * std::pow(data.x[i], lf.a);
    });
    return res;
}

std::string fit_result_csv(const FitResult& res, bool with_header)
{
    auto fmt = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    std::string s;
    if (with_header)
        s = "model,n_points,residual_rms,param,value,stderr,diagnostic\n";
    for (size_t i = 0; i < res.params.size(); ++i)
        s += res.model_id + ',' + std::to_string(res.n_points) + ',' +
             fmt(res.residual_rms) + ',' + res.param_names[i] + ',' +
             fmt(res.params[i]) + ',' + fmt(res.param_errs[i]) + ",\n";
    return s;
}

} // namespace pdc

#pragma once

#include <complex>

#include "pdc/error.hpp"

namespace pdc {

struct QVec {
    double x = 0.0;
    double y = 0.0;
    double norm2() const { return x * x + y * y; }
};

inline QVec operator+(QVec a, QVec b) { return {a.x + b.x, a.y + b.y}; }
inline QVec operator-(QVec a) { return {-a.x, -a.y}; }

struct CrystalParams {
    double length_l = 0.01;     // meters
    double n_signal = 1.66;     // refractive indices, configurable constants
    double n_idler = 1.66;
    double n_pump = 1.57;
    double chi2_gain_g = 1.5;   // dimensionless gain at beam center

    void validate() const
    {
        if (!(length_l > 0.0))
            throw ConfigError("CrystalParams: length_l must be > 0");
        if (n_signal < 1.0 || n_idler < 1.0 || n_pump < 1.0)
            throw ConfigError("CrystalParams: refractive indices must be >= 1");
        if (chi2_gain_g < 0.0)
            throw ConfigError("CrystalParams: chi2_gain_g must be >= 0");
    }
};

struct PumpParams {
    double waist_wp = 0.65e-3;  // meters, Gaussian amplitude radius
    double wavelength_p = 355e-9;
    double peak_power = 0.78e6; // watts; enters only through g proportional to sqrt(power)

    void validate() const
    {
        if (!(waist_wp > 0.0) || !(wavelength_p > 0.0) || !(peak_power > 0.0))
            throw ConfigError("PumpParams: waist, wavelength, power must be > 0");
    }

    double wavelength_signal() const { return 2.0 * wavelength_p; } // degenerate
};

enum class Detuning {
    ideal,               // delta_k == 0 everywhere
    paraxial_degenerate, // (|q1|^2+|q2|^2)/(2 k_deg) - dk0
};

struct DetuningModel {
    Detuning variant = Detuning::ideal;
    double center_angle_theta = 0.05; // radians, for the analytic sinc-HWHM predictor
    double dk0 = 0.0;                 // collinear offset of the paraxial expansion
};

// k_z = sqrt(k^2 - q^2) with k = omega n / c.
double k_longitudinal(double q, double omega, double n);

// degenerate signal/idler wave number 2 pi n_signal / (2 lambda_p)
double degenerate_wavenumber(const CrystalParams& crystal, const PumpParams& pump);

double delta_k(QVec q1, QVec q2, const DetuningModel& model,
               const CrystalParams& crystal, const PumpParams& pump);

// F(q1,q2) = g sinc(delta_k l/2) exp(-|q1+q2|^2 w_p^2 / 4)
std::complex<double> two_photon_amplitude(QVec q1, QVec q2,
                                          const CrystalParams& crystal,
                                          const PumpParams& pump,
                                          const DetuningModel& model);

// phase-matching HWHM 2.78/(l tan(theta)), the standard noncollinear estimate
double predicted_hwhm_sinc(const CrystalParams& crystal, double theta);

// pump-limited HWHM sqrt(2 ln 2)/w_p
double predicted_hwhm_pump(const PumpParams& pump);

// delta_q / Delta_q; < 1 means the pump Gaussian, not the sinc, sets the
// coherence area
double hwhm_regime_ratio(const CrystalParams& crystal, const PumpParams& pump, double theta);

// sinh^2(g)
double mean_photons_per_mode(double g);

// sin(u)/u with sinc(0) = 1
double sinc(double u);

} // namespace pdc

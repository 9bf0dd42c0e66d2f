#include "pdc/kernel.hpp"

#include <cmath>
#include <string>

namespace pdc {

namespace {
constexpr double c_light = 299792458.0;
}

double sinc(double u)
{
    // series switch keeps full precision through u -> 0
    if (std::abs(u) < 1e-4)
        return 1.0 - u * u / 6.0;
    return std::sin(u) / u;
}

double k_longitudinal(double q, double omega, double n)
{
    const double k = omega * n / c_light;
    if (std::abs(q) > k)
        throw DomainError("k_longitudinal: |q| = " + std::to_string(std::abs(q)) +
                          " outside the light cone (k = " + std::to_string(k) +
                          "); grid wider than physical");
    return std::sqrt(k * k - q * q);
}

double degenerate_wavenumber(const CrystalParams& crystal, const PumpParams& pump)
{
    return 2.0 * M_PI * crystal.n_signal / pump.wavelength_signal();
}

double delta_k(QVec q1, QVec q2, const DetuningModel& model,
               const CrystalParams& crystal, const PumpParams& pump)
{
    const double k_deg = degenerate_wavenumber(crystal, pump);
    const double k2 = k_deg * k_deg;
    if (q1.norm2() > k2 || q2.norm2() > k2)
        throw DomainError("delta_k: transverse momentum outside the light cone");
    switch (model.variant) {
    case Detuning::ideal:
        return 0.0;
    case Detuning::paraxial_degenerate:
        return (q1.norm2() + q2.norm2()) / (2.0 * k_deg) - model.dk0;
    }
    throw ConfigError("delta_k: unknown detuning variant");
}

std::complex<double> two_photon_amplitude(QVec q1, QVec q2,
                                          const CrystalParams& crystal,
                                          const PumpParams& pump,
                                          const DetuningModel& model)
{
    const double dk = delta_k(q1, q2, model, crystal, pump);
    const double wp = pump.waist_wp;
    const double sum2 = (q1 + q2).norm2();
    const double envelope = std::exp(-sum2 * wp * wp / 4.0);
    return {crystal.chi2_gain_g * sinc(dk * crystal.length_l / 2.0) * envelope, 0.0};
}

double predicted_hwhm_sinc(const CrystalParams& crystal, double theta)
{
    if (!(theta > 0.0) || !(theta < M_PI / 2.0))
        throw DomainError("predicted_hwhm_sinc: theta must be in (0, pi/2)");
    return 2.78 / (crystal.length_l * std::tan(theta));
}

double predicted_hwhm_pump(const PumpParams& pump)
{
    if (!(pump.waist_wp > 0.0))
        throw DomainError("predicted_hwhm_pump: w_p must be > 0");
    return std::sqrt(2.0 * std::log(2.0)) / pump.waist_wp;
}

double hwhm_regime_ratio(const CrystalParams& crystal, const PumpParams& pump, double theta)
{
    return predicted_hwhm_pump(pump) / predicted_hwhm_sinc(crystal, theta);
}

double mean_photons_per_mode(double g)
{
    if (g < 0.0)
        throw DomainError("mean_photons_per_mode: g must be >= 0");
    const double s = std::sinh(g);
    return s * s;
}

} // namespace pdc

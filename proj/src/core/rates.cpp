#include "rates.hpp"

#include <cmath>

#include "errors.hpp"

namespace qmheat {

std::vector<std::string> BathSpec::validate() const {
    if (!(kappa >= 0.0) || !std::isfinite(kappa))
        throw DomainError("bath '" + label + "': kappa must be finite and >= 0");
    if (!(temperature >= 0.0) || !std::isfinite(temperature))
        throw DomainError("bath '" + label + "': temperature must be finite and >= 0");
    if (!(cutoff > 0.0) || !std::isfinite(cutoff))
        throw DomainError("bath '" + label + "': cutoff must be finite and > 0");
    std::vector<std::string> warnings;
    if (kappa >= 0.1)
        warnings.push_back("bath '" + label + "': kappa = " + std::to_string(kappa) +
                           " is outside the weak-coupling regime (kappa << 1) assumed by the "
                           "Lindblad description");
    return warnings;
}

void MeasurementSpec::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw DomainError("measurement: gamma must be finite and >= 0");
    if (!(theta >= 0.0 && theta <= M_PI))
        throw DomainError("measurement: theta must lie in [0, pi]");
    if (!std::isfinite(phi))
        throw DomainError("measurement: phi must be finite");
}

double MeasurementSpec::alpha() const { return -0.5 * std::cos(theta); }

std::complex<double> MeasurementSpec::beta() const {
    const double s = 0.5 * std::sin(theta);
    return {s * std::cos(phi), s * std::sin(phi)};
}

double ohmic_spectral_density(double omega, const BathSpec& bath) {
    if (omega < 0.0 || !std::isfinite(omega))
        throw DomainError("ohmic_spectral_density: omega must be finite and >= 0");
    return 2.0 * bath.kappa * omega * std::exp(-omega / bath.cutoff);
}

double bose_einstein(double energy, double temperature) {
    if (!(energy > 0.0) || !std::isfinite(energy))
        throw DomainError("bose_einstein: energy must be finite and > 0");
    if (temperature < 0.0)
        throw DomainError("bose_einstein: temperature must be >= 0");
    if (temperature == 0.0)
        return 0.0;
    // expm1 keeps full precision for energy << T; overflow to +inf gives n = 0.
    return 1.0 / std::expm1(energy / temperature);
}

RatePair bath_rates(double delta, const BathSpec& bath) {
    if (!(delta > 0.0))
        throw DomainError("bath_rates: level splitting must be > 0");
    bath.validate();
    const double I = ohmic_spectral_density(delta, bath);
    const double n = bose_einstein(delta, bath.temperature);
    return {0.5 * M_PI * I * n, 0.5 * M_PI * I * (1.0 + n)};
}

Rates aggregate_rates(const std::vector<RatePair>& rates, double gamma) {
    Rates out;
    for (const auto& r : rates) {
        out.gamma_plus += r.emit + r.absorb;
        out.gamma_minus += r.emit - r.absorb;
    }
    out.gamma_tilde_plus = out.gamma_plus + 0.5 * gamma;
    return out;
}

std::pair<double, std::complex<double>> projector_coeffs(double theta, double phi) {
    MeasurementSpec m{0.0, theta, phi};
    m.validate();
    return {m.alpha(), m.beta()};
}

} // namespace qmheat

#ifndef QMHEAT_CORE_RATES_HPP
#define QMHEAT_CORE_RATES_HPP

#include <complex>
#include <string>
#include <vector>

namespace qmheat {

// Units: hbar = kB = 1; energies in units of the qubit splitting Delta, times in 1/Delta.

// One Ohmic heat bath, I(w) = 2*kappa*w*exp(-w/cutoff).
struct BathSpec {
    double kappa = 0.0;       // dimensionless coupling, >= 0
    double temperature = 0.0; // kB*T, >= 0
    double cutoff = 10.0;     // w_c, > 0
    std::string label;

    // Throws DomainError on invalid fields; returns human-readable warnings
    // (e.g. coupling too large for the weak-coupling master equation).
    std::vector<std::string> validate() const;
};

// Continuously monitored pure state |n> = cos(theta/2)|g> + e^{i phi} sin(theta/2)|e>,
// measured at strength gamma. The projector onto |n> decomposes as
// P = I/2 + alpha*sigma_z + beta*sigma_+ + beta^* sigma_-, with alpha^2 + |beta|^2 = 1/4.
struct MeasurementSpec {
    double gamma = 0.0; // measurement strength, >= 0
    double theta = 0.0; // zenith angle in [0, pi]; theta=0 measures |g>, theta=pi |e>
    double phi = 0.0;   // azimuth

    double alpha() const;
    std::complex<double> beta() const;

    void validate() const; // throws DomainError
};

// Golden-rule absorption/emission rates of one bath at a given transition energy.
struct RatePair {
    double absorb = 0.0; // Gamma^a
    double emit = 0.0;   // Gamma^e
};

// Aggregated relaxation rates over all baths plus the measurement strength.
struct Rates {
    double gamma_plus = 0.0;       // Gamma_+ = sum_r (Gamma^e_r + Gamma^a_r)
    double gamma_minus = 0.0;      // Gamma_- = sum_r (Gamma^e_r - Gamma^a_r)
    double gamma_tilde_plus = 0.0; // Gamma_+ + gamma/2
};

// I(w) = 2*kappa*w*exp(-w/cutoff). Throws DomainError for w < 0.
double ohmic_spectral_density(double omega, const BathSpec& bath);

// n(e) = 1/(exp(e/T) - 1); exactly 0 at T = 0. Throws DomainError for e <= 0.
double bose_einstein(double energy, double temperature);

// absorb = (pi/2) I(delta) n(delta), emit = (pi/2) I(delta) (1 + n(delta)).
RatePair bath_rates(double delta, const BathSpec& bath);

Rates aggregate_rates(const std::vector<RatePair>& rates, double gamma);

// (alpha, beta) of the projector decomposition for the measured state (theta, phi).
std::pair<double, std::complex<double>> projector_coeffs(double theta, double phi);

} // namespace qmheat

#endif

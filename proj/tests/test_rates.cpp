#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "core/errors.hpp"
#include "core/rates.hpp"

using namespace qmheat;

namespace {
const BathSpec kBath{0.01, 1.0, 10.0, "test"};
} // namespace

TEST_CASE("ohmic spectral density matches 2*kappa*w*exp(-w/wc)") {
    // At the cutoff the exponential is exactly 1/e.
    const double at_cutoff = ohmic_spectral_density(10.0, kBath);
    CHECK(std::abs(at_cutoff - 0.2 / std::exp(1.0)) <= 1e-17);
    CHECK(at_cutoff == doctest::Approx(0.07357588823428847).epsilon(1e-15));

    CHECK(ohmic_spectral_density(0.0, kBath) == 0.0);

    // Linear in omega for omega << cutoff, exactly linear in kappa.
    const double lo = ohmic_spectral_density(1e-6, kBath);
    CHECK(lo / 1e-6 == doctest::Approx(2.0 * kBath.kappa).epsilon(1e-6));
    BathSpec doubled = kBath;
    doubled.kappa = 0.02;
    CHECK(ohmic_spectral_density(3.0, doubled) == 2.0 * ohmic_spectral_density(3.0, kBath));
}

TEST_CASE("ohmic spectral density rejects negative and non-finite frequencies") {
    CHECK_THROWS_AS((void)ohmic_spectral_density(-1.0, kBath), DomainError);
    CHECK_THROWS_AS((void)ohmic_spectral_density(std::nan(""), kBath), DomainError);
    CHECK_THROWS_AS((void)ohmic_spectral_density(INFINITY, kBath), DomainError);
}

TEST_CASE("bose occupation: exact values, T=0, and asymptotics") {
    // 1/(e^{1/5} - 1) evaluated independently.
    CHECK(bose_einstein(1.0, 5.0) == doctest::Approx(4.516655566126994).epsilon(1e-15));
    CHECK(bose_einstein(1.0, 0.0) == 0.0);
    // High-temperature limit n -> T/e - 1/2.
    const double n_hot = bose_einstein(1.0, 1e8);
    CHECK(n_hot == doctest::Approx(1e8 - 0.5).epsilon(1e-10));
    // Low temperature: n -> e^{-e/T}, no underflow surprises.
    CHECK(bose_einstein(1.0, 0.01) == doctest::Approx(std::exp(-100.0)).epsilon(1e-12));

    CHECK_THROWS_AS((void)bose_einstein(0.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)bose_einstein(-1.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)bose_einstein(1.0, -1.0), DomainError);
}

TEST_CASE("bath rates obey detailed balance emit/absorb = exp(delta/T)") {
    const double delta = 1.0;
    for (double temperature : {0.5, 1.0, 2.0, 7.3}) {
        BathSpec bath = kBath;
        bath.temperature = temperature;
        const RatePair r = bath_rates(delta, bath);
        CHECK(r.emit > 0.0);
        CHECK(r.absorb > 0.0);
        const double ratio = r.emit / r.absorb;
        CHECK(ratio == doctest::Approx(std::exp(delta / temperature)).epsilon(1e-13));
        // emit - absorb = (pi/2) I(delta), independent of temperature.
        const double gap = r.emit - r.absorb;
        CHECK(gap ==
              doctest::Approx(0.5 * M_PI * ohmic_spectral_density(delta, bath)).epsilon(1e-13));
    }

    // Zero temperature: no absorption, spontaneous emission only.
    BathSpec cold = kBath;
    cold.temperature = 0.0;
    const RatePair r0 = bath_rates(1.0, cold);
    CHECK(r0.absorb == 0.0);
    CHECK(r0.emit == doctest::Approx(0.5 * M_PI * ohmic_spectral_density(1.0, cold)));

    CHECK_THROWS_AS((void)bath_rates(0.0, kBath), DomainError);
    CHECK_THROWS_AS((void)bath_rates(-2.0, kBath), DomainError);
}

TEST_CASE("aggregate rates sum channels and add half the measurement strength") {
    const std::vector<RatePair> pairs = {{0.010, 0.030}, {0.002, 0.005}};
    const Rates r = aggregate_rates(pairs, 0.04);
    CHECK(r.gamma_plus == doctest::Approx(0.047).epsilon(1e-15));
    CHECK(r.gamma_minus == doctest::Approx(0.023).epsilon(1e-15));
    CHECK(r.gamma_tilde_plus == doctest::Approx(0.067).epsilon(1e-15));

    const Rates empty = aggregate_rates({}, 0.2);
    CHECK(empty.gamma_plus == 0.0);
    CHECK(empty.gamma_minus == 0.0);
    CHECK(empty.gamma_tilde_plus == doctest::Approx(0.1));
}

TEST_CASE("projector coefficients satisfy alpha^2 + |beta|^2 = 1/4") {
    for (double theta : {0.0, 0.3, M_PI / 2, 2.0, M_PI}) {
        for (double phi : {0.0, 0.7, M_PI}) {
            const auto [alpha, beta] = projector_coeffs(theta, phi);
            CHECK(alpha == doctest::Approx(-0.5 * std::cos(theta)).epsilon(1e-15));
            CHECK(std::abs(beta - 0.5 * std::sin(theta) * std::exp(std::complex<double>(0, phi))) <=
                  1e-16);
            CHECK(alpha * alpha + std::norm(beta) == doctest::Approx(0.25).epsilon(1e-15));
        }
    }
    // Poles: theta=0 measures the lower level, theta=pi the upper one.
    CHECK(projector_coeffs(0.0, 0.0).first == -0.5);
    CHECK(std::abs(projector_coeffs(0.0, 0.0).second) == 0.0);
    CHECK(projector_coeffs(M_PI, 0.0).first == 0.5);

    CHECK_THROWS_AS((void)projector_coeffs(-0.1, 0.0), DomainError);
    CHECK_THROWS_AS((void)projector_coeffs(M_PI + 0.1, 0.0), DomainError);
}

TEST_CASE("MeasurementSpec validation") {
    MeasurementSpec ok{0.01, 1.0, 2.0};
    CHECK_NOTHROW(ok.validate());

    MeasurementSpec bad_gamma{-1e-3, 1.0, 0.0};
    CHECK_THROWS_AS(bad_gamma.validate(), DomainError);
    MeasurementSpec nan_gamma{std::nan(""), 1.0, 0.0};
    CHECK_THROWS_AS(nan_gamma.validate(), DomainError);
    MeasurementSpec bad_phi{0.01, 1.0, INFINITY};
    CHECK_THROWS_AS(bad_phi.validate(), DomainError);
}

TEST_CASE("BathSpec validation: errors and weak-coupling warning") {
    BathSpec ok = kBath;
    CHECK(ok.validate().empty());

    BathSpec strong = kBath;
    strong.kappa = 0.5;
    const auto warnings = strong.validate();
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("weak-coupling") != std::string::npos);

    BathSpec bad = kBath;
    bad.kappa = -0.01;
    CHECK_THROWS_AS((void)bad.validate(), DomainError);
    bad = kBath;
    bad.temperature = -1.0;
    CHECK_THROWS_AS((void)bad.validate(), DomainError);
    bad = kBath;
    bad.cutoff = 0.0;
    CHECK_THROWS_AS((void)bad.validate(), DomainError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "core/errors.hpp"
#include "core/lindblad.hpp"

using namespace qmheat;
using std::complex;

namespace {

const complex<double> kI{0.0, 1.0};

Mat random_matrix(int n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = complex<double>(u(rng), u(rng));
    return m;
}

Mat random_density(int n, std::mt19937_64& rng) {
    const Mat a = random_matrix(n, rng);
    Mat rho = a * a.adjoint();
    rho /= rho.trace().real();
    return rho;
}

// Direct (unvectorized) evaluation of the generator.
Mat direct_rhs(const LindbladModel& m, const Mat& rho) {
    Mat out = -kI * (m.hamiltonian * rho - rho * m.hamiltonian);
    for (const auto& ch : m.channels)
        out += dissipator_apply(ch, rho);
    return out;
}

LindbladModel decay_qubit(double rate) {
    // Basis (|e>, |g>): spontaneous emission only.
    LindbladModel m;
    m.dim = 2;
    m.hamiltonian = Mat::Zero(2, 2);
    m.hamiltonian(0, 0) = 0.5;
    m.hamiltonian(1, 1) = -0.5;
    Mat lower = Mat::Zero(2, 2);
    lower(1, 0) = 1.0; // |g><e|
    m.channels.push_back({lower, rate});
    return m;
}

} // namespace

TEST_CASE("model validation catches structural mistakes") {
    LindbladModel m = decay_qubit(0.1);
    CHECK_NOTHROW(m.validate());

    LindbladModel bad = m;
    bad.hamiltonian(0, 1) = 0.3; // breaks Hermiticity
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    bad = m;
    bad.channels[0].op = Mat::Zero(3, 3);
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    bad = m;
    bad.channels[0].weight = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    bad = m;
    bad.measurement_index = 5;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    CHECK(m.measurement() == nullptr);
    m.measurement_index = 0;
    CHECK(m.measurement() == &m.channels[0]);
}

TEST_CASE("measurement_channel accepts projectors only") {
    // Rank-1 projector onto the tilted state (1/2, e^{i pi/3} sqrt(3)/2).
    Eigen::Vector2cd v;
    v << 0.5, 0.5 * std::sqrt(3.0) * std::exp(complex<double>(0.0, M_PI / 3));
    const Mat p = v * v.adjoint();
    const Channel ch = measurement_channel(p, 0.02);
    CHECK(ch.weight == 0.02);
    CHECK((ch.op - p).norm() == 0.0);

    CHECK_THROWS_AS((void)measurement_channel(2.0 * p, 0.02), InvalidArgument);
    Mat nonherm = p;
    nonherm(0, 1) += complex<double>(0.0, 0.4);
    CHECK_THROWS_AS((void)measurement_channel(nonherm, 0.02), InvalidArgument);
    CHECK_THROWS_AS((void)measurement_channel(p, -0.1), InvalidArgument);
}

TEST_CASE("dissipator is traceless and annihilates invariant states") {
    std::mt19937_64 rng(7);
    const Mat l = random_matrix(3, rng);
    const Channel ch{l, 0.7};
    const Mat rho = random_density(3, rng);
    const Mat d = dissipator_apply(ch, rho);
    CHECK(std::abs(d.trace()) <= 1e-14);

    // A projector channel leaves its own subspace states untouched.
    Mat p = Mat::Zero(2, 2);
    p(0, 0) = 1.0;
    const Mat fixed = p; // rho = P itself
    CHECK(dissipator_apply({p, 0.9}, fixed).norm() <= 1e-15);
}

TEST_CASE("vectorized Liouvillian reproduces the direct generator") {
    std::mt19937_64 rng(11);
    for (int dim : {2, 3, 4}) {
        LindbladModel m;
        m.dim = dim;
        const Mat a = random_matrix(dim, rng);
        m.hamiltonian = a + a.adjoint();
        m.channels.push_back({random_matrix(dim, rng), 0.3});
        m.channels.push_back({random_matrix(dim, rng), 0.05});

        const Mat L = build_liouvillian(m);
        REQUIRE(L.rows() == dim * dim);

        const Mat rho = random_density(dim, rng);
        const Vec v = Eigen::Map<const Vec>(rho.data(), dim * dim);
        const Vec lv = L * v;
        const Mat from_l = Eigen::Map<const Mat>(lv.data(), dim, dim);
        const Mat direct = direct_rhs(m, rho);
        CAPTURE(dim);
        CHECK((from_l - direct).norm() <= 1e-13 * std::max(1.0, direct.norm()));
    }
}

TEST_CASE("long-double Liouvillian matches the double build") {
    std::mt19937_64 rng(13);
    LindbladModel m;
    m.dim = 3;
    const Mat a = random_matrix(3, rng);
    m.hamiltonian = a + a.adjoint();
    m.channels.push_back({random_matrix(3, rng), 0.2});
    const Mat L = build_liouvillian(m);
    const MatLD Lld = build_liouvillian_ld(m);
    CHECK((Lld.cast<complex<double>>() - L).norm() <= 1e-15 * L.norm());
}

TEST_CASE("steady state of a decaying qubit is the ground state") {
    const LindbladModel m = decay_qubit(0.05);
    const Mat rho = steady_state(m);
    CHECK(std::abs(rho(1, 1).real() - 1.0) <= 1e-12);
    CHECK(std::abs(rho(0, 0)) <= 1e-12);
    CHECK(std::abs(rho(0, 1)) <= 1e-12);
    CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-13);

    const MatLD rho_ld = steady_state_ld(m);
    CHECK(std::abs((double)rho_ld(1, 1).real() - 1.0) <= 1e-15);
}

TEST_CASE("steady state requires a one-dimensional kernel") {
    // A projector channel alone preserves every diagonal state: kernel dim > 1.
    LindbladModel m;
    m.dim = 2;
    m.hamiltonian = Mat::Zero(2, 2);
    m.hamiltonian(0, 0) = 0.5;
    m.hamiltonian(1, 1) = -0.5;
    Mat p = Mat::Zero(2, 2);
    p(1, 1) = 1.0;
    m.channels.push_back(measurement_channel(p, 0.1));
    m.measurement_index = 0;
    CHECK_THROWS_AS((void)steady_state(build_liouvillian(m)), DegenerateModel);
    CHECK_THROWS_AS((void)steady_state_ld(m), DegenerateModel);
}

TEST_CASE("qubit bridge: channels, weights, and steady-state agreement") {
    const QubitModel q = QubitModel::from_rates(1.0, 0.02, 0.012, {0.03, 1.1, 0.7});
    const LindbladModel m = lindblad_model_from_qubit(q);
    REQUIRE(m.dim == 2);
    REQUIRE(m.channels.size() == 3);
    REQUIRE(m.measurement() != nullptr);

    // Emission/absorption weights reconstruct Gamma_+ and Gamma_-.
    const double we = m.channels[0].weight, wa = m.channels[1].weight;
    CHECK(we + wa == doctest::Approx(q.gamma_plus()).epsilon(1e-14));
    CHECK(we - wa == doctest::Approx(q.gamma_minus()).epsilon(1e-14));
    CHECK(m.measurement()->weight == q.meas().gamma);

    // The measurement operator is the projector onto the measured state.
    const Mat p = m.measurement()->op;
    CHECK((p * p - p).norm() <= 1e-14);
    CHECK(std::abs(p.trace().real() - 1.0) <= 1e-14);
    const auto [alpha, beta] = projector_coeffs(1.1, 0.7);
    CHECK(std::abs(p(0, 0).real() - (0.5 + alpha)) <= 1e-15);
    CHECK(std::abs(p(0, 1) - beta) <= 1e-15);

    // Engine steady state matches the closed-form Bloch fixed point.
    const BlochState viengine = bloch_from_density(steady_state(m));
    const BlochState closed = steady_state_bloch(q);
    CHECK(std::abs(viengine.x - closed.x) <= 1e-10);
    CHECK(std::abs(viengine.y - closed.y) <= 1e-10);
    CHECK(std::abs(viengine.z - closed.z) <= 1e-10);
}

TEST_CASE("bloch <-> density conversions round-trip") {
    const BlochState s{0.3, -0.5, 0.4, 2.0};
    const Mat rho = density_from_bloch(s);
    CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-16);
    CHECK((rho - rho.adjoint()).norm() <= 1e-16);
    // z = +1 is the upper level in the (|e>, |g>) ordering.
    CHECK(density_from_bloch({0, 0, 1, 0})(0, 0).real() == doctest::Approx(1.0));

    const BlochState back = bloch_from_density(rho);
    CHECK(back.x == doctest::Approx(s.x).epsilon(1e-15));
    CHECK(back.y == doctest::Approx(s.y).epsilon(1e-15));
    CHECK(back.z == doctest::Approx(s.z).epsilon(1e-15));
}

TEST_CASE("evolve reproduces the pole closed form through the exponential") {
    const QubitModel q = QubitModel::from_rates(1.0, 0.02, 0.01, {0.01, 0.0, 0.0});
    const LindbladModel m = lindblad_model_from_qubit(q);
    const Mat L = build_liouvillian(m);
    const BlochState init{0.6, -0.3, 0.2, 0.0};

    std::vector<double> grid;
    for (int k = 0; k <= 40; ++k)
        grid.push_back(0.25 * k);
    const auto states = evolve(L, density_from_bloch(init), grid);
    REQUIRE(states.size() == grid.size());

    double worst = 0.0;
    for (size_t k = 0; k < grid.size(); ++k) {
        const BlochState got = bloch_from_density(states[k]);
        const BlochState want = closed_form_case_i(grid[k], init, q);
        worst = std::max({worst, std::abs(got.x - want.x), std::abs(got.y - want.y),
                          std::abs(got.z - want.z)});
    }
    CHECK(worst <= 1e-12);
    // rho0 is returned untouched at t = 0.
    CHECK((states[0] - density_from_bloch(init)).norm() == 0.0);
}

TEST_CASE("evolve validates its grid") {
    const Mat L = build_liouvillian(decay_qubit(0.1));
    const Mat rho0 = density_from_bloch({0, 0, 1, 0});
    CHECK_THROWS_AS((void)evolve(L, rho0, {0.0, 0.5, 0.5}), InvalidArgument);
    CHECK_THROWS_AS((void)evolve(L, rho0, {-1.0, 0.5}), InvalidArgument);
    CHECK_THROWS_AS((void)evolve(L, Mat::Zero(3, 3), {0.5}), InvalidArgument);
    CHECK(evolve(L, rho0, {}).empty());
}

TEST_CASE("evolution is completely positive and trace preserving in practice") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const int dim = 2 + trial % 3;
        LindbladModel m;
        m.dim = dim;
        const Mat a = random_matrix(dim, rng);
        m.hamiltonian = a + a.adjoint();
        m.channels.push_back({random_matrix(dim, rng), 0.4});
        m.channels.push_back({random_matrix(dim, rng), 0.1});

        const Mat L = build_liouvillian(m);
        const Mat rho0 = random_density(dim, rng);
        std::vector<double> grid{0.5, 1.0, 2.0, 4.0};
        for (const Mat& rho : evolve(L, rho0, grid)) {
            CHECK(std::abs(rho.trace().real() - 1.0) <= 1e-11);
            CHECK((rho - rho.adjoint()).norm() <= 1e-11);
            Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (rho + rho.adjoint()));
            CHECK(es.eigenvalues().minCoeff() >= -1e-10);
        }
    }
}

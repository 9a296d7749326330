#include "heat.hpp"

#include <cmath>

#include "errors.hpp"

namespace qmheat {

double heat_current_instant(const BlochState& s, const MeasurementSpec& meas, double delta) {
    const double g = meas.gamma;
    const double a = meas.alpha();
    const std::complex<double> b = meas.beta();
    const double b2 = std::norm(b);
    return -g * delta * b2 * s.z + a * g * delta * (b.real() * s.x - b.imag() * s.y);
}

double heat_current_general(const Channel& measurement, const Mat& rho,
                            const std::vector<double>& energies) {
    if (static_cast<Eigen::Index>(energies.size()) != rho.rows() || rho.rows() != rho.cols())
        throw InvalidArgument("heat_current_general: energies must match the state dimension");
    const Mat d = dissipator_apply(measurement, rho);
    double j = 0.0;
    for (Eigen::Index k = 0; k < d.rows(); ++k)
        j += energies[static_cast<size_t>(k)] * d(k, k).real();
    return j;
}

namespace {

double closed_form_denominator(const QubitModel& m) {
    const double D = m.delta(), Gp = m.gamma_plus(), g = m.meas().gamma;
    const double b2 = std::norm(m.meas().beta());
    const double den = 4.0 * D * D * (Gp + 2.0 * b2 * g) + Gp * (Gp + g) * (Gp + g - 2.0 * b2 * g);
    const double scale = std::max({D, Gp, g});
    if (!(den > 1e-30 * scale * scale * scale * scale))
        throw DegenerateModel("steady-state current: vanishing denominator (no unique steady state)");
    return den;
}

} // namespace

double steady_state_heat_current(const QubitModel& m) {
    const double D = m.delta(), Gp = m.gamma_plus(), Gm = m.gamma_minus(), g = m.meas().gamma;
    const double b2 = std::norm(m.meas().beta());
    const double den = closed_form_denominator(m);
    return b2 * D * g * Gm * (4.0 * D * D + Gp * (Gp + g)) / den;
}

double steady_state_current_engine(const QubitModel& m) {
    const LindbladModel lm = lindblad_model_from_qubit(m);
    const MatLD rho = steady_state_ld(lm);

    // Evaluate sum_k E_k <k|D_M[rho]|k> in extended precision: the current sits
    // many orders below the population scale when Gamma_- or sin(theta) is small.
    const MatLD P = lm.measurement()->op.cast<std::complex<long double>>();
    const long double g = static_cast<long double>(lm.measurement()->weight);
    const MatLD PdP = P.adjoint() * P;
    const MatLD d = g * (P * rho * P.adjoint() - 0.5L * (PdP * rho + rho * PdP));
    const long double E0 = 0.5L * static_cast<long double>(m.delta());
    return static_cast<double>(E0 * d(0, 0).real() - E0 * d(1, 1).real());
}

std::pair<double, double> heat_current_bounds(const QubitModel& m) {
    const double denom = 4.0 * m.gamma_plus() + 2.0 * m.meas().gamma;
    if (denom <= 0.0)
        return {0.0, 0.0};
    return {0.0, m.delta() * m.meas().gamma * m.gamma_minus() / denom};
}

double transient_heat_current_equator(double t, double z0, const QubitModel& m) {
    if (std::abs(m.meas().alpha()) > 1e-12)
        throw InvalidArgument("transient_heat_current_equator: requires an equator measurement");
    const double g = m.meas().gamma, D = m.delta(), Gm = m.gamma_minus();
    const double gt = m.gamma_tilde_plus();
    if (gt <= 0.0)
        return 0.0;
    return 0.25 * g * D * (Gm / gt - (z0 + Gm / gt) * std::exp(-gt * t));
}

HeatSeries heat_series(const QubitModel& m, const BlochState& init, double t_end, double dt) {
    const Trajectory traj = integrate(m, init, t_end, dt);
    HeatSeries s;
    s.times.reserve(traj.states.size());
    s.values.reserve(traj.states.size());
    for (const auto& st : traj.states) {
        s.times.push_back(st.t);
        s.values.push_back(heat_current_instant(st, m.meas(), m.delta()));
    }
    s.steady_value = steady_state_heat_current(m);
    s.gamma_delta = m.meas().gamma * m.delta();
    s.tail_rate = m.gamma_tilde_plus();
    s.slowest = slowest_rate(m);
    s.model_desc = m.describe();
    return s;
}

ExcessHeat excess_heat(const HeatSeries& series) {
    const size_t n = series.times.size();
    if (n < 4 || series.values.size() != n)
        throw InvalidArgument("excess_heat: series needs at least 4 samples");

    const double tail_dev = series.values.back() - series.steady_value;
    const double conv_scale = std::max(std::abs(series.steady_value), series.gamma_delta);
    if (std::abs(tail_dev) > 1e-6 * conv_scale)
        throw ConvergenceError("excess_heat: series not settled at t_end (|J - J_ss| = " +
                               std::to_string(std::abs(tail_dev)) + ")");

    const double h = series.times[1] - series.times[0];
    // Uniform grid, except possibly a short final step from a ragged horizon.
    size_t uniform_end = n - 1; // last index of the uniform section
    for (size_t i = 1; i + 1 < n; ++i)
        if (std::abs((series.times[i + 1] - series.times[i]) - h) > 1e-6 * h) {
            if (i + 1 != n - 1)
                throw InvalidArgument("excess_heat: grid is not uniform");
            uniform_end = i;
        }

    auto f = [&](size_t i) { return series.values[i] - series.steady_value; };
    size_t m = uniform_end; // number of uniform intervals
    double integral = 0.0;
    size_t start = 0;
    if (m % 2 == 1) {
        // Odd interval count: Simpson 3/8 on the first three, composite 1/3 after.
        if (m < 3)
            throw InvalidArgument("excess_heat: too few intervals for Simpson quadrature");
        integral += 3.0 * h / 8.0 * (f(0) + 3.0 * f(1) + 3.0 * f(2) + f(3));
        start = 3;
    }
    for (size_t i = start; i + 2 <= uniform_end; i += 2)
        integral += h / 3.0 * (f(i) + 4.0 * f(i + 1) + f(i + 2));
    if (uniform_end != n - 1)
        integral += 0.5 * (series.times[n - 1] - series.times[n - 2]) * (f(n - 2) + f(n - 1));

    ExcessHeat q;
    const double tail = series.tail_rate > 0.0 ? tail_dev / series.tail_rate : 0.0;
    q.value = integral + tail;
    const double slow = std::max(series.slowest, 1e-300);
    q.tail_bound = std::abs(tail_dev) * (1.0 / slow + (series.tail_rate > 0.0 ? 1.0 / series.tail_rate : 0.0));
    return q;
}

double excess_heat_max(const QubitModel& m) {
    const double Gp = m.gamma_plus();
    if (!(Gp > 0.0))
        throw DegenerateModel("excess_heat_max: requires Gamma_+ > 0");
    const double gt = m.gamma_tilde_plus();
    return m.delta() * m.meas().gamma * m.gamma_minus() * (1.0 / Gp - 1.0 / gt) / (4.0 * gt);
}

} // namespace qmheat

#include "bloch.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace qmheat {

QubitModel QubitModel::from_baths(double delta, std::vector<BathSpec> baths,
                                  MeasurementSpec meas) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw DomainError("QubitModel: delta must be finite and > 0");
    meas.validate();
    QubitModel m;
    m.delta_ = delta;
    m.meas_ = meas;
    std::vector<RatePair> pairs;
    for (auto& b : baths) {
        auto w = b.validate();
        m.warnings_.insert(m.warnings_.end(), w.begin(), w.end());
        pairs.push_back(bath_rates(delta, b));
    }
    const Rates agg = aggregate_rates(pairs, meas.gamma);
    m.gamma_plus_ = agg.gamma_plus;
    m.gamma_minus_ = agg.gamma_minus;
    m.baths_ = std::move(baths);
    return m;
}

QubitModel QubitModel::from_rates(double delta, double gamma_plus, double gamma_minus,
                                  MeasurementSpec meas) {
    if (!(delta > 0.0) || !std::isfinite(delta))
        throw DomainError("QubitModel: delta must be finite and > 0");
    if (!(gamma_plus >= 0.0) || !std::isfinite(gamma_plus))
        throw DomainError("QubitModel: gamma_plus must be finite and >= 0");
    if (!(gamma_minus >= 0.0) || gamma_minus > gamma_plus)
        throw DomainError("QubitModel: gamma_minus must lie in [0, gamma_plus]");
    meas.validate();
    QubitModel m;
    m.delta_ = delta;
    m.gamma_plus_ = gamma_plus;
    m.gamma_minus_ = gamma_minus;
    m.meas_ = meas;
    return m;
}

std::string QubitModel::describe() const {
    std::ostringstream os;
    os << "qubit delta=" << delta_ << " gamma_plus=" << gamma_plus_
       << " gamma_minus=" << gamma_minus_ << " gamma=" << meas_.gamma
       << " theta=" << meas_.theta << " phi=" << meas_.phi;
    return os.str();
}

BlochState bloch_rhs(const BlochState& s, const QubitModel& m) {
    const double D = m.delta();
    const double Gp = m.gamma_plus();
    const double Gm = m.gamma_minus();
    const double g = m.meas().gamma;
    const double a = m.meas().alpha();
    const std::complex<double> b = m.meas().beta();
    const double bp = b.real(), bpp = b.imag();
    const double b2 = bp * bp + bpp * bpp;

    BlochState d;
    d.x = -(0.5 * (Gp + g) - 2.0 * bp * bp * g) * s.x - (D + 2.0 * bp * bpp * g) * s.y +
          2.0 * a * bp * g * s.z;
    d.y = (D - 2.0 * bp * bpp * g) * s.x - (0.5 * (Gp + g) - 2.0 * bpp * bpp * g) * s.y -
          2.0 * a * bpp * g * s.z;
    d.z = -Gm - (Gp + 2.0 * b2 * g) * s.z + 2.0 * a * bp * g * s.x - 2.0 * a * bpp * g * s.y;
    d.t = 1.0;
    return d;
}

double default_step(const QubitModel& m) {
    const double gt = m.gamma_tilde_plus();
    const double cap = gt > 0.0 ? 0.1 / gt : 0.01 / m.delta();
    return std::min(0.01 / m.delta(), cap);
}

namespace {

inline BlochState rk4_step(const BlochState& s, double h, const QubitModel& m) {
    const BlochState k1 = bloch_rhs(s, m);
    BlochState p{s.x + 0.5 * h * k1.x, s.y + 0.5 * h * k1.y, s.z + 0.5 * h * k1.z, s.t};
    const BlochState k2 = bloch_rhs(p, m);
    p = {s.x + 0.5 * h * k2.x, s.y + 0.5 * h * k2.y, s.z + 0.5 * h * k2.z, s.t};
    const BlochState k3 = bloch_rhs(p, m);
    p = {s.x + h * k3.x, s.y + h * k3.y, s.z + h * k3.z, s.t};
    const BlochState k4 = bloch_rhs(p, m);
    return {s.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            s.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
            s.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z), s.t + h};
}

} // namespace

Trajectory integrate(const QubitModel& m, const BlochState& init, double t_end, double dt) {
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw InvalidArgument("integrate: t_end and dt must be > 0");
    const long long n_full = static_cast<long long>(t_end / dt + 1e-9);
    const double rem = t_end - static_cast<double>(n_full) * dt;

    Trajectory traj;
    traj.dt = dt;
    traj.states.reserve(static_cast<size_t>(n_full) + 2);
    BlochState s = init;
    s.t = 0.0;
    traj.states.push_back(s);
    for (long long i = 0; i < n_full; ++i) {
        s = rk4_step(s, dt, m);
        s.t = static_cast<double>(i + 1) * dt; // avoid accumulated time drift
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z))
            throw NumericalError("integrate: non-finite state at t = " + std::to_string(s.t));
        traj.states.push_back(s);
    }
    if (rem > 1e-12 * dt) {
        s = rk4_step(s, rem, m);
        s.t = t_end;
        if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.z))
            throw NumericalError("integrate: non-finite state at t = " + std::to_string(s.t));
        traj.states.push_back(s);
    }
    return traj;
}

BlochState closed_form_case_i(double t, const BlochState& init, const QubitModel& m) {
    if (std::abs(m.meas().beta()) > 1e-12)
        throw InvalidArgument("closed_form_case_i: requires a pole measurement (beta = 0)");
    const double D = m.delta();
    const double Gp = m.gamma_plus();
    const double Gm = m.gamma_minus();
    const double g = m.meas().gamma;

    const double decay = std::exp(-0.5 * (Gp + g) * t);
    const double c = std::cos(D * t), sn = std::sin(D * t);
    BlochState s;
    s.x = decay * (init.x * c - init.y * sn);
    s.y = decay * (init.y * c + init.x * sn);
    // Gp = 0 forces Gm = 0, so the population is frozen in that limit.
    s.z = Gp > 0.0 ? -Gm / Gp + (init.z + Gm / Gp) * std::exp(-Gp * t) : init.z;
    s.t = t;
    return s;
}

double delta_osc(const QubitModel& m) {
    const double D = m.delta(), g = m.meas().gamma;
    return std::sqrt(D * D - g * g / 16.0);
}

BlochState closed_form_case_ii(double t, const BlochState& init, const QubitModel& m) {
    if (std::abs(m.meas().alpha()) > 1e-12)
        throw InvalidArgument("closed_form_case_ii: requires an equator measurement (alpha = 0)");
    const double D = m.delta();
    const double g = m.meas().gamma;
    if (!(g < 4.0 * D))
        throw InvalidArgument("closed_form_case_ii: oscillation frequency imaginary (gamma >= 4*Delta)");
    const double Gm = m.gamma_minus();
    const double gt = m.gamma_tilde_plus();
    const double phi = m.meas().phi;

    // The transverse block decays at gt/2 around a traceless residual generator
    // K = [[mu, -(D+sf)], [D-sf, -mu]] with K^2 = -d^2 I, whence exp(Kt) below.
    const double mu = 0.25 * g * std::cos(2.0 * phi);
    const double sf = 0.25 * g * std::sin(2.0 * phi);
    const double d = delta_osc(m);
    const double decay = std::exp(-0.5 * gt * t);
    const double c = std::cos(d * t), sn = std::sin(d * t) / d;

    BlochState s;
    s.x = decay * (init.x * c + (mu * init.x - (D + sf) * init.y) * sn);
    s.y = decay * (init.y * c + ((D - sf) * init.x - mu * init.y) * sn);
    s.z = gt > 0.0 ? -Gm / gt + (init.z + Gm / gt) * std::exp(-gt * t) : init.z;
    s.t = t;
    return s;
}

BlochState steady_state_bloch(const QubitModel& m) {
    const double D = m.delta();
    const double Gp = m.gamma_plus();
    const double Gm = m.gamma_minus();
    const double g = m.meas().gamma;
    const double a = m.meas().alpha();
    const std::complex<double> b = m.meas().beta();
    const double bp = b.real(), bpp = b.imag();
    const double b2 = bp * bp + bpp * bpp;

    const double den =
        4.0 * D * D * (Gp + 2.0 * b2 * g) + Gp * (Gp + g) * (Gp + g - 2.0 * b2 * g);
    const double scale = std::max({D, Gp, g});
    if (!(den > 1e-30 * scale * scale * scale * scale))
        throw DegenerateModel("steady_state_bloch: no unique steady state (denominator " +
                              std::to_string(den) + ")");

    BlochState s;
    s.z = -Gm * (4.0 * D * D + (Gp + g) * (Gp + g - 4.0 * b2 * g)) / den;
    s.x = -4.0 * a * g * Gm * (2.0 * D * bpp + (Gp + g) * bp) / den;
    s.y = -4.0 * a * g * Gm * (2.0 * D * bp - (Gp + g) * bpp) / den;
    s.t = 0.0;
    return s;
}

double slowest_rate(const QubitModel& m) {
    const BlochState ex = bloch_rhs({1, 0, 0, 0}, m);
    const BlochState ey = bloch_rhs({0, 1, 0, 0}, m);
    const BlochState ez = bloch_rhs({0, 0, 1, 0}, m);
    const BlochState o = bloch_rhs({0, 0, 0, 0}, m);
    Eigen::Matrix3d M;
    M << ex.x - o.x, ey.x - o.x, ez.x - o.x, ex.y - o.y, ey.y - o.y, ez.y - o.y, ex.z - o.z,
        ey.z - o.z, ez.z - o.z;
    const auto eigs = M.eigenvalues();
    double slow = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        slow = std::min(slow, -eigs[i].real());
    return slow;
}

} // namespace qmheat

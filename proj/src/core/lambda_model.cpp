#include "lambda_model.hpp"

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "heat.hpp"

namespace qmheat {

std::vector<std::string> LambdaParams::validate() const {
    if (!(delta_big > 0.0) || !std::isfinite(delta_big))
        throw DomainError("lambda: delta_big must be positive and finite");
    if (!(delta_small > 0.0) || !(delta_small < delta_big))
        throw DomainError("lambda: requires 0 < delta_small < delta_big");
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw DomainError("lambda: gamma must be finite and >= 0");
    if (!std::isfinite(phi))
        throw DomainError("lambda: phi must be finite");
    std::vector<std::string> warnings;
    for (const auto& w : hot.validate())
        warnings.push_back(w);
    for (const auto& w : cold.validate())
        warnings.push_back(w);
    if (!(hot.temperature > cold.temperature))
        warnings.push_back("lambda: hot bath is not hotter than the cold bath (T_h <= T_c)");
    return warnings;
}

std::vector<double> LambdaParams::energies() const {
    return {0.0, delta_big - delta_small, delta_big};
}

LambdaRates lambda_rates(const LambdaParams& p) {
    return {bath_rates(p.delta_big, p.hot), bath_rates(p.delta_small, p.cold)};
}

LindbladModel build_lambda_model(const LambdaParams& p) {
    p.validate();
    const LambdaRates r = lambda_rates(p);

    LindbladModel m;
    m.dim = 3;
    m.hamiltonian = Mat::Zero(3, 3);
    m.hamiltonian(1, 1) = p.delta_big - p.delta_small;
    m.hamiltonian(2, 2) = p.delta_big;

    auto jump = [](int to, int from) {
        Mat l = Mat::Zero(3, 3);
        l(to, from) = 1.0;
        return l;
    };
    m.channels.push_back({jump(0, 2), r.hot.emit});
    m.channels.push_back({jump(2, 0), r.hot.absorb});
    m.channels.push_back({jump(1, 2), r.cold.emit});
    m.channels.push_back({jump(2, 1), r.cold.absorb});

    Vec n(3);
    const std::complex<double> ph(std::cos(p.phi), std::sin(p.phi));
    n << 1.0 / std::sqrt(2.0), ph / std::sqrt(2.0), 0.0;
    m.channels.push_back(measurement_channel(n * n.adjoint(), p.gamma));
    m.measurement_index = static_cast<int>(m.channels.size()) - 1;

    m.validate();
    return m;
}

bool population_inversion_predicted(const LambdaParams& p) {
    p.validate();
    return p.delta_big / p.hot.temperature < p.delta_small / p.cold.temperature;
}

std::vector<LambdaSweepPoint> lambda_heat_current_sweep(const LambdaParams& p,
                                                        const std::vector<double>& gammas) {
    std::vector<LambdaSweepPoint> out;
    out.reserve(gammas.size());
    for (double g : gammas) {
        if (!(g >= 0.0))
            throw InvalidArgument("lambda sweep: gamma must be >= 0");
        LambdaParams pg = p;
        pg.gamma = g;
        const LindbladModel model = build_lambda_model(pg);
        MatLD rho_ld;
        try {
            rho_ld = steady_state_ld(model);
        } catch (const DegenerateModel& e) {
            throw DegenerateModel("lambda sweep at gamma = " + std::to_string(g) + ": " + e.what());
        }
        const Mat rho = rho_ld.cast<std::complex<double>>();

        LambdaSweepPoint pt;
        pt.gamma = g;
        pt.current = heat_current_general(*model.measurement(), rho, pg.energies());
        pt.rho00 = rho(0, 0).real();
        pt.rho11 = rho(1, 1).real();
        pt.rho22 = rho(2, 2).real();
        pt.inverted = pt.rho11 > pt.rho00;
        out.push_back(pt);
    }
    return out;
}

double lambda_current_from_populations(const LambdaParams& p, double rho00, double rho11) {
    return 0.25 * p.gamma * (p.delta_big - p.delta_small) * (rho00 - rho11);
}

} // namespace qmheat

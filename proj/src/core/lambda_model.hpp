#ifndef QMHEAT_CORE_LAMBDA_MODEL_HPP
#define QMHEAT_CORE_LAMBDA_MODEL_HPP

#include <string>
#include <vector>

#include "lindblad.hpp"
#include "rates.hpp"

namespace qmheat {

// Three-level Lambda configuration. Basis ordering is fixed as (|0>, |1>, |2>)
// with energies 0, delta_big - delta_small, delta_big: the hot bath drives
// |0> <-> |2> at delta_big, the cold bath |1> <-> |2> at delta_small, and the
// apparatus continuously measures |n> = (|0> + e^{i phi} |1>)/sqrt(2).
struct LambdaParams {
    double delta_big = 1.0;
    double delta_small = 0.5;
    BathSpec hot{0.01, 5.0, 10.0, "hot"};
    BathSpec cold{0.01, 2.0, 10.0, "cold"};
    double gamma = 0.0; // measurement strength
    double phi = 0.0;   // measurement phase

    // Throws DomainError on invalid fields; returns warnings (T_h <= T_c,
    // strong coupling, ...).
    std::vector<std::string> validate() const;
    std::vector<double> energies() const; // {0, delta_big - delta_small, delta_big}
};

struct LambdaRates {
    RatePair hot;  // evaluated at delta_big
    RatePair cold; // evaluated at delta_small
};

LambdaRates lambda_rates(const LambdaParams& p);

// H = diag(0, D-d, D), four bath channels (hot/cold emission and absorption)
// and the rank-1 projector onto |n> with weight gamma, tagged as measurement.
LindbladModel build_lambda_model(const LambdaParams& p);

// Measurement-free criterion: inversion between |0> and |1> iff D/T_h < d/T_c
// (strict; zero temperatures follow IEEE division, so T_c -> 0 keeps the
// predicate true even though the actual inversion vanishes in that limit).
bool population_inversion_predicted(const LambdaParams& p);

struct LambdaSweepPoint {
    double gamma = 0.0;
    double current = 0.0; // steady-state J_M
    double rho00 = 0.0;
    double rho11 = 0.0;
    double rho22 = 0.0;
    bool inverted = false; // actual steady populations: rho11 > rho00
};

// Steady state and measurement current for each gamma >= 0; points are
// independent. Degenerate steady states are reported with the failing gamma.
std::vector<LambdaSweepPoint> lambda_heat_current_sweep(const LambdaParams& p,
                                                        const std::vector<double>& gammas);

// Population form of the measured current, (gamma/4)(D - d)(rho00 - rho11):
// only the |0>,|1> populations enter since the projector never touches |2>.
double lambda_current_from_populations(const LambdaParams& p, double rho00, double rho11);

} // namespace qmheat

#endif

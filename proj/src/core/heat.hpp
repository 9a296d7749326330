#ifndef QMHEAT_CORE_HEAT_HPP
#define QMHEAT_CORE_HEAT_HPP

#include <string>
#include <utility>
#include <vector>

#include "bloch.hpp"
#include "lindblad.hpp"

namespace qmheat {

// J_M(t) samples on an increasing time grid, in units of Delta^2 (hbar = 1);
// positive J_M means the system absorbs heat from the measurement apparatus.
struct HeatSeries {
    std::vector<double> times;
    std::vector<double> values;
    double steady_value = 0.0;
    double gamma_delta = 0.0;  // gamma * Delta, convergence scale
    double tail_rate = 0.0;    // decay rate used for the analytic tail
    double slowest = 0.0;      // slowest damping rate of the generator
    std::string model_desc;
};

struct ExcessHeat {
    double value = 0.0;      // integral of J_M(t) - J_M over [0, inf)
    double tail_bound = 0.0; // reported bound on the tail estimate's error
};

// Instantaneous current out of the measurement apparatus,
// J_M = -gamma*Delta*|beta|^2 <sigma_z> + alpha*gamma*Delta*(b' <sigma_x> - b'' <sigma_y>).
double heat_current_instant(const BlochState& state, const MeasurementSpec& meas, double delta);

// General N-level current: sum_k E_k <k| D_M[rho] |k> with E_k the eigenvalues of
// the system Hamiltonian (the dissipator only moves diagonal weight in that basis).
double heat_current_general(const Channel& measurement, const Mat& rho,
                            const std::vector<double>& energies);

// Steady-state closed form:
//   J_M = |beta|^2 Delta gamma Gamma_- [4 Delta^2 + Gamma_+(Gamma_++gamma)] / den,
//   den = 4 Delta^2 (Gamma_+ + 2|beta|^2 gamma) + Gamma_+(Gamma_++gamma)(Gamma_++gamma-2|beta|^2 gamma).
double steady_state_heat_current(const QubitModel& model);

// Steady current computed through the generic engine (high-precision steady
// state, current evaluated before any double rounding); cross-check path.
double steady_state_current_engine(const QubitModel& model);

// (0, Delta*gamma*Gamma_- / (4 Gamma_+ + 2 gamma)); the closed form lies inside
// for every measured state, with equality at the poles / equator.
std::pair<double, double> heat_current_bounds(const QubitModel& model);

// Equator transient: J_M(t) = (gamma*Delta/4) [Gamma_-/G~ - (z0 + Gamma_-/G~) e^{-G~ t}],
// G~ = Gamma_+ + gamma/2. Requires an equator measurement.
double transient_heat_current_equator(double t, double z0, const QubitModel& model);

// J_M(t) along an RK4 trajectory, with the closed-form steady value attached.
HeatSeries heat_series(const QubitModel& model, const BlochState& init, double t_end, double dt);

// Composite Simpson over the stored grid plus an analytic exponential tail
// (J(t_end) - J_M)/tail_rate. Requires |J(t_end) - J_M| <= 1e-6 * max(|J_M|, gamma*Delta).
ExcessHeat excess_heat(const HeatSeries& series);

// Q_ex for the equator start from the measurement-free steady state:
//   Q_ex^max = Delta*gamma*Gamma_- (1/Gamma_+ - 1/G~) / (4 G~).
double excess_heat_max(const QubitModel& model);

} // namespace qmheat

#endif

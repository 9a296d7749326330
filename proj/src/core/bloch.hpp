#ifndef QMHEAT_CORE_BLOCH_HPP
#define QMHEAT_CORE_BLOCH_HPP

#include <string>
#include <vector>

#include "rates.hpp"

namespace qmheat {

// Bloch vector (<sigma_x>, <sigma_y>, <sigma_z>) at time t (units of 1/Delta).
struct BlochState {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double t = 0.0;
};

// Qubit H = (Delta/2) sigma_z coupled to Ohmic baths and one measurement channel.
// Can be built microscopically (from baths) or directly from aggregated rates.
class QubitModel {
  public:
    static QubitModel from_baths(double delta, std::vector<BathSpec> baths, MeasurementSpec meas);
    static QubitModel from_rates(double delta, double gamma_plus, double gamma_minus,
                                 MeasurementSpec meas);

    double delta() const { return delta_; }
    double gamma_plus() const { return gamma_plus_; }
    double gamma_minus() const { return gamma_minus_; }
    double gamma_tilde_plus() const { return gamma_plus_ + 0.5 * meas_.gamma; }
    const MeasurementSpec& meas() const { return meas_; }
    const std::vector<BathSpec>& baths() const { return baths_; }
    const std::vector<std::string>& warnings() const { return warnings_; }

    std::string describe() const;

  private:
    QubitModel() = default;
    double delta_ = 1.0;
    double gamma_plus_ = 0.0;
    double gamma_minus_ = 0.0;
    MeasurementSpec meas_;
    std::vector<BathSpec> baths_;
    std::vector<std::string> warnings_;
};

// Fixed-step RK4 trajectory on a uniform grid (plus a short final step if
// t_end is not a multiple of dt). states.front() is the initial state.
struct Trajectory {
    std::vector<BlochState> states;
    double dt = 0.0;
    std::string method = "rk4";
};

// Time derivative of the Bloch vector under the master equation:
//   dz/dt = -Gm - (Gp + 2|b|^2 g) z + 2 a b' g x - 2 a b'' g y
//   dx/dt = -((Gp+g)/2 - 2 b'^2 g) x - (Delta + 2 b' b'' g) y + 2 a b' g z
//   dy/dt =  (Delta - 2 b' b'' g) x - ((Gp+g)/2 - 2 b''^2 g) y - 2 a b'' g z
// with a = alpha, b = b' + i b'' the projector coefficients of the measured state.
BlochState bloch_rhs(const BlochState& state, const QubitModel& model);

// Classic fixed-step RK4. dt should satisfy dt <= 0.1/max(Delta, Gamma~_+).
Trajectory integrate(const QubitModel& model, const BlochState& init, double t_end, double dt);

// Suggested step: min(0.01/Delta, 0.1/Gamma~_+).
double default_step(const QubitModel& model);

// Exact solution when the measured state is a pole (beta = 0): z relaxes at
// Gamma_+ toward -Gamma_-/Gamma_+ while x,y precess at Delta and decay at (Gamma_++gamma)/2.
BlochState closed_form_case_i(double t, const BlochState& init, const QubitModel& model);

// Exact solution on the equator (alpha = 0, any phi). The transverse pair decays
// at Gamma~_+/2 and oscillates at delta_osc = sqrt(Delta^2 - gamma^2/16);
// z relaxes at Gamma~_+ toward -Gamma_-/Gamma~_+. Requires gamma < 4*Delta.
BlochState closed_form_case_ii(double t, const BlochState& init, const QubitModel& model);

// Oscillation frequency of the equator solution.
double delta_osc(const QubitModel& model);

// Closed-form steady state. Throws DegenerateModel when the denominator
// vanishes (Gamma_+ = 0 together with |beta|^2 * gamma = 0).
BlochState steady_state_bloch(const QubitModel& model);

// Slowest damping rate of the 3x3 Bloch generator (used for tail bounds).
double slowest_rate(const QubitModel& model);

} // namespace qmheat

#endif

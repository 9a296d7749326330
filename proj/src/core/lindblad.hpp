#ifndef QMHEAT_CORE_LINDBLAD_HPP
#define QMHEAT_CORE_LINDBLAD_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bloch.hpp"

namespace qmheat {

using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using MatLD = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, Eigen::Dynamic>;
using VecLD = Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>;

// One Lindblad channel: dissipator w * (L rho L^+ - 1/2 {L^+L, rho}).
struct Channel {
    Mat op;
    double weight = 0.0;
};

// N-level system: Hermitian Hamiltonian plus weighted jump channels. At most one
// channel is tagged as the measurement channel (used for heat-current bookkeeping).
struct LindbladModel {
    int dim = 0;
    Mat hamiltonian;
    std::vector<Channel> channels;
    int measurement_index = -1;

    void validate() const; // throws InvalidArgument
    const Channel* measurement() const;
};

// Wraps a projector P (P^2 = P, P = P^+) as a measurement channel of strength gamma.
Channel measurement_channel(const Mat& projector, double gamma);

// w * (L rho L^+ - 1/2 {L^+L, rho}); traceless by construction.
Mat dissipator_apply(const Channel& ch, const Mat& rho);

// Column-stacking vectorization, vec(A X B) = (B^T (x) A) vec(X):
//   L = -i(I (x) H - H^T (x) I)
//     + sum_k w_k [ conj(L_k) (x) L_k - 1/2 (I (x) L_k^+L_k + (L_k^+L_k)^T (x) I) ].
Mat build_liouvillian(const LindbladModel& model);
MatLD build_liouvillian_ld(const LindbladModel& model);

// Null-space steady state of a given Liouvillian: smallest singular vector,
// Hermitized and trace-normalized. Throws DegenerateModel when the kernel
// dimension differs from 1, NumericalError when the residual exceeds 1e-10.
Mat steady_state(const Mat& liouvillian);

// High-accuracy path: Liouvillian assembled in long double, kernel refined with
// quad-precision residuals. Use this when feeding steady states into quantities
// with heavy cancellation (e.g. weak-bias heat currents).
MatLD steady_state_ld(const LindbladModel& model);
Mat steady_state(const LindbladModel& model);

// rho(t_k) = exp(L t_k) rho0 on a strictly increasing grid (rho0 lives at t = 0),
// via scaling-and-squaring matrix exponentials on the gaps.
std::vector<Mat> evolve(const Mat& liouvillian, const Mat& rho0, const std::vector<double>& t_grid);

// Qubit model in the (|e>, |g>) basis: H = (delta/2) sigma_z, emission/absorption
// channels sigma_-, sigma_+, and the projector channel of the measured state.
LindbladModel lindblad_model_from_qubit(const QubitModel& qubit);

// Bloch-vector <-> density-matrix conversions in the (|e>, |g>) basis.
Mat density_from_bloch(const BlochState& s);
BlochState bloch_from_density(const Mat& rho);

} // namespace qmheat

#endif

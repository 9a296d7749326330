#include "lindblad.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "errors.hpp"

namespace qmheat {

void LindbladModel::validate() const {
    if (dim < 1)
        throw InvalidArgument("LindbladModel: dim must be >= 1");
    if (hamiltonian.rows() != dim || hamiltonian.cols() != dim)
        throw InvalidArgument("LindbladModel: hamiltonian must be dim x dim");
    const double hscale = std::max(1.0, hamiltonian.norm());
    if ((hamiltonian - hamiltonian.adjoint()).norm() > 1e-12 * hscale)
        throw InvalidArgument("LindbladModel: hamiltonian is not Hermitian");
    for (size_t k = 0; k < channels.size(); ++k) {
        const auto& ch = channels[k];
        if (ch.op.rows() != dim || ch.op.cols() != dim)
            throw InvalidArgument("LindbladModel: channel " + std::to_string(k) +
                                  " has wrong dimensions");
        if (!(ch.weight >= 0.0) || !std::isfinite(ch.weight))
            throw InvalidArgument("LindbladModel: channel " + std::to_string(k) +
                                  " weight must be finite and >= 0");
    }
    if (measurement_index >= static_cast<int>(channels.size()))
        throw InvalidArgument("LindbladModel: measurement_index out of range");
}

const Channel* LindbladModel::measurement() const {
    return measurement_index >= 0 ? &channels[measurement_index] : nullptr;
}

Channel measurement_channel(const Mat& projector, double gamma) {
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw InvalidArgument("measurement_channel: gamma must be finite and >= 0");
    const double scale = std::max(1.0, projector.norm());
    if ((projector * projector - projector).norm() > 1e-10 * scale)
        throw InvalidArgument("measurement_channel: operator is not idempotent (P^2 != P)");
    if ((projector - projector.adjoint()).norm() > 1e-10 * scale)
        throw InvalidArgument("measurement_channel: operator is not Hermitian");
    return {projector, gamma};
}

Mat dissipator_apply(const Channel& ch, const Mat& rho) {
    const Mat LdL = ch.op.adjoint() * ch.op;
    return ch.weight * (ch.op * rho * ch.op.adjoint() - 0.5 * (LdL * rho + rho * LdL));
}

namespace {

template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>
build_liouvillian_t(const LindbladModel& model) {
    using MatT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
    model.validate();
    const int n = model.dim;
    const MatT id = MatT::Identity(n, n);
    const MatT H = model.hamiltonian.template cast<std::complex<Real>>();
    const std::complex<Real> i1(Real(0), Real(1));

    MatT L = -i1 * (Eigen::kroneckerProduct(id, H) - Eigen::kroneckerProduct(H.transpose(), id));
    for (const auto& ch : model.channels) {
        const MatT A = ch.op.template cast<std::complex<Real>>();
        const MatT AdA = A.adjoint() * A;
        const Real w = static_cast<Real>(ch.weight);
        L += w * (Eigen::kroneckerProduct(A.conjugate(), A).eval() -
                  Real(0.5) * (Eigen::kroneckerProduct(id, AdA).eval() +
                               Eigen::kroneckerProduct(AdA.transpose(), id).eval()));
    }
    return L;
}

// Quad-precision residual r = A v for the refinement loop; entries of A and v
// are long double, products and the accumulation run in __float128.
VecLD residual_quad(const MatLD& A, const VecLD& v) {
    const Eigen::Index n = A.rows();
    VecLD r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        __float128 re = 0, im = 0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto& a = A(i, j);
            const auto& x = v(j);
            const __float128 ar = a.real(), ai = a.imag();
            const __float128 xr = x.real(), xi = x.imag();
            re += ar * xr - ai * xi;
            im += ar * xi + ai * xr;
        }
        r(i) = std::complex<long double>(static_cast<long double>(re),
                                         static_cast<long double>(im));
    }
    return r;
}

// Smallest singular vector of L with a kernel-dimension check, polished by
// inverse-iteration steps against quad-precision residuals. Returns vec(rho).
VecLD kernel_vector_ld(const MatLD& L) {
    Eigen::JacobiSVD<MatLD> svd(L, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const Eigen::Index n = L.rows();
    const long double smax = sv(0);
    if (!(smax > 0.0L))
        throw DegenerateModel("steady_state: zero Liouvillian has no unique steady state");
    int kernel_dim = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (sv(i) <= 1e-12L * smax)
            ++kernel_dim;
    if (kernel_dim != 1)
        throw DegenerateModel("steady_state: kernel dimension " + std::to_string(kernel_dim) +
                              " (expected 1)");

    VecLD v = svd.matrixV().col(n - 1);
    for (int pass = 0; pass < 3; ++pass) {
        const VecLD r = residual_quad(L, v);
        // Solve L w = r through the SVD factors, excluding the kernel direction.
        VecLD c = svd.matrixU().adjoint() * r;
        for (Eigen::Index i = 0; i < n - 1; ++i)
            c(i) /= sv(i);
        c(n - 1) = 0;
        v -= svd.matrixV() * c;
        v /= v.norm();
    }
    return v;
}

MatLD density_from_kernel(const VecLD& v, int dim) {
    MatLD rho(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i)
            rho(i, j) = v(static_cast<Eigen::Index>(j) * dim + i);
    rho = 0.5L * (rho + rho.adjoint()).eval();
    const std::complex<long double> tr = rho.trace();
    if (std::abs(tr) < 1e-8L)
        throw NumericalError("steady_state: kernel vector has (near-)zero trace");
    rho /= tr;
    return rho;
}

} // namespace

Mat build_liouvillian(const LindbladModel& model) { return build_liouvillian_t<double>(model); }

MatLD build_liouvillian_ld(const LindbladModel& model) {
    return build_liouvillian_t<long double>(model);
}

Mat steady_state(const Mat& liouvillian) {
    if (liouvillian.rows() != liouvillian.cols())
        throw InvalidArgument("steady_state: Liouvillian must be square");
    const auto n2 = liouvillian.rows();
    const int dim = static_cast<int>(std::llround(std::sqrt(static_cast<double>(n2))));
    if (static_cast<Eigen::Index>(dim) * dim != n2)
        throw InvalidArgument("steady_state: Liouvillian size is not a perfect square");

    const MatLD L = liouvillian.cast<std::complex<long double>>();
    const MatLD rho_ld = density_from_kernel(kernel_vector_ld(L), dim);
    Mat rho = rho_ld.cast<std::complex<double>>();

    const double res = (liouvillian * Eigen::Map<const Vec>(rho.data(), n2)).norm();
    if (res > 1e-10)
        throw NumericalError("steady_state: residual " + std::to_string(res) +
                             " exceeds tolerance");
    return rho;
}

MatLD steady_state_ld(const LindbladModel& model) {
    const MatLD L = build_liouvillian_ld(model);
    return density_from_kernel(kernel_vector_ld(L), model.dim);
}

Mat steady_state(const LindbladModel& model) {
    return steady_state_ld(model).cast<std::complex<double>>();
}

std::vector<Mat> evolve(const Mat& liouvillian, const Mat& rho0,
                        const std::vector<double>& t_grid) {
    const auto n2 = liouvillian.rows();
    if (liouvillian.cols() != n2 || rho0.size() != n2)
        throw InvalidArgument("evolve: dimension mismatch between Liouvillian and state");
    for (size_t k = 1; k < t_grid.size(); ++k)
        if (!(t_grid[k] > t_grid[k - 1]))
            throw InvalidArgument("evolve: time grid must be strictly increasing");
    if (!t_grid.empty() && t_grid.front() < 0.0)
        throw InvalidArgument("evolve: times must be >= 0");

    std::vector<Mat> out;
    out.reserve(t_grid.size());
    Vec v = Eigen::Map<const Vec>(rho0.data(), n2);
    double t_prev = 0.0, gap_prev = -1.0;
    Mat step;
    for (const double t : t_grid) {
        const double gap = t - t_prev;
        if (gap > 0.0) {
            if (gap != gap_prev) {
                step = (liouvillian * gap).exp();
                gap_prev = gap;
            }
            v = step * v;
        }
        if (!v.allFinite())
            throw NumericalError("evolve: non-finite state at t = " + std::to_string(t));
        out.push_back(Eigen::Map<const Mat>(v.data(), rho0.rows(), rho0.cols()));
        t_prev = t;
    }
    return out;
}

LindbladModel lindblad_model_from_qubit(const QubitModel& qubit) {
    const double d = qubit.delta();
    const double ge = 0.5 * (qubit.gamma_plus() + qubit.gamma_minus()); // emission
    const double ga = 0.5 * (qubit.gamma_plus() - qubit.gamma_minus()); // absorption
    const double a = qubit.meas().alpha();
    const std::complex<double> b = qubit.meas().beta();

    LindbladModel m;
    m.dim = 2;
    m.hamiltonian = Mat::Zero(2, 2);
    m.hamiltonian(0, 0) = 0.5 * d;
    m.hamiltonian(1, 1) = -0.5 * d;

    Mat sm = Mat::Zero(2, 2), sp = Mat::Zero(2, 2);
    sm(1, 0) = 1.0; // |g><e|
    sp(0, 1) = 1.0; // |e><g|
    m.channels.push_back({sm, ge});
    m.channels.push_back({sp, ga});

    Mat P(2, 2);
    P(0, 0) = 0.5 + a;
    P(1, 1) = 0.5 - a;
    P(0, 1) = b;
    P(1, 0) = std::conj(b);
    m.channels.push_back(measurement_channel(P, qubit.meas().gamma));
    m.measurement_index = static_cast<int>(m.channels.size()) - 1;
    m.validate();
    return m;
}

Mat density_from_bloch(const BlochState& s) {
    Mat rho(2, 2);
    rho(0, 0) = 0.5 * (1.0 + s.z);
    rho(1, 1) = 0.5 * (1.0 - s.z);
    rho(0, 1) = 0.5 * std::complex<double>(s.x, -s.y);
    rho(1, 0) = 0.5 * std::complex<double>(s.x, s.y);
    return rho;
}

BlochState bloch_from_density(const Mat& rho) {
    BlochState s;
    s.x = 2.0 * rho(1, 0).real();
    s.y = 2.0 * rho(1, 0).imag();
    s.z = (rho(0, 0) - rho(1, 1)).real();
    return s;
}

} // namespace qmheat

#include "mesolead/lyapunov.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mesolead {

Drift::Drift(const Eigen::MatrixXd& H, const Eigen::VectorXd& gamma, const Eigen::VectorXd& F) : F_(F) {
    const auto D = H.rows();
    if (H.cols() != D || gamma.size() != D || F.size() != D) {
        throw std::invalid_argument("Drift: inconsistent dimensions");
    }
    W_ = cplx(0.0, 1.0) * H.cast<cplx>();
    W_.diagonal() += (0.5 * gamma).cast<cplx>();
    Wsparse_ = W_.sparseView();
}

Drift::Drift(const ExtendedModel& model) : Drift(model.H, model.gamma, model.F) {}

Eigen::MatrixXcd Drift::rate(const CovarianceMatrix& C) const {
    const Eigen::MatrixXcd X = Wsparse_ * C;
    Eigen::MatrixXcd out = -(X + X.adjoint());
    out.diagonal() += F_.cast<cplx>();
    return out;
}

CovarianceMatrix initialCovariance(const ExtendedModel& model, const std::vector<double>& system_occupations) {
    if (static_cast<Eigen::Index>(system_occupations.size()) != model.sites) {
        throw std::invalid_argument("initialCovariance: need one occupation per chain site");
    }
    CovarianceMatrix C = CovarianceMatrix::Zero(model.dim, model.dim);
    for (Eigen::Index j = 0; j < model.sites; ++j) {
        const double n = system_occupations[static_cast<std::size_t>(j)];
        if (!(n >= 0.0 && n <= 1.0)) {
            throw std::invalid_argument("initialCovariance: occupation " + std::to_string(n) + " outside [0, 1]");
        }
        C(j, j) = n;
    }
    for (std::size_t a = 0; a < model.leadCount(); ++a) {
        const auto& b = model.blocks[a];
        for (Eigen::Index k = 0; k < b.size; ++k) C(b.offset + k, b.offset + k) = model.leads[a].occupations[k];
    }
    return C;
}

CovarianceMatrix rk4Step(const CovarianceMatrix& C, const Drift& drift, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be > 0");
    const Eigen::MatrixXcd k1 = drift.rate(C);
    const Eigen::MatrixXcd k2 = drift.rate(C + 0.5 * dt * k1);
    const Eigen::MatrixXcd k3 = drift.rate(C + 0.5 * dt * k2);
    const Eigen::MatrixXcd k4 = drift.rate(C + dt * k3);
    return hermitize(C + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

bool withinUnitInterval(const CovarianceMatrix& C, double tol) {
    const Eigen::Index D = C.rows();
    Eigen::MatrixXcd shifted = C;
    shifted.diagonal().array() += tol;
    if (Eigen::LLT<Eigen::MatrixXcd>(shifted).info() != Eigen::Success) return false;
    shifted = -C;
    shifted.diagonal().array() += 1.0 + tol;
    return D == 0 || Eigen::LLT<Eigen::MatrixXcd>(shifted).info() == Eigen::Success;
}

namespace {

void requirePhysical(const CovarianceMatrix& C, double t) {
    if (withinUnitInterval(C, kPhysicalityTol)) return;
    const Eigen::VectorXd spectrum = eigvalsh(C);
    std::ostringstream os;
    os.precision(17);
    os << "covariance left the physical region at t=" << t << ": eigenvalues span [" << spectrum.minCoeff() << ", "
       << spectrum.maxCoeff() << "]";
    throw NumericalError(os.str());
}

} // namespace

CovarianceMatrix step(const CovarianceMatrix& C, const Drift& drift, double dt) {
    CovarianceMatrix next = rk4Step(C, drift, dt);
    requirePhysical(next, dt);
    return next;
}

CovarianceMatrix steadyState(const Eigen::MatrixXcd& W, const Eigen::VectorXd& F) {
    const Eigen::Index D = W.rows();
    if (W.cols() != D || F.size() != D) throw std::invalid_argument("steadyState: dimension mismatch");

    const Eigen::ComplexSchur<Eigen::MatrixXcd> schur(W);
    if (schur.info() != Eigen::Success) throw NumericalError("steadyState: complex Schur decomposition failed");
    const Eigen::MatrixXcd& T = schur.matrixT();
    const Eigen::MatrixXcd& U = schur.matrixU();

    const double minRe = T.diagonal().real().minCoeff();
    if (minRe < 1e-14) {
        std::ostringstream os;
        os << "steadyState: drift has an eigenvalue with real part " << minRe
           << "; the steady state is not unique";
        throw NumericalError(os.str());
    }

    // T Y + Y T^dagger = G with G = U^dagger F U and C = U Y U^dagger.
    // Column j couples only to columns k > j through conj(T_jk), so sweep j downwards.
    const Eigen::MatrixXcd G = U.adjoint() * F.cast<cplx>().asDiagonal() * U;
    Eigen::MatrixXcd Y = Eigen::MatrixXcd::Zero(D, D);
    Eigen::VectorXcd rhs(D);
    for (Eigen::Index j = D - 1; j >= 0; --j) {
        rhs = G.col(j);
        for (Eigen::Index k = j + 1; k < D; ++k) rhs -= std::conj(T(j, k)) * Y.col(k);
        const cplx shift = std::conj(T(j, j));
        // back substitution with (T + shift I)
        for (Eigen::Index i = D - 1; i >= 0; --i) {
            cplx acc = rhs[i];
            for (Eigen::Index k = i + 1; k < D; ++k) acc -= T(i, k) * Y(k, j);
            Y(i, j) = acc / (T(i, i) + shift);
        }
    }
    CovarianceMatrix C = hermitize(U * Y * U.adjoint());
    const Eigen::VectorXd spec = eigvalsh(C);
    if (!isPhysical(spec, kPhysicalityTol)) {
        std::ostringstream os;
        os << "steadyState: solution spectrum [" << spec.minCoeff() << ", " << spec.maxCoeff()
           << "] outside [0, 1]";
        throw NumericalError(os.str());
    }
    return C;
}

CovarianceMatrix steadyState(const Drift& drift) {
    return steadyState(drift.W(), drift.F());
}

double steadyStateResidual(const Eigen::MatrixXcd& W, const Eigen::VectorXd& F, const CovarianceMatrix& C) {
    Eigen::MatrixXcd R = W * C + C * W.adjoint();
    R.diagonal() -= F.cast<cplx>();
    return maxAbs(R);
}

void propagate(const Drift& drift, const CovarianceMatrix& C0, double dt, int steps, const StepObserver& observer) {
    if (!(dt > 0.0)) throw std::invalid_argument("propagate: dt must be > 0");
    if (steps < 0) throw std::invalid_argument("propagate: negative step count");
    requireHermitian(C0, "propagate");
    CovarianceMatrix C = hermitize(C0);
    for (int n = 0;; ++n) {
        const double t = n * dt;
        requirePhysical(C, t);
        if (observer) {
            const Eigen::MatrixXcd Cdot = drift.rate(C);
            observer(StepView{n, t, C, Cdot});
        }
        if (n == steps) break;
        C = rk4Step(C, drift, dt);
    }
}

Trajectory integrate(const Drift& drift, const CovarianceMatrix& C0, double dt, int steps, int stride) {
    if (stride < 1) throw std::invalid_argument("integrate: stride must be >= 1");
    Trajectory traj;
    traj.dt = dt;
    propagate(drift, C0, dt, steps, [&](const StepView& v) {
        if (v.index % stride != 0 && v.index != steps) return;
        traj.times.push_back(v.t);
        traj.states.push_back(v.C);
        traj.rates.push_back(v.Cdot);
    });
    return traj;
}

} // namespace mesolead

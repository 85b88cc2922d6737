// lyapunov.hpp: covariance-matrix dynamics dC/dt = -(W C + C W^dagger) + F, W = iH + gamma/2

#pragma once

#include "mesolead/gaussian.hpp"
#include "mesolead/lattice.hpp"
#include "mesolead/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <functional>
#include <optional>
#include <vector>

namespace mesolead {

inline constexpr double kPhysicalityTol = 1e-8;

class Drift {
public:
    Drift(const Eigen::MatrixXd& H, const Eigen::VectorXd& gamma, const Eigen::VectorXd& F);
    explicit Drift(const ExtendedModel& model);

    Eigen::Index dim() const { return W_.rows(); }
    const Eigen::MatrixXcd& W() const { return W_; }
    const Eigen::VectorXd& F() const { return F_; }

    // -(W C + C W^dagger) + F for Hermitian C; uses C W^dagger = (W C)^dagger.
    Eigen::MatrixXcd rate(const CovarianceMatrix& C) const;

private:
    Eigen::MatrixXcd W_;
    Eigen::SparseMatrix<cplx, Eigen::RowMajor> Wsparse_;
    Eigen::VectorXd F_;
};

CovarianceMatrix initialCovariance(const ExtendedModel& model, const std::vector<double>& system_occupations);

// True when the spectrum of C lies in [-tol, 1 + tol]; two Cholesky factorisations, no eigensolve.
bool withinUnitInterval(const CovarianceMatrix& C, double tol = kPhysicalityTol);

// Classical RK4 step, re-Hermitised; throws NumericalError if the result leaves [0, 1].
CovarianceMatrix step(const CovarianceMatrix& C, const Drift& drift, double dt);
// RK4 step without the spectral check.
CovarianceMatrix rk4Step(const CovarianceMatrix& C, const Drift& drift, double dt);

// Solves W C + C W^dagger = F by complex Schur reduction of W (Bartels-Stewart).
CovarianceMatrix steadyState(const Eigen::MatrixXcd& W, const Eigen::VectorXd& F);
CovarianceMatrix steadyState(const Drift& drift);

// max |W C + C W^dagger - F|
double steadyStateResidual(const Eigen::MatrixXcd& W, const Eigen::VectorXd& F, const CovarianceMatrix& C);

struct Trajectory {
    double dt{0.0};
    std::vector<double> times;
    std::vector<CovarianceMatrix> states;
    std::vector<CovarianceMatrix> rates;
};

// State handed to trajectory observers after every step (and once at t = 0).
// The spectral decomposition of C is computed on first request and cached.
struct StepView {
    StepView(int index_, double t_, const CovarianceMatrix& C_, const Eigen::MatrixXcd& Cdot_)
        : index(index_), t(t_), C(C_), Cdot(Cdot_) {}

    int index;
    double t;
    const CovarianceMatrix& C;
    const Eigen::MatrixXcd& Cdot;

    const HermitianEigen& spectrum() const {
        if (!spectrum_) spectrum_ = eigh(C);
        return *spectrum_;
    }

private:
    mutable std::optional<HermitianEigen> spectrum_;
};

using StepObserver = std::function<void(const StepView&)>;

// Integrates from C0 for `steps` RK4 steps of size dt, checking physicality after each step.
void propagate(const Drift& drift, const CovarianceMatrix& C0, double dt, int steps, const StepObserver& observer);

// Stores every `stride`-th state.
Trajectory integrate(const Drift& drift, const CovarianceMatrix& C0, double dt, int steps, int stride = 1);

} // namespace mesolead

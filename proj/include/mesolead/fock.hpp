// fock.hpp: brute-force many-body oracles on the 2^D Fock space
//
// Used to validate the covariance-matrix machinery on small systems. Modes are
// mapped to qubits by Jordan-Wigner: d_i = Z_0 ... Z_{i-1} sigma^-_i, basis
// state index = sum_i n_i 2^i.

#pragma once

#include "mesolead/gaussian.hpp"
#include "mesolead/lattice.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mesolead::fock {

inline constexpr int kMaxStateModes = 6;
inline constexpr int kMaxLindbladModes = 5;

class FockSpace {
public:
    explicit FockSpace(int modes, int max_modes = kMaxStateModes);

    int modes() const { return modes_; }
    Eigen::Index dim() const { return Eigen::Index{1} << modes_; }

    const Eigen::MatrixXd& annihilator(int i) const { return annihilators_.at(static_cast<std::size_t>(i)); }
    Eigen::MatrixXd creator(int i) const { return annihilator(i).transpose(); }
    Eigen::MatrixXd number(int i) const { return creator(i) * annihilator(i); }

    // sum_ij A_ij d_i^dagger d_j
    Eigen::MatrixXcd quadratic(const Eigen::MatrixXcd& A) const;

    // rho = prod_k [lambda_k n_k + (1 - lambda_k)(1 - n_k)] in the eigenmodes of C.
    Eigen::MatrixXcd densityFromCovariance(const CovarianceMatrix& C) const;
    // rho = exp(-d^dagger M d) / Tr[...]
    Eigen::MatrixXcd densityFromForm(const Eigen::MatrixXcd& M) const;
    // C_ij = Tr[rho d_j^dagger d_i]
    CovarianceMatrix covariance(const Eigen::MatrixXcd& rho) const;

private:
    int modes_;
    std::vector<Eigen::MatrixXd> annihilators_;
};

// Trace out the trailing (modes - keep) modes. With Jordan-Wigner ordering this is
// the fermionic reduced state of the leading `keep` modes.
Eigen::MatrixXcd traceOutTrailing(const Eigen::MatrixXcd& rho, int modes, int keep);

double entropy(const Eigen::MatrixXcd& rho);
// Tr[rho1 (ln rho1 - ln rho2)]
double relativeEntropy(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2);
// Uhlmann Tr sqrt(sqrt(rho1) rho2 sqrt(rho1)); equals Tr sqrt(rho1 rho2) for commuting states.
double fidelity(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2);

// Reduced state on the given modes of a Gaussian state: the modes are relabelled so
// that `keep` come first, the full density operator is built and the rest traced out.
Eigen::MatrixXcd reducedDensity(const CovarianceMatrix& C, const std::vector<Eigen::Index>& keep);

// Dense GKLS generator on the 4^D operator space (column-stacking vectorisation)
// for the extended model, with jumps sqrt(gamma_k (1 - f_k)) a_k and sqrt(gamma_k f_k) a_k^dagger.
class LindbladOracle {
public:
    explicit LindbladOracle(const ExtendedModel& model, double dissipator_sign = 1.0);

    const FockSpace& space() const { return space_; }
    const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }
    const Eigen::MatrixXcd& generator() const { return generator_; }
    const Eigen::MatrixXcd& dissipator(std::size_t alpha) const { return dissipators_.at(alpha); }

    Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho) const;
    Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v) const;

    // Apply a superoperator to rho.
    Eigen::MatrixXcd apply(const Eigen::MatrixXcd& superop, const Eigen::MatrixXcd& rho) const;

    // Evolve rho(0) with the exact propagator exp(L dt); returns rho at t = 0, dt, ..., steps*dt.
    std::vector<Eigen::MatrixXcd> evolve(const Eigen::MatrixXcd& rho0, double dt, int steps) const;

private:
    FockSpace space_;
    Eigen::MatrixXcd hamiltonian_;
    Eigen::MatrixXcd generator_;
    std::vector<Eigen::MatrixXcd> dissipators_;
};

} // namespace mesolead::fock

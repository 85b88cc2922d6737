// gaussian.hpp: functionals of number-conserving fermionic Gaussian states
//
// A Gaussian state is represented by its covariance matrix C_ij = <d_j^dagger d_i>.
// The equivalent exponential form is rho = exp(-d^dagger M d) / Z with
// M = log((1 - C) / C) and log Z = -log det(1 - C).

#pragma once

#include "mesolead/lattice.hpp"
#include "mesolead/linalg.hpp"

#include <Eigen/Dense>

#include <vector>

namespace mesolead {

using CovarianceMatrix = Eigen::MatrixXcd;

// Eigenvalues of C are clamped to [kClamp, 1 - kClamp] when forming M and log Z.
inline constexpr double kClamp = 1e-12;
inline constexpr double kHermitianTol = 1e-8;
inline constexpr double kSpectrumTol = 1e-10;

struct GaussianForm {
    Eigen::MatrixXcd M;
    double logZ{0.0};
};

// Throws std::invalid_argument if C is not square or ||C - C^dagger||_max > kHermitianTol.
void requireHermitian(const Eigen::MatrixXcd& C, const char* who);

// Binary entropy -x ln x - (1-x) ln(1-x), with x clipped to [0, 1].
double binaryEntropy(double x);

// Single-mode M entry log((1 - x)/x) on the clamped value.
double clampedLogit(double x);

GaussianForm gaussianForm(const CovarianceMatrix& C);
GaussianForm gaussianForm(const HermitianEigen& eig);

// Inverse map C = (1 + e^M)^{-1}.
CovarianceMatrix covarianceFromForm(const Eigen::MatrixXcd& M);

double vonNeumannEntropy(const CovarianceMatrix& C);
double vonNeumannEntropy(const HermitianEigen& eig);

// D(rho1 || rho2) = log Z2 - log Z1 + Re Tr[(M2 - M1) C1]
double relativeEntropy(const CovarianceMatrix& C1, const CovarianceMatrix& C2);
double relativeEntropy(const CovarianceMatrix& C1, const GaussianForm& form1, const GaussianForm& form2);

// det(1 + e^{-M1/2} e^{-M2/2}) / sqrt(Z1 Z2), evaluated without forming M or Z as
// det( sqrt(1 - C1) sqrt(1 - C2) + sqrt(C1) sqrt(C2) ).
double fidelity(const CovarianceMatrix& C1, const CovarianceMatrix& C2);

// (1 + exp((H - mu)/T))^{-1}; T = +infinity gives 1/2.
CovarianceMatrix thermalCovariance(const Eigen::MatrixXd& H, double temperature, double mu);
CovarianceMatrix thermalCovariance(const ExtendedModel& model, double temperature, double mu);

CovarianceMatrix reduceToBlock(const CovarianceMatrix& C, const std::vector<Eigen::Index>& indices);

// Spectrum of C must lie in [-tol, 1 + tol].
bool isPhysical(const Eigen::VectorXd& spectrum, double tol);

} // namespace mesolead

#include "mesolead/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mesolead {

void requireHermitian(const Eigen::MatrixXcd& C, const char* who) {
    if (C.rows() != C.cols()) {
        throw std::invalid_argument(std::string(who) + ": covariance matrix must be square");
    }
    const double asym = maxAbs(C - C.adjoint());
    if (asym > kHermitianTol) {
        throw std::invalid_argument(std::string(who) + ": covariance matrix is not Hermitian (max |C - C^dagger| = " +
                                    std::to_string(asym) + ")");
    }
}

double binaryEntropy(double x) {
    x = std::clamp(x, 0.0, 1.0);
    double s = 0.0;
    if (x > 0.0) s -= x * std::log(x);
    if (x < 1.0) s -= (1.0 - x) * std::log1p(-x);
    return s;
}

double clampedLogit(double x) {
    x = std::clamp(x, kClamp, 1.0 - kClamp);
    return std::log1p(-x) - std::log(x);
}

GaussianForm gaussianForm(const HermitianEigen& eig) {
    GaussianForm out;
    out.M = eig.apply(clampedLogit);
    double logZ = 0.0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        logZ -= std::log1p(-std::clamp(eig.values[i], kClamp, 1.0 - kClamp));
    }
    out.logZ = logZ;
    return out;
}

GaussianForm gaussianForm(const CovarianceMatrix& C) {
    requireHermitian(C, "gaussianForm");
    return gaussianForm(eigh(hermitize(C)));
}

CovarianceMatrix covarianceFromForm(const Eigen::MatrixXcd& M) {
    requireHermitian(M, "covarianceFromForm");
    return eigh(hermitize(M)).apply([](double m) {
        // 1/(1 + e^m), overflow-safe
        if (m >= 0.0) {
            const double e = std::exp(-m);
            return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(m));
    });
}

double vonNeumannEntropy(const HermitianEigen& eig) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) s += binaryEntropy(eig.values[i]);
    return s;
}

double vonNeumannEntropy(const CovarianceMatrix& C) {
    requireHermitian(C, "vonNeumannEntropy");
    double s = 0.0;
    const Eigen::VectorXd ev = eigvalsh(hermitize(C));
    for (Eigen::Index i = 0; i < ev.size(); ++i) s += binaryEntropy(ev[i]);
    return s;
}

double relativeEntropy(const CovarianceMatrix& C1, const GaussianForm& form1, const GaussianForm& form2) {
    if (C1.rows() != form2.M.rows() || form1.M.rows() != form2.M.rows()) {
        throw std::invalid_argument("relativeEntropy: dimension mismatch");
    }
    const cplx tr = ((form2.M - form1.M) * C1).trace();
    return form2.logZ - form1.logZ + tr.real();
}

double relativeEntropy(const CovarianceMatrix& C1, const CovarianceMatrix& C2) {
    if (C1.rows() != C2.rows() || C1.cols() != C2.cols()) {
        throw std::invalid_argument("relativeEntropy: dimension mismatch (" + std::to_string(C1.rows()) + " vs " +
                                    std::to_string(C2.rows()) + ")");
    }
    return relativeEntropy(C1, gaussianForm(C1), gaussianForm(C2));
}

double fidelity(const CovarianceMatrix& C1, const CovarianceMatrix& C2) {
    if (C1.rows() != C2.rows() || C1.cols() != C2.cols()) {
        throw std::invalid_argument("fidelity: dimension mismatch (" + std::to_string(C1.rows()) + " vs " +
                                    std::to_string(C2.rows()) + ")");
    }
    requireHermitian(C1, "fidelity");
    requireHermitian(C2, "fidelity");
    if (C1.rows() == 0) return 1.0;
    // Multiplying det(1 + e^{-M1/2} e^{-M2/2}) by det(1 - C1)^{1/2} det(1 - C2)^{1/2} = (Z1 Z2)^{-1/2}
    // and using e^{-M/2} = sqrt(C/(1-C)) gives det(sqrt(1-C1) sqrt(1-C2) + sqrt(C1) sqrt(C2)).
    const auto e1 = eigh(hermitize(C1));
    const auto e2 = eigh(hermitize(C2));
    auto sqrtPart = [](double x) { return std::sqrt(std::clamp(x, 0.0, 1.0)); };
    auto sqrtHole = [](double x) { return std::sqrt(std::clamp(1.0 - x, 0.0, 1.0)); };
    const Eigen::MatrixXcd Q = e1.apply(sqrtHole) * e2.apply(sqrtHole) + e1.apply(sqrtPart) * e2.apply(sqrtPart);
    // log-domain determinant from the LU factors
    const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(Q);
    const Eigen::MatrixXcd& U = lu.matrixLU();
    cplx logdet = std::log(cplx(lu.permutationP().determinant()));
    for (Eigen::Index i = 0; i < U.rows(); ++i) logdet += std::log(U(i, i));
    return std::exp(logdet).real();
}

CovarianceMatrix thermalCovariance(const Eigen::MatrixXd& H, double temperature, double mu) {
    if (!(temperature > 0.0)) throw std::invalid_argument("thermalCovariance: temperature must be > 0");
    if (std::isinf(temperature)) {
        return 0.5 * Eigen::MatrixXcd::Identity(H.rows(), H.cols());
    }
    const Eigen::MatrixXcd Hc = H.cast<cplx>();
    return eigh(Hc).apply([&](double e) { return fermi(e, mu, temperature); });
}

CovarianceMatrix thermalCovariance(const ExtendedModel& model, double temperature, double mu) {
    return thermalCovariance(model.H, temperature, mu);
}

CovarianceMatrix reduceToBlock(const CovarianceMatrix& C, const std::vector<Eigen::Index>& indices) {
    return principalSubmatrix(C, indices);
}

bool isPhysical(const Eigen::VectorXd& spectrum, double tol) {
    if (spectrum.size() == 0) return true;
    return spectrum.minCoeff() >= -tol && spectrum.maxCoeff() <= 1.0 + tol;
}

} // namespace mesolead

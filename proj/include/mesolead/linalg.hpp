// linalg.hpp: dense Hermitian eigendecomposition and matrix functions

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace mesolead {

using cplx = std::complex<double>;

// Raised on physicality violations and solver failures (CLI exit status 2).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct HermitianEigen {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns

    // U diag(f(lambda)) U^dagger
    template <class Fn>
    Eigen::MatrixXcd apply(Fn&& f) const {
        Eigen::VectorXcd d(values.size());
        for (Eigen::Index i = 0; i < values.size(); ++i) d[i] = cplx(f(values[i]));
        return vectors * d.asDiagonal() * vectors.adjoint();
    }

    // Re Tr[f(A) X] = sum_k f(lambda_k) Re(u_k^dagger X u_k), in O(D^3) without forming f(A).
    template <class Fn>
    double traceWith(Fn&& f, const Eigen::MatrixXcd& X) const {
        const Eigen::MatrixXcd XU = X * vectors;
        double acc = 0.0;
        for (Eigen::Index k = 0; k < values.size(); ++k) {
            acc += f(values[k]) * vectors.col(k).dot(XU.col(k)).real();
        }
        return acc;
    }
};

// Eigendecomposition of the Hermitian part of A (only the upper triangle is read).
HermitianEigen eigh(const Eigen::MatrixXcd& A);
Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& A);

inline Eigen::MatrixXcd hermitize(const Eigen::MatrixXcd& A) {
    return 0.5 * (A + A.adjoint());
}

inline double maxAbs(const Eigen::MatrixXcd& A) {
    return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

// Principal submatrix on the given (distinct, in-range) indices.
Eigen::MatrixXcd principalSubmatrix(const Eigen::MatrixXcd& A, const std::vector<Eigen::Index>& idx);

} // namespace mesolead

#include "mesolead/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <set>

namespace mesolead {

namespace {

void requireSquare(const Eigen::MatrixXcd& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("eigh: matrix must be square");
}

} // namespace

HermitianEigen eigh(const Eigen::MatrixXcd& A) {
    requireSquare(A);
    HermitianEigen out;
    if (A.rows() == 0) return out;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A.selfadjointView<Eigen::Upper>());
    if (es.info() != Eigen::Success) throw NumericalError("eigh: eigensolver did not converge");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
}

Eigen::VectorXd eigvalsh(const Eigen::MatrixXcd& A) {
    requireSquare(A);
    if (A.rows() == 0) return {};
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A.selfadjointView<Eigen::Upper>(), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("eigvalsh: eigensolver did not converge");
    return es.eigenvalues();
}

Eigen::MatrixXcd principalSubmatrix(const Eigen::MatrixXcd& A, const std::vector<Eigen::Index>& idx) {
    std::set<Eigen::Index> seen;
    for (auto i : idx) {
        if (i < 0 || i >= A.rows()) {
            throw std::out_of_range("principalSubmatrix: index " + std::to_string(i) + " out of range");
        }
        if (!seen.insert(i).second) {
            throw std::invalid_argument("principalSubmatrix: duplicate index " + std::to_string(i));
        }
    }
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd out(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) out(r, c) = A(idx[r], idx[c]);
    return out;
}

} // namespace mesolead

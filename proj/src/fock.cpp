#include "mesolead/fock.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mesolead::fock {

FockSpace::FockSpace(int modes, int max_modes) : modes_(modes) {
    if (modes < 1 || modes > max_modes) {
        throw std::invalid_argument("FockSpace: mode count " + std::to_string(modes) + " outside [1, " +
                                    std::to_string(max_modes) + "]");
    }
    const Eigen::Index n = dim();
    annihilators_.reserve(static_cast<std::size_t>(modes));
    for (int i = 0; i < modes; ++i) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        const unsigned bit = 1u << i;
        const unsigned below = bit - 1u;
        for (unsigned s = 0; s < static_cast<unsigned>(n); ++s) {
            if (!(s & bit)) continue;
            const double sign = (std::popcount(s & below) % 2) ? -1.0 : 1.0;
            a(static_cast<Eigen::Index>(s ^ bit), static_cast<Eigen::Index>(s)) = sign;
        }
        annihilators_.push_back(std::move(a));
    }
}

Eigen::MatrixXcd FockSpace::quadratic(const Eigen::MatrixXcd& A) const {
    const Eigen::Index n = dim();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 0; i < modes_; ++i) {
        for (int j = 0; j < modes_; ++j) {
            if (A(i, j) == cplx(0.0)) continue;
            out += A(i, j) * (creator(i) * annihilator(j)).cast<cplx>();
        }
    }
    return out;
}

Eigen::MatrixXcd FockSpace::densityFromCovariance(const CovarianceMatrix& C) const {
    if (C.rows() != modes_) throw std::invalid_argument("densityFromCovariance: dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (C + C.adjoint()));
    const Eigen::MatrixXcd& U = es.eigenvectors();
    const Eigen::Index n = dim();
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    for (int k = 0; k < modes_; ++k) {
        // b_k = sum_i conj(U_ik) d_i
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(n, n);
        for (int i = 0; i < modes_; ++i) b += std::conj(U(i, k)) * annihilator(i).cast<cplx>();
        const Eigen::MatrixXcd nk = b.adjoint() * b;
        const double lam = std::clamp(es.eigenvalues()[k], 0.0, 1.0);
        rho = rho * (lam * nk + (1.0 - lam) * (id - nk));
    }
    return 0.5 * (rho + rho.adjoint());
}

Eigen::MatrixXcd FockSpace::densityFromForm(const Eigen::MatrixXcd& M) const {
    if (M.rows() != modes_) throw std::invalid_argument("densityFromForm: dimension mismatch");
    const Eigen::MatrixXcd K = quadratic(M);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (K + K.adjoint()));
    const double shift = es.eigenvalues().minCoeff();
    Eigen::VectorXcd w(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::exp(-(es.eigenvalues()[i] - shift));
    Eigen::MatrixXcd rho = es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
    rho /= rho.trace();
    return rho;
}

CovarianceMatrix FockSpace::covariance(const Eigen::MatrixXcd& rho) const {
    CovarianceMatrix C(modes_, modes_);
    for (int i = 0; i < modes_; ++i)
        for (int j = 0; j < modes_; ++j)
            C(i, j) = (rho * (creator(j) * annihilator(i)).cast<cplx>()).trace();
    return C;
}

Eigen::MatrixXcd traceOutTrailing(const Eigen::MatrixXcd& rho, int modes, int keep) {
    if (keep < 0 || keep > modes) throw std::invalid_argument("traceOutTrailing: bad keep count");
    const Eigen::Index dk = Eigen::Index{1} << keep;
    const Eigen::Index dr = Eigen::Index{1} << (modes - keep);
    if (rho.rows() != dk * dr) throw std::invalid_argument("traceOutTrailing: dimension mismatch");
    // index = a + dk * b with a the kept modes (low bits)
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
    for (Eigen::Index b = 0; b < dr; ++b)
        for (Eigen::Index a1 = 0; a1 < dk; ++a1)
            for (Eigen::Index a2 = 0; a2 < dk; ++a2) out(a1, a2) += rho(a1 + dk * b, a2 + dk * b);
    return out;
}

namespace {

Eigen::MatrixXcd hermitianFn(const Eigen::MatrixXcd& A, double (*fn)(double)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (A + A.adjoint()));
    Eigen::VectorXcd d(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d[i] = fn(es.eigenvalues()[i]);
    return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().adjoint();
}

double safeLog(double x) { return std::log(std::max(x, 1e-300)); }
double safeSqrt(double x) { return std::sqrt(std::max(x, 0.0)); }

} // namespace

double entropy(const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    double s = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double p = es.eigenvalues()[i];
        if (p > 0.0) s -= p * std::log(p);
    }
    return s;
}

double relativeEntropy(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2) {
    const Eigen::MatrixXcd diff = hermitianFn(rho1, safeLog) - hermitianFn(rho2, safeLog);
    return (rho1 * diff).trace().real();
}

double fidelity(const Eigen::MatrixXcd& rho1, const Eigen::MatrixXcd& rho2) {
    const Eigen::MatrixXcd s1 = hermitianFn(rho1, safeSqrt);
    return hermitianFn(s1 * rho2 * s1, safeSqrt).trace().real();
}

Eigen::MatrixXcd reducedDensity(const CovarianceMatrix& C, const std::vector<Eigen::Index>& keep) {
    const auto D = C.rows();
    std::vector<Eigen::Index> order(keep);
    std::vector<bool> used(static_cast<std::size_t>(D), false);
    for (auto i : keep) {
        if (i < 0 || i >= D || used[static_cast<std::size_t>(i)]) {
            throw std::invalid_argument("reducedDensity: invalid or repeated index");
        }
        used[static_cast<std::size_t>(i)] = true;
    }
    for (Eigen::Index i = 0; i < D; ++i)
        if (!used[static_cast<std::size_t>(i)]) order.push_back(i);
    CovarianceMatrix P(D, D);
    for (Eigen::Index r = 0; r < D; ++r)
        for (Eigen::Index c = 0; c < D; ++c) P(r, c) = C(order[r], order[c]);
    const FockSpace space(static_cast<int>(D));
    return traceOutTrailing(space.densityFromCovariance(P), static_cast<int>(D), static_cast<int>(keep.size()));
}

LindbladOracle::LindbladOracle(const ExtendedModel& model, double dissipator_sign)
    : space_(static_cast<int>(model.dim), kMaxLindbladModes) {
    const Eigen::Index n = space_.dim();
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    hamiltonian_ = space_.quadratic(model.H.cast<cplx>());

    // vec(A X B) = (B^T kron A) vec(X)
    generator_ = cplx(0.0, -1.0) * (Eigen::kroneckerProduct(id, hamiltonian_).eval() -
                                    Eigen::kroneckerProduct(hamiltonian_.transpose(), id).eval());

    auto jumpTerm = [&](const Eigen::MatrixXcd& J) {
        const Eigen::MatrixXcd JdJ = J.adjoint() * J;
        return (Eigen::kroneckerProduct(J.conjugate(), J).eval() - 0.5 * Eigen::kroneckerProduct(id, JdJ).eval() -
                0.5 * Eigen::kroneckerProduct(JdJ.transpose(), id).eval())
            .eval();
    };

    for (std::size_t alpha = 0; alpha < model.leadCount(); ++alpha) {
        const auto& blk = model.blocks[alpha];
        const auto& lead = model.leads[alpha];
        Eigen::MatrixXcd Dalpha = Eigen::MatrixXcd::Zero(n * n, n * n);
        for (Eigen::Index k = 0; k < blk.size; ++k) {
            const int mode = static_cast<int>(blk.offset + k);
            const double g = lead.dampings[k];
            const double f = lead.occupations[k];
            const Eigen::MatrixXcd a = space_.annihilator(mode).cast<cplx>();
            Dalpha += g * (1.0 - f) * jumpTerm(a);
            Dalpha += g * f * jumpTerm(a.adjoint());
        }
        Dalpha *= dissipator_sign;
        generator_ += Dalpha;
        dissipators_.push_back(std::move(Dalpha));
    }
}

Eigen::VectorXcd LindbladOracle::vec(const Eigen::MatrixXcd& rho) const {
    return Eigen::Map<const Eigen::VectorXcd>(rho.data(), rho.size());
}

Eigen::MatrixXcd LindbladOracle::unvec(const Eigen::VectorXcd& v) const {
    const Eigen::Index n = space_.dim();
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), n, n);
}

Eigen::MatrixXcd LindbladOracle::apply(const Eigen::MatrixXcd& superop, const Eigen::MatrixXcd& rho) const {
    return unvec(superop * vec(rho));
}

std::vector<Eigen::MatrixXcd> LindbladOracle::evolve(const Eigen::MatrixXcd& rho0, double dt, int steps) const {
    const Eigen::MatrixXcd scaled = generator_ * dt;
    const Eigen::MatrixXcd P = scaled.exp();
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    Eigen::VectorXcd v = vec(rho0);
    out.push_back(rho0);
    for (int s = 0; s < steps; ++s) {
        v = P * v;
        out.push_back(unvec(v));
    }
    return out;
}

} // namespace mesolead::fock

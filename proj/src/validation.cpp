#include "mesolead/validation.hpp"

#include "mesolead/fock.hpp"
#include "mesolead/lyapunov.hpp"
#include "mesolead/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mesolead {

CheckResult makeCheck(std::string name, double observed, double bound, bool expect_above) {
    CheckResult r;
    r.name = std::move(name);
    r.observed = observed;
    r.bound = bound;
    r.expect_above = expect_above;
    r.passed = expect_above ? !(observed <= bound) : (observed <= bound);
    return r;
}

namespace {

Eigen::MatrixXcd randomUnitary(Eigen::Index D, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXcd Z(D, D);
    for (Eigen::Index j = 0; j < D; ++j)
        for (Eigen::Index i = 0; i < D; ++i) Z(i, j) = cplx(g(rng), g(rng));
    const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Z);
    Eigen::MatrixXcd Q = qr.householderQ();
    // fix the column phases so that the distribution does not depend on the QR convention
    const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index k = 0; k < D; ++k) {
        const double a = std::abs(R(k, k));
        if (a > 0.0) Q.col(k) *= R(k, k) / a;
    }
    return Q;
}

Eigen::VectorXd randomSpectrum(Eigen::Index D, std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd v(D);
    for (Eigen::Index i = 0; i < D; ++i) v[i] = u(rng);
    return v;
}

CovarianceMatrix compose(const Eigen::MatrixXcd& U, const Eigen::VectorXd& lam) {
    return hermitize(U * lam.cast<cplx>().asDiagonal() * U.adjoint());
}

} // namespace

CovarianceMatrix randomCovariance(Eigen::Index D, std::mt19937_64& rng, double lo, double hi) {
    const Eigen::MatrixXcd U = randomUnitary(D, rng);
    return compose(U, randomSpectrum(D, rng, lo, hi));
}

std::pair<CovarianceMatrix, CovarianceMatrix> randomCommutingPair(Eigen::Index D, std::mt19937_64& rng) {
    const Eigen::MatrixXcd U = randomUnitary(D, rng);
    return {compose(U, randomSpectrum(D, rng, 0.02, 0.98)), compose(U, randomSpectrum(D, rng, 0.02, 0.98))};
}

std::vector<CheckResult> gaussianOracleChecks(int cases, int max_dim, std::uint64_t seed, double tol) {
    std::mt19937_64 rng(seed);
    double entropyErr = 0.0, relErr = 0.0, blockErr = 0.0, blockCovErr = 0.0, fidErr = 0.0;
    for (int c = 0; c < cases; ++c) {
        const int D = 1 + c % max_dim;
        const fock::FockSpace space(D);
        const CovarianceMatrix C1 = randomCovariance(D, rng);
        const CovarianceMatrix C2 = randomCovariance(D, rng);
        const Eigen::MatrixXcd rho1 = space.densityFromCovariance(C1);
        const Eigen::MatrixXcd rho2 = space.densityFromCovariance(C2);

        entropyErr = std::max(entropyErr, std::abs(vonNeumannEntropy(C1) - fock::entropy(rho1)));
        relErr = std::max(relErr, std::abs(relativeEntropy(C1, C2) - fock::relativeEntropy(rho1, rho2)));

        // a random proper subset of modes (the full set when D = 1)
        std::vector<Eigen::Index> idx(static_cast<std::size_t>(D));
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto keep = static_cast<std::size_t>(D == 1 ? 1 : 1 + static_cast<int>(rng() % (D - 1)));
        idx.resize(keep);
        const Eigen::MatrixXcd red = fock::reducedDensity(C1, idx);
        const CovarianceMatrix block = reduceToBlock(C1, idx);
        blockErr = std::max(blockErr, std::abs(vonNeumannEntropy(block) - fock::entropy(red)));
        const fock::FockSpace sub(static_cast<int>(keep));
        blockCovErr = std::max(blockCovErr, maxAbs(sub.covariance(red) - block));

        const auto [A, B] = randomCommutingPair(D, rng);
        fidErr = std::max(fidErr, std::abs(fidelity(A, B) - fock::fidelity(space.densityFromCovariance(A),
                                                                             space.densityFromCovariance(B))));
    }
    return {makeCheck("gaussian: entropy vs Fock", entropyErr, tol),
            makeCheck("gaussian: relative entropy vs Fock", relErr, tol),
            makeCheck("gaussian: block entropy vs partial trace", blockErr, tol),
            makeCheck("gaussian: block covariance vs partial trace", blockCovErr, tol),
            makeCheck("gaussian: fidelity (commuting) vs Fock", fidErr, tol)};
}

ExtendedModel smallResonantLevel(int modes) {
    LeadSpec lead;
    lead.modes = modes;
    return buildModel(uniformChain(1, 1.0, 1.0, {0}), {lead});
}

namespace {

int stepCount(double dt, double t_max) {
    if (!(dt > 0.0) || !(t_max >= dt)) throw std::invalid_argument("need 0 < dt <= t_max");
    return static_cast<int>(std::lround(t_max / dt));
}

} // namespace

double lindbladDeviation(const ExtendedModel& model, const std::vector<double>& init, double dt, double t_max,
                         double dissipator_sign) {
    const int steps = stepCount(dt, t_max);
    const CovarianceMatrix C0 = initialCovariance(model, init);
    const fock::LindbladOracle oracle(model, dissipator_sign);
    const auto rhos = oracle.evolve(oracle.space().densityFromCovariance(C0), dt, steps);
    double err = 0.0;
    const Drift drift(model);
    CovarianceMatrix C = C0;
    for (int n = 0; n <= steps; ++n) {
        const double e = maxAbs(oracle.space().covariance(rhos[static_cast<std::size_t>(n)]) - C);
        err = std::isfinite(e) ? std::max(err, e) : INFINITY;
        if (n < steps) C = rk4Step(C, drift, dt);
    }
    return err;
}

double currentDeviation(const ExtendedModel& model, const std::vector<double>& init, double dt, double t_max) {
    const int steps = stepCount(dt, t_max);
    const CovarianceMatrix C0 = initialCovariance(model, init);
    const fock::LindbladOracle oracle(model);
    const auto& space = oracle.space();
    const auto rhos = oracle.evolve(space.densityFromCovariance(C0), dt, steps);
    const CurrentEvaluator evaluator(model);
    const cplx i(0.0, 1.0);

    std::vector<Eigen::MatrixXcd> HL, HSL, NL;
    for (std::size_t a = 0; a < model.leadCount(); ++a) {
        HL.push_back(space.quadratic(model.leadHamiltonian(a).cast<cplx>()));
        HSL.push_back(space.quadratic(model.couplingHamiltonian(a).cast<cplx>()));
        Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(model.dim, model.dim);
        for (auto k : model.leadIndices(a)) P(k, k) = 1.0;
        NL.push_back(space.quadratic(P));
    }
    const Eigen::MatrixXcd& H = oracle.hamiltonian();
    const Eigen::MatrixXcd N = space.quadratic(Eigen::MatrixXcd::Identity(model.dim, model.dim));

    double err = 0.0;
    for (const auto& rho : rhos) {
        const CovarianceMatrix C = space.covariance(rho);
        const auto cur = evaluator.currents(C);
        for (std::size_t a = 0; a < model.leadCount(); ++a) {
            const Eigen::MatrixXcd Drho = oracle.apply(oracle.dissipator(a), rho);
            const double IE = (H * Drho).trace().real();
            const double IP = (N * Drho).trace().real();
            const double JP = (i * ((NL[a] * HSL[a] - HSL[a] * NL[a]) * rho).trace()).real();
            const double JE = (i * ((HL[a] * HSL[a] - HSL[a] * HL[a]) * rho).trace() + (HSL[a] * Drho).trace()).real();
            err = std::max({err, std::abs(IE - cur[a].IE), std::abs(IP - cur[a].IP), std::abs(JP - cur[a].JP),
                            std::abs(JE - cur[a].JE)});
        }
    }
    return err;
}

} // namespace mesolead

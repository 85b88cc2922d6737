#include "mesolead/fock.hpp"
#include "mesolead/lyapunov.hpp"
#include "mesolead/validation.hpp"

#include <doctest.h>

#include <random>

using namespace mesolead;

TEST_CASE("canonical anticommutation relations") {
    const fock::FockSpace s(3);
    const auto I = Eigen::MatrixXd::Identity(s.dim(), s.dim());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Eigen::MatrixXd ac = s.annihilator(i) * s.creator(j) + s.creator(j) * s.annihilator(i);
            CHECK((ac - (i == j ? 1.0 : 0.0) * I).cwiseAbs().maxCoeff() == 0.0);
            const Eigen::MatrixXd aa = s.annihilator(i) * s.annihilator(j) + s.annihilator(j) * s.annihilator(i);
            CHECK(aa.cwiseAbs().maxCoeff() == 0.0);
        }
}

TEST_CASE("density operator reproduces its covariance") {
    std::mt19937_64 rng(3);
    for (int D = 1; D <= 4; ++D) {
        const fock::FockSpace s(D);
        const auto C = randomCovariance(D, rng);
        const auto rho = s.densityFromCovariance(C);
        CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-13);
        CHECK(maxAbs(s.covariance(rho) - C) < 1e-13);
        // exponential form and eigenmode product agree
        CHECK(maxAbs(s.densityFromForm(gaussianForm(C).M) - rho) < 1e-12);
    }
}

TEST_CASE("partial trace of trailing modes keeps the leading block") {
    std::mt19937_64 rng(5);
    const fock::FockSpace s(4);
    const auto C = randomCovariance(4, rng);
    const auto red = fock::traceOutTrailing(s.densityFromCovariance(C), 4, 2);
    CHECK(maxAbs(fock::FockSpace(2).covariance(red) - C.topLeftCorner(2, 2)) < 1e-13);
}

TEST_CASE("Gaussian functionals agree with the dense oracle") {
    for (const auto& c : gaussianOracleChecks(10, 4, 99)) {
        INFO(c.name);
        CHECK(c.passed);
    }
}

TEST_CASE("Uhlmann fidelity of identical states is one") {
    std::mt19937_64 rng(8);
    const fock::FockSpace s(3);
    const auto rho = s.densityFromCovariance(randomCovariance(3, rng));
    CHECK(fock::fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(fock::relativeEntropy(rho, rho)) < 1e-10);
}

TEST_CASE("Fock space size limits") {
    CHECK_THROWS_AS(fock::FockSpace(7), std::invalid_argument);
    CHECK_THROWS_AS(fock::FockSpace(0), std::invalid_argument);
    CHECK_THROWS_AS(fock::LindbladOracle(smallResonantLevel(5)), std::invalid_argument);
}

TEST_CASE("Lindblad generator preserves trace and Hermiticity") {
    const auto model = smallResonantLevel(2);
    const fock::LindbladOracle o(model);
    const auto rho0 = o.space().densityFromCovariance(initialCovariance(model, {0.5}));
    const auto rhos = o.evolve(rho0, 0.1, 20);
    for (const auto& rho : rhos) {
        CHECK(std::abs(rho.trace() - cplx(1.0)) < 1e-12);
        CHECK(maxAbs(rho - rho.adjoint()) < 1e-12);
    }
    // the summed per-lead dissipators are the dissipative part of the generator
    const Eigen::MatrixXcd drho = o.apply(o.generator(), rho0);
    const Eigen::MatrixXcd& H = o.hamiltonian();
    const Eigen::MatrixXcd unitary = cplx(0.0, -1.0) * (H * rho0 - rho0 * H);
    CHECK(maxAbs(drho - unitary - o.apply(o.dissipator(0), rho0)) < 1e-12);
}

TEST_CASE("covariance dynamics matches the many-body evolution at short times") {
    const auto model = smallResonantLevel(2);
    CHECK(lindbladDeviation(model, {0.5}, 0.005, 1.0) < 1e-8);
    // a sign flip in the dissipator is detected
    CHECK(lindbladDeviation(model, {0.5}, 0.005, 1.0, -1.0) > 1e-3);
}

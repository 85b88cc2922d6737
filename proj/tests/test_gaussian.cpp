#include "mesolead/gaussian.hpp"
#include "mesolead/validation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace mesolead;

namespace {

CovarianceMatrix diag(std::initializer_list<double> v) {
    Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) d[i++] = x;
    return d.cast<cplx>().asDiagonal();
}

} // namespace

TEST_CASE("half filling has M = 0 and log Z = D log 2") {
    const auto form = gaussianForm(CovarianceMatrix(0.5 * Eigen::MatrixXcd::Identity(2, 2)));
    CHECK(maxAbs(form.M) < 1e-15);
    CHECK(form.logZ == doctest::Approx(2.0 * std::log(2.0)));
}

TEST_CASE("diagonal covariance gives the diagonal logit") {
    const auto form = gaussianForm(diag({0.2, 0.7, 0.5}));
    CHECK(form.M(0, 0).real() == doctest::Approx(std::log(0.8 / 0.2)));
    CHECK(form.M(1, 1).real() == doctest::Approx(std::log(0.3 / 0.7)));
    CHECK(std::abs(form.M(2, 2)) < 1e-15);
    CHECK(std::abs(form.M(0, 1)) < 1e-15);
}

TEST_CASE("round trip C -> M -> C") {
    std::mt19937_64 rng(7);
    for (int D = 1; D <= 6; ++D) {
        const CovarianceMatrix C = randomCovariance(D, rng);
        CHECK(maxAbs(covarianceFromForm(gaussianForm(C).M) - C) < 1e-12);
    }
}

TEST_CASE("single-mode values") {
    const double h = -0.3 * std::log(0.3) - 0.7 * std::log(0.7);
    CHECK(vonNeumannEntropy(diag({0.3})) == doctest::Approx(h).epsilon(1e-14));
    CHECK(h == doctest::Approx(0.610864).epsilon(1e-6));
    // D(n1 || n2) = n1 ln(n1/n2) + (1 - n1) ln((1 - n1)/(1 - n2))
    CHECK(relativeEntropy(diag({0.5}), diag({0.25})) == doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-13));
    // F = sqrt(n1 n2) + sqrt((1 - n1)(1 - n2))
    CHECK(fidelity(diag({0.5}), diag({0.25})) ==
          doctest::Approx(std::sqrt(0.125) + std::sqrt(0.375)).epsilon(1e-13));
    CHECK(vonNeumannEntropy(diag({0.0, 1.0})) == 0.0);
}

TEST_CASE("relative entropy is non-negative and vanishes only on equal states") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; ++i) {
        const int D = 1 + i % 5;
        const auto C1 = randomCovariance(D, rng);
        const auto C2 = randomCovariance(D, rng);
        CHECK(relativeEntropy(C1, C2) > 0.0);
        CHECK(std::abs(relativeEntropy(C1, C1)) < 1e-10);
    }
}

TEST_CASE("fidelity: identity, symmetry and range") {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        const int D = 1 + i % 6;
        const auto C = randomCovariance(D, rng);
        CHECK(fidelity(C, C) == doctest::Approx(1.0).epsilon(1e-12));
        const auto [A, B] = randomCommutingPair(D, rng);
        const double f = fidelity(A, B);
        CHECK(f == doctest::Approx(fidelity(B, A)).epsilon(1e-12));
        CHECK(f >= 0.0);
        CHECK(f < 1.0);
        const auto E = randomCovariance(D, rng);
        const double g = fidelity(C, E);
        CHECK(g >= 0.0);
        CHECK(g <= 1.0 + 1e-8);
    }
}

TEST_CASE("fidelity equals the exponential-form determinant for non-commuting states") {
    std::mt19937_64 rng(17);
    for (int D = 1; D <= 5; ++D) {
        const auto C1 = randomCovariance(D, rng, 0.1, 0.9);
        const auto C2 = randomCovariance(D, rng, 0.1, 0.9);
        const auto f1 = gaussianForm(C1);
        const auto f2 = gaussianForm(C2);
        auto halfExp = [](const Eigen::MatrixXcd& M) {
            return eigh(M).apply([](double m) { return std::exp(-0.5 * m); });
        };
        const Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(D, D) + halfExp(f1.M) * halfExp(f2.M);
        const cplx det = P.determinant();
        const double expected = det.real() / std::exp(0.5 * (f1.logZ + f2.logZ));
        CHECK(std::abs(det.imag()) < 1e-10 * std::abs(det));
        CHECK(fidelity(C1, C2) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("fidelity stays finite near pure states") {
    const auto C1 = diag({1e-14, 1.0 - 1e-14, 0.5});
    const auto C2 = diag({2e-14, 1.0 - 3e-14, 0.5});
    const double f = fidelity(C1, C2);
    CHECK(std::isfinite(f));
    CHECK(f == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("entropy is additive over a block-diagonal split") {
    std::mt19937_64 rng(19);
    const auto A = randomCovariance(3, rng);
    const auto B = randomCovariance(2, rng);
    CovarianceMatrix C = CovarianceMatrix::Zero(5, 5);
    C.topLeftCorner(3, 3) = A;
    C.bottomRightCorner(2, 2) = B;
    CHECK(vonNeumannEntropy(C) == doctest::Approx(vonNeumannEntropy(A) + vonNeumannEntropy(B)).epsilon(1e-12));
    CHECK(maxAbs(reduceToBlock(C, {3, 4}) - B) == 0.0);
}

TEST_CASE("thermal covariance") {
    Eigen::MatrixXd H(1, 1);
    H << 0.4;
    CHECK(thermalCovariance(H, 0.5, 0.1)(0, 0).real() == doctest::Approx(1.0 / (std::exp(0.6) + 1.0)));
    const Eigen::MatrixXd H2 = Eigen::MatrixXd::Random(4, 4);
    const Eigen::MatrixXd Hs = H2 + H2.transpose();
    CHECK(maxAbs(thermalCovariance(Hs, INFINITY, 0.0) - 0.5 * Eigen::MatrixXcd::Identity(4, 4)) == 0.0);
    // M of the thermal state is (H - mu)/T
    const auto form = gaussianForm(thermalCovariance(Hs, 0.7, 0.2));
    Eigen::MatrixXcd expected = (Hs / 0.7).cast<cplx>();
    expected.diagonal().array() -= 0.2 / 0.7;
    CHECK(maxAbs(form.M - expected) < 1e-10);
    CHECK_THROWS_AS(thermalCovariance(Hs, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("input validation") {
    Eigen::MatrixXcd bad = 0.5 * Eigen::MatrixXcd::Identity(2, 2);
    bad(0, 1) = 0.1;
    CHECK_THROWS_AS(gaussianForm(bad), std::invalid_argument);
    CHECK_THROWS_AS(vonNeumannEntropy(bad), std::invalid_argument);
    CHECK_THROWS_AS(relativeEntropy(diag({0.5}), diag({0.5, 0.5})), std::invalid_argument);
    CHECK_THROWS_AS(fidelity(diag({0.5}), diag({0.5, 0.5})), std::invalid_argument);
    CHECK_THROWS_AS(reduceToBlock(diag({0.5, 0.5}), {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(reduceToBlock(diag({0.5, 0.5}), {2}), std::out_of_range);
    CHECK(isPhysical(Eigen::Vector2d(0.0, 1.0), 0.0));
    CHECK_FALSE(isPhysical(Eigen::Vector2d(-1e-7, 0.5), 1e-8));
}

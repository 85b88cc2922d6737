// validation.hpp: cross-checks of the covariance machinery against the Fock-space oracles

#pragma once

#include "mesolead/gaussian.hpp"
#include "mesolead/lattice.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mesolead {

struct CheckResult {
    std::string name;
    double observed{0.0};
    double bound{0.0};
    bool passed{false};
    // true when the check passes by exceeding the bound (mutation detection)
    bool expect_above{false};
};

CheckResult makeCheck(std::string name, double observed, double bound, bool expect_above = false);

// U diag(lambda) U^dagger with Haar-like U (QR of a complex Gaussian matrix) and
// eigenvalues uniform in [lo, hi].
CovarianceMatrix randomCovariance(Eigen::Index D, std::mt19937_64& rng, double lo = 0.02, double hi = 0.98);
// Two covariances sharing eigenvectors.
std::pair<CovarianceMatrix, CovarianceMatrix> randomCommutingPair(Eigen::Index D, std::mt19937_64& rng);

// Entropy, relative entropy, block reductions and (commuting) fidelity on `cases`
// random covariances with 1 <= D <= max_dim, against dense density operators.
std::vector<CheckResult> gaussianOracleChecks(int cases, int max_dim, std::uint64_t seed, double tol = 1e-10);

// Single site, one lead of `modes` modes (W = 10, Gamma = 1, T = 1, site at 1/2).
ExtendedModel smallResonantLevel(int modes);

// Max entrywise |C_rk4(t) - C_oracle(t)| over t in [0, t_max].
double lindbladDeviation(const ExtendedModel& model, const std::vector<double>& init, double dt, double t_max,
                         double dissipator_sign = 1.0);

// External and internal currents evaluated on the oracle's covariance against the
// Fock-space expectation values Tr[H D(rho)], i<[N_L, H_SL]>, i<[H_L, H_SL]> + Tr[H_SL D(rho)].
double currentDeviation(const ExtendedModel& model, const std::vector<double>& init, double dt, double t_max);

} // namespace mesolead

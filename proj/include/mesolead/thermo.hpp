// thermo.hpp: currents, entropy-production rates and entropy budgets of the extended system
//
// Sign convention: external currents I are positive when flowing from a residual
// reservoir into the extended system; internal currents J are positive when flowing
// from a lead into the central chain. Entropies are in nats.

#pragma once

#include "mesolead/gaussian.hpp"
#include "mesolead/lattice.hpp"
#include "mesolead/linalg.hpp"
#include "mesolead/lyapunov.hpp"

#include <Eigen/Dense>

#include <optional>
#include <vector>

namespace mesolead {

struct CurrentPair {
    double energy{0.0};
    double particle{0.0};
};

struct LeadCurrents {
    double IE{0.0}, IP{0.0}, IQ{0.0};  // external
    double JE{0.0}, JP{0.0}, JQ{0.0};  // internal
};

// Lead-alpha piece of the dissipative rate: -(gamma_a C + C gamma_a)/2 + F_a.
Eigen::MatrixXcd dissipativeRate(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha);

// I_E = Re Tr[H dCdiss], I_P = Re Tr[dCdiss]
CurrentPair externalCurrents(const ExtendedModel& model, const Eigen::MatrixXcd& dCdiss);

// J_P = Re i Tr([P_a, H_SLa] C), J_E = Re( i Tr([H_La, H_SLa] C) + Tr[H_SLa dCdiss] )
CurrentPair internalCurrents(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha,
                             const Eigen::MatrixXcd& dCdiss);

struct EntropyRates {
    double dS_SL{0.0};       // Re Tr[M(C) Cdot]
    double dS_S{0.0};        // same on the chain block
    double sigma_int{0.0};   // dS_S - sum_a beta_a J^Q_a
    double sigma_ext{0.0};   // dS_SL - sum_a beta_a I^Q_a
    double sigma_spohn{0.0}; // Re Tr[(M(C) - M_ss) Cdot]
};

// Per-lead operators precomputed once so that currents cost O(D^2) per evaluation.
class CurrentEvaluator {
public:
    explicit CurrentEvaluator(const ExtendedModel& model);

    const ExtendedModel& model() const { return *model_; }

    Eigen::MatrixXcd dissipativeRate(const CovarianceMatrix& C, std::size_t alpha) const;
    LeadCurrents currents(const CovarianceMatrix& C, std::size_t alpha) const;
    std::vector<LeadCurrents> currents(const CovarianceMatrix& C) const;

private:
    struct LeadOps {
        Eigen::MatrixXd commPN;  // [P_a, H_SLa]
        Eigen::MatrixXd commHL;  // [H_La, H_SLa]
        Eigen::MatrixXd HSL;
    };
    const ExtendedModel* model_;
    std::vector<LeadOps> ops_;
};

EntropyRates entropyRates(const ExtendedModel& model, const CovarianceMatrix& C, const Eigen::MatrixXcd& Cdot,
                          const CovarianceMatrix& C_ss);

// Same, reusing a spectral decomposition of C, precomputed currents and M_ss.
EntropyRates entropyRates(const ExtendedModel& model, const HermitianEigen& spectrum, const CovarianceMatrix& C,
                          const Eigen::MatrixXcd& Cdot, const std::vector<LeadCurrents>& currents,
                          const Eigen::MatrixXcd* M_ss);

// Re Tr[(M(C) - M(C_a^th)) (-i[H, C] + dCdiss_a)] per lead, with C_a^th the thermal state of
// the full H at (T_a, mu_a). Diagnostic decomposition of sigma_ext.
std::vector<double> perBathSpohnTerms(const ExtendedModel& model, const CovarianceMatrix& C);

struct LeadRecord {
    LeadCurrents currents;
    double S_L{0.0};
    double dN{0.0};           // N_L(t) - N_L(0)
    double dE{0.0};           // E_L(t) - E_L(0)
    double beta_dF{0.0};      // beta (dE - mu dN) - dS_L
    double int_I_minus_J_P{0.0};
    double int_I_minus_J_E{0.0};
};

struct ThermoRecord {
    double t{0.0};
    std::vector<LeadRecord> leads;
    double S_S{0.0}, S_SL{0.0};
    EntropyRates rates;
    double Sigma_int{0.0}, Sigma_ext{0.0};
    double correlations{0.0};  // S_S + sum_a S_La - S_SL
    bool clamp_dominated{false};
};

struct Budget {
    double lhs{0.0};
    double rhs{0.0};
    double residual{0.0};
};

// Sigma - Sigma~ against beta dF_L + I(S:L); requires exactly one lead.
Budget budgetSingleBath(const ThermoRecord& rec);
// Sigma - Sigma~ against sum_a beta_a dF_La + total correlations.
Budget budgetMultiBath(const ThermoRecord& rec);

struct IntegralIdentityResiduals {
    double particle{0.0};  // int (I_P - J_P) dt - dN_L
    double energy{0.0};    // int (I_E - J_E) dt - dE_L
};
std::vector<IntegralIdentityResiduals> integralIdentities(const ThermoRecord& rec);

enum class Quadrature { Trapezoid, Simpson };

// Running integral of a function sampled on a uniform grid starting at the lower limit.
// Simpson uses the 3/8 rule on the last three intervals when the interval count is odd.
class CumulativeIntegral {
public:
    CumulativeIntegral(double h, Quadrature rule);

    void push(double value);
    double value() const;
    std::size_t samples() const { return f_.size(); }

private:
    double h_;
    Quadrature rule_;
    std::vector<double> f_;
};

// Follows a trajectory starting at t = 0 with system and leads uncorrelated.
//
// observe() must see every step: it integrates the heat, particle and energy flows,
// which cost O(D^2). record() evaluates entropies and rates at the current step.
// Sigma and Sigma~ are assembled as dS_S - sum_a beta_a int J^Q_a and
// dS_SL - sum_a beta_a int I^Q_a, i.e. the entropy part of int sigma is taken exactly and
// only the currents go through the quadrature.
class ThermoTracker {
public:
    ThermoTracker(const ExtendedModel& model, const CovarianceMatrix& C0, double dt,
                  std::optional<CovarianceMatrix> steady = std::nullopt, Quadrature rule = Quadrature::Simpson);

    void observe(const StepView& view);
    // Full record at the most recently observed step.
    ThermoRecord record(const StepView& view) const;

    const std::vector<LeadCurrents>& lastCurrents() const { return last_currents_; }

private:
    struct LeadIntegrals {
        CumulativeIntegral IQ, JQ, particle, energy;
    };

    const ExtendedModel* model_;
    CurrentEvaluator evaluator_;
    std::optional<Eigen::MatrixXcd> M_ss_;
    int observed_{0};

    double S_S0_{0.0}, S_SL0_{0.0};
    std::vector<double> S_L0_, N_L0_, E_L0_;

    std::vector<LeadCurrents> last_currents_;
    std::vector<LeadIntegrals> integrals_;
};

// Lead-block particle number and energy Re Tr[C_L], Re Tr[H_L C_L].
double leadParticles(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha);
double leadEnergy(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha);

} // namespace mesolead

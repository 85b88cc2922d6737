#include "mesolead/thermo.hpp"

#include <cmath>
#include <stdexcept>

namespace mesolead {

namespace {

// Tr[X C] = sum_ij X_ij C_ji
cplx traceProduct(const Eigen::MatrixXd& X, const Eigen::MatrixXcd& C) {
    return (X.transpose().cast<cplx>().cwiseProduct(C)).sum();
}

cplx traceProduct(const Eigen::MatrixXcd& X, const Eigen::MatrixXcd& C) {
    return (X.transpose().cwiseProduct(C)).sum();
}

Eigen::MatrixXd commutator(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
    return A * B - B * A;
}

Eigen::MatrixXcd rateFor(const Eigen::VectorXd& gamma, const Eigen::VectorXd& F, const CovarianceMatrix& C) {
    const Eigen::Index D = C.rows();
    Eigen::MatrixXcd out(D, D);
    for (Eigen::Index j = 0; j < D; ++j)
        for (Eigen::Index i = 0; i < D; ++i) out(i, j) = -0.5 * (gamma[i] + gamma[j]) * C(i, j);
    out.diagonal() += F.cast<cplx>();
    return out;
}

double blockEntropy(const CovarianceMatrix& C, Eigen::Index offset, Eigen::Index size) {
    return vonNeumannEntropy(eigh(C.block(offset, offset, size, size)));
}

} // namespace

Eigen::MatrixXcd dissipativeRate(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha) {
    return rateFor(model.leadGamma(alpha), model.leadDrive(alpha), C);
}

CurrentPair externalCurrents(const ExtendedModel& model, const Eigen::MatrixXcd& dCdiss) {
    return {traceProduct(model.H, dCdiss).real(), dCdiss.trace().real()};
}

CurrentPair internalCurrents(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha,
                             const Eigen::MatrixXcd& dCdiss) {
    const auto& b = model.blocks.at(alpha);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(model.dim, model.dim);
    P.diagonal().segment(b.offset, b.size).setOnes();
    const Eigen::MatrixXd HSL = model.couplingHamiltonian(alpha);
    const Eigen::MatrixXd HL = model.leadHamiltonian(alpha);
    const cplx i(0.0, 1.0);
    const double JP = (i * traceProduct(commutator(P, HSL), C)).real();
    const double JE = (i * traceProduct(commutator(HL, HSL), C) + traceProduct(HSL, dCdiss)).real();
    return {JE, JP};
}

CurrentEvaluator::CurrentEvaluator(const ExtendedModel& model) : model_(&model) {
    for (std::size_t a = 0; a < model.leadCount(); ++a) {
        const auto& b = model.blocks[a];
        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(model.dim, model.dim);
        P.diagonal().segment(b.offset, b.size).setOnes();
        LeadOps ops;
        ops.HSL = model.couplingHamiltonian(a);
        ops.commPN = commutator(P, ops.HSL);
        ops.commHL = commutator(model.leadHamiltonian(a), ops.HSL);
        ops_.push_back(std::move(ops));
    }
}

Eigen::MatrixXcd CurrentEvaluator::dissipativeRate(const CovarianceMatrix& C, std::size_t alpha) const {
    return mesolead::dissipativeRate(*model_, C, alpha);
}

LeadCurrents CurrentEvaluator::currents(const CovarianceMatrix& C, std::size_t alpha) const {
    const auto& ops = ops_.at(alpha);
    const double mu = model_->leads[alpha].spec.chemical_potential;
    const Eigen::MatrixXcd dCdiss = dissipativeRate(C, alpha);
    const cplx i(0.0, 1.0);
    LeadCurrents out;
    out.IE = traceProduct(model_->H, dCdiss).real();
    out.IP = dCdiss.trace().real();
    out.IQ = out.IE - mu * out.IP;
    out.JP = (i * traceProduct(ops.commPN, C)).real();
    out.JE = (i * traceProduct(ops.commHL, C) + traceProduct(ops.HSL, dCdiss)).real();
    out.JQ = out.JE - mu * out.JP;
    return out;
}

std::vector<LeadCurrents> CurrentEvaluator::currents(const CovarianceMatrix& C) const {
    std::vector<LeadCurrents> out;
    out.reserve(ops_.size());
    for (std::size_t a = 0; a < ops_.size(); ++a) out.push_back(currents(C, a));
    return out;
}

EntropyRates entropyRates(const ExtendedModel& model, const HermitianEigen& spectrum, const CovarianceMatrix& C,
                          const Eigen::MatrixXcd& Cdot, const std::vector<LeadCurrents>& currents,
                          const Eigen::MatrixXcd* M_ss) {
    if (currents.size() != model.leadCount()) throw std::invalid_argument("entropyRates: one current set per lead");
    EntropyRates r;
    r.dS_SL = spectrum.traceWith(clampedLogit, Cdot);
    const Eigen::Index N = model.sites;
    const HermitianEigen sys = eigh(C.topLeftCorner(N, N));
    r.dS_S = sys.traceWith(clampedLogit, Cdot.topLeftCorner(N, N));
    double heatInt = 0.0;
    double heatExt = 0.0;
    for (std::size_t a = 0; a < currents.size(); ++a) {
        const double beta = model.leads[a].beta();
        heatInt += beta * currents[a].JQ;
        heatExt += beta * currents[a].IQ;
    }
    r.sigma_int = r.dS_S - heatInt;
    r.sigma_ext = r.dS_SL - heatExt;
    if (M_ss) r.sigma_spohn = r.dS_SL - traceProduct(*M_ss, Cdot).real();
    return r;
}

EntropyRates entropyRates(const ExtendedModel& model, const CovarianceMatrix& C, const Eigen::MatrixXcd& Cdot,
                          const CovarianceMatrix& C_ss) {
    requireHermitian(C, "entropyRates");
    const CovarianceMatrix Ch = hermitize(C);
    const CurrentEvaluator ev(model);
    const Eigen::MatrixXcd M_ss = gaussianForm(C_ss).M;
    return entropyRates(model, eigh(Ch), Ch, Cdot, ev.currents(Ch), &M_ss);
}

std::vector<double> perBathSpohnTerms(const ExtendedModel& model, const CovarianceMatrix& C) {
    requireHermitian(C, "perBathSpohnTerms");
    const CovarianceMatrix Ch = hermitize(C);
    const Eigen::MatrixXcd M = gaussianForm(Ch).M;
    const Eigen::MatrixXcd HC = model.H.cast<cplx>() * Ch;
    const Eigen::MatrixXcd unitary = cplx(0.0, -1.0) * (HC - HC.adjoint());
    std::vector<double> terms;
    for (std::size_t a = 0; a < model.leadCount(); ++a) {
        const auto& spec = model.leads[a].spec;
        const Eigen::MatrixXcd Mth = gaussianForm(thermalCovariance(model, spec.temperature, spec.chemical_potential)).M;
        const Eigen::MatrixXcd Cdot_a = unitary + dissipativeRate(model, Ch, a);
        terms.push_back(traceProduct(Eigen::MatrixXcd(M - Mth), Cdot_a).real());
    }
    return terms;
}

double leadParticles(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha) {
    const auto& b = model.blocks.at(alpha);
    return C.diagonal().segment(b.offset, b.size).real().sum();
}

double leadEnergy(const ExtendedModel& model, const CovarianceMatrix& C, std::size_t alpha) {
    const auto& b = model.blocks.at(alpha);
    const Eigen::MatrixXd HL = model.H.block(b.offset, b.offset, b.size, b.size);
    return traceProduct(HL, C.block(b.offset, b.offset, b.size, b.size)).real();
}

Budget budgetSingleBath(const ThermoRecord& rec) {
    if (rec.leads.size() != 1) throw std::invalid_argument("budgetSingleBath: record has more than one lead");
    return budgetMultiBath(rec);
}

Budget budgetMultiBath(const ThermoRecord& rec) {
    Budget b;
    b.lhs = rec.Sigma_int - rec.Sigma_ext;
    b.rhs = rec.correlations;
    for (const auto& l : rec.leads) b.rhs += l.beta_dF;
    b.residual = b.lhs - b.rhs;
    return b;
}

std::vector<IntegralIdentityResiduals> integralIdentities(const ThermoRecord& rec) {
    std::vector<IntegralIdentityResiduals> out;
    for (const auto& l : rec.leads) out.push_back({l.int_I_minus_J_P - l.dN, l.int_I_minus_J_E - l.dE});
    return out;
}

CumulativeIntegral::CumulativeIntegral(double h, Quadrature rule) : h_(h), rule_(rule) {
    if (!(h > 0.0)) throw std::invalid_argument("CumulativeIntegral: step must be > 0");
}

void CumulativeIntegral::push(double value) { f_.push_back(value); }

double CumulativeIntegral::value() const {
    const std::size_t n = f_.size() < 2 ? 0 : f_.size() - 1;  // intervals
    if (n == 0) return 0.0;
    if (rule_ == Quadrature::Trapezoid || n == 1) {
        double acc = 0.5 * (f_.front() + f_.back());
        for (std::size_t i = 1; i < n; ++i) acc += f_[i];
        return h_ * acc;
    }
    const std::size_t even = (n % 2 == 0) ? n : n - 3;
    double acc = 0.0;
    if (even > 0) {
        double s = f_[0] + f_[even];
        for (std::size_t i = 1; i < even; ++i) s += (i % 2 ? 4.0 : 2.0) * f_[i];
        acc += s * h_ / 3.0;
    }
    if (even != n) acc += 3.0 * h_ / 8.0 * (f_[n - 3] + 3.0 * f_[n - 2] + 3.0 * f_[n - 1] + f_[n]);
    return acc;
}

ThermoTracker::ThermoTracker(const ExtendedModel& model, const CovarianceMatrix& C0, double dt,
                             std::optional<CovarianceMatrix> steady, Quadrature rule)
    : model_(&model), evaluator_(model) {
    if (!(dt > 0.0)) throw std::invalid_argument("ThermoTracker: dt must be > 0");
    requireHermitian(C0, "ThermoTracker");
    if (steady) M_ss_ = gaussianForm(*steady).M;
    S_SL0_ = vonNeumannEntropy(C0);
    S_S0_ = blockEntropy(C0, 0, model.sites);
    for (std::size_t a = 0; a < model.leadCount(); ++a) {
        const auto& b = model.blocks[a];
        S_L0_.push_back(blockEntropy(C0, b.offset, b.size));
        N_L0_.push_back(leadParticles(model, C0, a));
        E_L0_.push_back(leadEnergy(model, C0, a));
        integrals_.push_back({CumulativeIntegral(dt, rule), CumulativeIntegral(dt, rule),
                              CumulativeIntegral(dt, rule), CumulativeIntegral(dt, rule)});
    }
}

void ThermoTracker::observe(const StepView& view) {
    if (view.index != observed_) throw std::logic_error("ThermoTracker::observe: steps must be observed in order");
    last_currents_ = evaluator_.currents(view.C);
    for (std::size_t a = 0; a < last_currents_.size(); ++a) {
        const auto& c = last_currents_[a];
        integrals_[a].IQ.push(c.IQ);
        integrals_[a].JQ.push(c.JQ);
        integrals_[a].particle.push(c.IP - c.JP);
        integrals_[a].energy.push(c.IE - c.JE);
    }
    ++observed_;
}

ThermoRecord ThermoTracker::record(const StepView& view) const {
    if (observed_ != view.index + 1) throw std::logic_error("ThermoTracker::record: step has not been observed");
    const auto& model = *model_;
    const HermitianEigen& spectrum = view.spectrum();
    ThermoRecord rec;
    rec.t = view.t;
    rec.rates = entropyRates(model, spectrum, view.C, view.Cdot, last_currents_, M_ss_ ? &*M_ss_ : nullptr);
    rec.S_SL = vonNeumannEntropy(spectrum);
    rec.S_S = blockEntropy(view.C, 0, model.sites);
    rec.correlations = rec.S_S - rec.S_SL;
    rec.Sigma_int = rec.S_S - S_S0_;
    rec.Sigma_ext = rec.S_SL - S_SL0_;
    for (std::size_t a = 0; a < model.leadCount(); ++a) {
        const auto& b = model.blocks[a];
        const auto& spec = model.leads[a].spec;
        const double beta = 1.0 / spec.temperature;
        LeadRecord lr;
        lr.currents = last_currents_[a];
        lr.S_L = blockEntropy(view.C, b.offset, b.size);
        lr.dN = leadParticles(model, view.C, a) - N_L0_[a];
        lr.dE = leadEnergy(model, view.C, a) - E_L0_[a];
        lr.beta_dF = beta * (lr.dE - spec.chemical_potential * lr.dN) - (lr.S_L - S_L0_[a]);
        lr.int_I_minus_J_P = integrals_[a].particle.value();
        lr.int_I_minus_J_E = integrals_[a].energy.value();
        rec.Sigma_int -= beta * integrals_[a].JQ.value();
        rec.Sigma_ext -= beta * integrals_[a].IQ.value();
        rec.correlations += lr.S_L;
        rec.leads.push_back(lr);
    }
    const double guard = 10.0 * kClamp;
    rec.clamp_dominated = spectrum.values.size() > 0 &&
                          (spectrum.values.minCoeff() < guard || spectrum.values.maxCoeff() > 1.0 - guard);
    return rec;
}

} // namespace mesolead

#include "mesolead/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace mesolead {

double fermi(double energy, double mu, double temperature) {
    const double x = (energy - mu) / temperature;
    if (x >= 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

LeadDiscretization discretizeLead(const LeadSpec& spec) {
    if (spec.modes < 1) throw std::invalid_argument("discretizeLead: modes must be >= 1");
    if (!(spec.half_bandwidth > 0.0)) throw std::invalid_argument("discretizeLead: half-bandwidth must be > 0");
    if (!(spec.coupling > 0.0)) throw std::invalid_argument("discretizeLead: coupling Gamma must be > 0");
    if (!(spec.temperature > 0.0)) throw std::invalid_argument("discretizeLead: temperature must be > 0");

    const int L = spec.modes;
    const double W = spec.half_bandwidth;
    const double e = 2.0 * W / L;
    // Gamma = 2 pi kappa^2 / e_k
    const double kappa = std::sqrt(spec.coupling * e / (2.0 * std::numbers::pi));

    LeadDiscretization out;
    out.spec = spec;
    out.energies.resize(L);
    out.couplings = Eigen::VectorXd::Constant(L, kappa);
    out.dampings = Eigen::VectorXd::Constant(L, e);
    out.occupations.resize(L);
    for (int k = 0; k < L; ++k) {
        out.energies[k] = -W + (k + 0.5) * e;
        out.occupations[k] = fermi(out.energies[k], spec.chemical_potential, spec.temperature);
    }
    return out;
}

Eigen::MatrixXd chainHamiltonian(const SystemSpec& sys) {
    if (sys.sites < 1) throw std::invalid_argument("chainHamiltonian: need at least one site");
    if (static_cast<int>(sys.onsite.size()) != sys.sites) {
        throw std::invalid_argument("chainHamiltonian: onsite has " + std::to_string(sys.onsite.size()) +
                                    " entries for " + std::to_string(sys.sites) + " sites");
    }
    if (sys.hopping < 0.0) throw std::invalid_argument("chainHamiltonian: hopping must be >= 0");
    const int N = sys.sites;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
    for (int j = 0; j < N; ++j) h(j, j) = sys.onsite[j];
    for (int j = 0; j + 1 < N; ++j) {
        h(j, j + 1) = -sys.hopping;
        h(j + 1, j) = -sys.hopping;
    }
    return h;
}

ExtendedModel assembleExtendedModel(const SystemSpec& sys, const std::vector<LeadDiscretization>& leads) {
    if (leads.empty()) throw std::invalid_argument("assembleExtendedModel: at least one lead required");
    if (sys.attachment.size() != leads.size()) {
        throw std::invalid_argument("assembleExtendedModel: " + std::to_string(sys.attachment.size()) +
                                    " attachment sites for " + std::to_string(leads.size()) + " leads");
    }
    const Eigen::MatrixXd hs = chainHamiltonian(sys);
    const Eigen::Index N = sys.sites;

    ExtendedModel m;
    m.sites = N;
    m.dim = N;
    for (const auto& lead : leads) {
        const auto L = lead.energies.size();
        if (lead.couplings.size() != L || lead.dampings.size() != L || lead.occupations.size() != L) {
            throw std::invalid_argument("assembleExtendedModel: inconsistent lead discretization lengths");
        }
        m.dim += L;
    }
    m.H = Eigen::MatrixXd::Zero(m.dim, m.dim);
    m.gamma = Eigen::VectorXd::Zero(m.dim);
    m.F = Eigen::VectorXd::Zero(m.dim);
    m.H.topLeftCorner(N, N) = hs;

    Eigen::Index offset = N;
    for (std::size_t a = 0; a < leads.size(); ++a) {
        const auto& lead = leads[a];
        const int p = sys.attachment[a];
        if (p < 0 || p >= N) {
            throw std::invalid_argument("assembleExtendedModel: attachment site " + std::to_string(p) +
                                        " outside chain of " + std::to_string(N) + " sites");
        }
        const Eigen::Index L = lead.energies.size();
        for (Eigen::Index k = 0; k < L; ++k) {
            const Eigen::Index i = offset + k;
            m.H(i, i) = lead.energies[k];
            m.H(i, p) = lead.couplings[k];
            m.H(p, i) = lead.couplings[k];
            m.gamma[i] = lead.dampings[k];
            m.F[i] = lead.dampings[k] * lead.occupations[k];
        }
        m.blocks.push_back({offset, L, p});
        offset += L;
    }
    m.leads = leads;
    return m;
}

ExtendedModel buildModel(const SystemSpec& sys, const std::vector<LeadSpec>& leads) {
    std::vector<LeadDiscretization> disc;
    disc.reserve(leads.size());
    for (const auto& l : leads) disc.push_back(discretizeLead(l));
    return assembleExtendedModel(sys, disc);
}

SystemSpec uniformChain(int sites, double onsite, double hopping, std::vector<int> attachment) {
    SystemSpec s;
    s.sites = sites;
    s.onsite.assign(static_cast<std::size_t>(std::max(sites, 0)), onsite);
    s.hopping = hopping;
    s.attachment = std::move(attachment);
    return s;
}

Eigen::VectorXd ExtendedModel::leadGamma(std::size_t alpha) const {
    const auto& b = blocks.at(alpha);
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
    g.segment(b.offset, b.size) = gamma.segment(b.offset, b.size);
    return g;
}

Eigen::VectorXd ExtendedModel::leadDrive(std::size_t alpha) const {
    const auto& b = blocks.at(alpha);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dim);
    f.segment(b.offset, b.size) = F.segment(b.offset, b.size);
    return f;
}

Eigen::MatrixXd ExtendedModel::leadHamiltonian(std::size_t alpha) const {
    const auto& b = blocks.at(alpha);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    h.block(b.offset, b.offset, b.size, b.size) = H.block(b.offset, b.offset, b.size, b.size);
    return h;
}

Eigen::MatrixXd ExtendedModel::couplingHamiltonian(std::size_t alpha) const {
    const auto& b = blocks.at(alpha);
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    h.block(0, b.offset, sites, b.size) = H.block(0, b.offset, sites, b.size);
    h.block(b.offset, 0, b.size, sites) = H.block(b.offset, 0, b.size, sites);
    return h;
}

std::vector<Eigen::Index> ExtendedModel::systemIndices() const {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(sites));
    for (Eigen::Index i = 0; i < sites; ++i) idx[static_cast<std::size_t>(i)] = i;
    return idx;
}

std::vector<Eigen::Index> ExtendedModel::leadIndices(std::size_t alpha) const {
    const auto& b = blocks.at(alpha);
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(b.size));
    for (Eigen::Index k = 0; k < b.size; ++k) idx[static_cast<std::size_t>(k)] = b.offset + k;
    return idx;
}

Eigen::SparseMatrix<double> ExtendedModel::sparseH() const {
    return H.sparseView();
}

} // namespace mesolead

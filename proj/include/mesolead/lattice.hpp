// lattice.hpp: tight-binding chain, flat-band lead discretisation, extended single-particle model
//
// All energies are in units of the global scale (set to 1), times in its inverse.
// Index ordering of the extended model is fixed: the N chain sites come first,
// followed by the modes of each lead in declaration order, ascending in energy.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <vector>

namespace mesolead {

struct SystemSpec {
    int sites{1};
    std::vector<double> onsite;      // one energy per site
    double hopping{0.0};             // g >= 0, enters as -g on nearest-neighbour bonds
    std::vector<int> attachment;     // 0-based site index for each lead
};

struct LeadSpec {
    int modes{1};                    // L
    double half_bandwidth{10.0};     // W
    double coupling{1.0};            // Gamma
    double temperature{1.0};         // T (k_B = 1)
    double chemical_potential{0.0};  // mu
};

struct LeadDiscretization {
    LeadSpec spec;
    Eigen::VectorXd energies;
    Eigen::VectorXd couplings;
    Eigen::VectorXd dampings;
    Eigen::VectorXd occupations;

    double spacing() const { return 2.0 * spec.half_bandwidth / spec.modes; }
    double beta() const { return 1.0 / spec.temperature; }
};

// Contiguous index range [offset, offset + size) of one lead inside the extended model.
struct LeadBlock {
    Eigen::Index offset{0};
    Eigen::Index size{0};
    Eigen::Index site{0};            // chain site the lead couples to
};

struct ExtendedModel {
    Eigen::Index sites{0};           // N
    Eigen::Index dim{0};             // D = N + sum of lead modes
    Eigen::MatrixXd H;               // real symmetric single-particle Hamiltonian
    Eigen::VectorXd gamma;           // diagonal damping, zero on chain sites
    Eigen::VectorXd F;               // diagonal drive gamma_k f_k
    std::vector<LeadBlock> blocks;
    std::vector<LeadDiscretization> leads;

    std::size_t leadCount() const { return blocks.size(); }

    Eigen::VectorXd leadGamma(std::size_t alpha) const;  // gamma restricted to lead alpha
    Eigen::VectorXd leadDrive(std::size_t alpha) const;  // F restricted to lead alpha
    Eigen::MatrixXd leadHamiltonian(std::size_t alpha) const;     // H_{L_alpha} embedded in D x D
    Eigen::MatrixXd couplingHamiltonian(std::size_t alpha) const; // H_{S L_alpha} embedded in D x D
    std::vector<Eigen::Index> systemIndices() const;
    std::vector<Eigen::Index> leadIndices(std::size_t alpha) const;

    Eigen::SparseMatrix<double> sparseH() const;
};

// Fermi-Dirac occupation 1/(exp((e - mu)/T) + 1) without overflow for T << |e - mu|.
double fermi(double energy, double mu, double temperature);

LeadDiscretization discretizeLead(const LeadSpec& spec);

// Tight-binding chain matrix (N x N) with onsite energies and -g hopping.
Eigen::MatrixXd chainHamiltonian(const SystemSpec& sys);

ExtendedModel assembleExtendedModel(const SystemSpec& sys, const std::vector<LeadDiscretization>& leads);

// Convenience: discretise every lead spec and assemble.
ExtendedModel buildModel(const SystemSpec& sys, const std::vector<LeadSpec>& leads);

// Uniform chain with the given onsite energy on every site.
SystemSpec uniformChain(int sites, double onsite, double hopping, std::vector<int> attachment);

} // namespace mesolead

#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "prethermal/coupling.hpp"
#include "prethermal/observables.hpp"

namespace prethermal {

/// Free-boson model H0 diagonalised: eigenpairs of j_script and the
/// Bogoliubov angles and energies of every mode.
struct SpinWaveSystem {
    Eigen::VectorXd nus;       // ascending
    Eigen::MatrixXd v;         // columns are eigenvectors
    Eigen::VectorXd thetas;
    Eigen::VectorXd epsilons;  // 2 sqrt(B (B + nu))
    double b_field = 0.0;

    int size() const { return static_cast<int>(nus.size()); }
};

SpinWaveSystem build_spinwave(const CouplingMatrix& jm, double b);

/// <d_k^dag d_k> in the initial Fock state.
Eigen::VectorXd gge_occupations(const SpinWaveSystem& sys, const ExcitationPattern& psi0);

/// lambda_k = ln(1 + 1/occ_k); an empty mode gets +infinity (frozen).
Eigen::VectorXd gge_lambdas(const Eigen::VectorXd& occupations);

/// Bose occupation 1/(e^lambda - 1); zero for a frozen mode.
Eigen::VectorXd bose_occupations(const Eigen::VectorXd& lambdas);

Eigen::VectorXd gge_magnetization(const SpinWaveSystem& sys, const Eigen::VectorXd& occupations);

struct GgeState {
    Eigen::VectorXd d_occupations;
    Eigen::VectorXd lambdas;
    Eigen::VectorXd sz_gge;
};

GgeState gge_state(const SpinWaveSystem& sys, const ExcitationPattern& psi0);

/// a_i(t) = sum_j u_ij a_j + w_ij a_j^dag.
struct HeisenbergPropagator {
    Eigen::MatrixXcd u;
    Eigen::MatrixXcd w;
    double time = 0.0;
};

HeisenbergPropagator propagator(const SpinWaveSystem& sys, double t);

/// max |u u^dag - w w^dag - I|.
double symplectic_defect(const HeisenbergPropagator& p);

QuenchTrace evolve_spinwave(const SpinWaveSystem& sys, const ExcitationPattern& psi0,
                            std::span<const double> times);

struct PairGap {
    double delta_e = 0.0;  // rad/s
    double weight = 0.0;
    int m = 0;
    int n = 0;
};

/// All pairs m<n of single-excitation eigenstates, weighted by the product
/// of their overlaps with psi0. Requires a single-excitation pattern.
std::vector<PairGap> pair_gap_spectrum(const SpinWaveSystem& sys, const ExcitationPattern& psi0);

/// Smallest gap among pairs with weight above `min_weight`.
double min_weighted_gap(const std::vector<PairGap>& gaps, double min_weight = 1e-3);

}  // namespace prethermal

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "prethermal/coupling.hpp"
#include "prethermal/kernels.hpp"
#include "prethermal/krylov.hpp"
#include "prethermal/observables.hpp"
#include "prethermal/spinwave.hpp"

namespace prethermal {

enum class SectorKind { FullIsing, XySector };

inline constexpr int default_full_space_cap = 16;

/// Sparse real-symmetric Hamiltonian in the z-basis. `basis` holds the
/// bitmask of every basis state (bit i = site i+1 up), ascending.
struct HamiltonianRep {
    SectorKind kind = SectorKind::FullIsing;
    int n_sites = 0;
    int excitations = -1;  // k for XySector
    kernels::CsrMatrix matrix;
    std::vector<std::uint64_t> basis;

    std::size_t dimension() const { return basis.size(); }
    std::optional<std::size_t> index_of(std::uint64_t mask) const;
};

/// H = sum_{i<j} J_ij sx_i sx_j + B sum_i sz_i on all 2^N states.
HamiltonianRep build_full_ising(const CouplingMatrix& jm, double b,
                                int cap = default_full_space_cap);

/// Flip-flop model sum_{i<j} J_ij (s+_i s-_j + h.c.) + B sum_i sz_i restricted to k up spins.
HamiltonianRep build_xy_sector(const CouplingMatrix& jm, double b, int k);

Eigen::MatrixXd dense_matrix(const HamiltonianRep& h);

enum class Propagation { Auto, Dense, Krylov };

struct EvolveOptions {
    Propagation method = Propagation::Auto;
    std::size_t dense_limit = 4096;
    KrylovOptions krylov;
};

Eigen::VectorXcd initial_state(const HamiltonianRep& h, const ExcitationPattern& psi0);

/// |psi(t)> for every requested time.
std::vector<Eigen::VectorXcd> propagate_states(const HamiltonianRep& h, const ExcitationPattern& psi0,
                                               std::span<const double> times,
                                               const EvolveOptions& options = {});

QuenchTrace evolve(const HamiltonianRep& h, const ExcitationPattern& psi0,
                   std::span<const double> times, const EvolveOptions& options = {});

Eigen::VectorXd magnetization(const HamiltonianRep& h, const Eigen::VectorXcd& psi);

/// <psi|H|psi>.
double energy(const HamiltonianRep& h, const Eigen::VectorXcd& psi);

/// Infinite-time average of sz. Eigenvalues closer than `degeneracy_tol`
/// (relative to the spectral radius) form one block; the initial state is
/// projected onto each block as a whole.
Eigen::VectorXd diagonal_ensemble(const HamiltonianRep& h, const ExcitationPattern& psi0,
                                  double degeneracy_tol = 1e-9);

/// Diagonal ensembles of many patterns from one Hamiltonian. Each
/// excitation-parity sector is diagonalised once, on first use.
class DiagonalEnsemble {
public:
    explicit DiagonalEnsemble(const HamiltonianRep& h, double degeneracy_tol = 1e-9);
    Eigen::VectorXd operator()(const ExcitationPattern& psi0);

private:
    struct Sector {
        std::vector<std::uint64_t> basis;
        std::vector<Eigen::Index> local;  // full index -> sector index, -1 outside
        Eigen::VectorXd values;
        Eigen::MatrixXd vectors;
    };
    const Sector& sector(int parity);

    const HamiltonianRep& h_;
    double tol_;
    std::optional<Sector> sectors_[2];
};

/// max_t |n(t) - n(0)|.
double excitation_drift(const QuenchTrace& trace);

/// Pair gaps between eigenstates of the full Hamiltonian `h`.
std::vector<PairGap> full_pair_gap_spectrum(const HamiltonianRep& h, const ExcitationPattern& psi0);

}  // namespace prethermal

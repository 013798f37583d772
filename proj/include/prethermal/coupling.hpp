#pragma once

#include <array>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "prethermal/lattice.hpp"
#include "prethermal/units.hpp"

namespace prethermal {

/// Symmetric spin-spin couplings (rad/s). `j` keeps the diagonal produced by
/// the ion-trap construction; `j_script` is the same matrix with a zero
/// diagonal, which is all the Ising and spin-wave Hamiltonians see.
struct CouplingMatrix {
    Eigen::MatrixXd j;
    Eigen::MatrixXd j_script;
    double j_max = 0.0;
    std::optional<double> alpha_fit;

    /// Validates symmetry (1e-12 relative) and derives j_script and j_max.
    static CouplingMatrix from_matrix(Eigen::MatrixXd j);

    int size() const { return static_cast<int>(j.rows()); }
    bool has_physical_diagonal() const;
    CouplingMatrix scaled(double factor) const;
};

CouplingMatrix power_law_couplings(int n, double j_max, double alpha);

/// Couplings from the transverse phonon modes, diagonal included.
CouplingMatrix ion_couplings(const TrapConfig& cfg, const PhononModes& modes);

/// hbar (dk)^2 Omega^2 / (2 M), in rad^3/s^3.
double coupling_prefactor(const TrapConfig& cfg);

/// lambda_m = prefactor / (mu^2 - omega_x^2 + omega_z^2 kappa_m), in mode order.
Eigen::VectorXd eigen_spectrum_lambda(const TrapConfig& cfg, const PhononModes& modes);

/// Least-squares slope of log|J_ij| against log|i-j| over all i<j, negated.
double alpha_fit(const CouplingMatrix& jm);

struct EffectivePotential {
    Eigen::VectorXd u;                  // -J_ii shifted to min 0
    double barrier_height = 0.0;
    std::array<int, 2> well_minima_sites{};  // 1-based, left and right well
};

EffectivePotential effective_potential(const CouplingMatrix& jm);

struct QuadraticFit {
    double offset = 0.0;
    double curvature = 0.0;     // coefficient of (i - (N+1)/2)^2
    double rms_residual = 0.0;
    double relative_rms = 0.0;  // rms residual over the range of the fitted data
};

/// Fits a + c (i - (N+1)/2)^2 over the central `fraction` of sites.
QuadraticFit fit_central_quadratic(const Eigen::VectorXd& values, double fraction);

/// Weight of the two lowest j_script eigenvectors after (v0 +- v1)/sqrt2
/// recombination: the smaller of the two half-chain weights.
double double_well_localization(const CouplingMatrix& jm);

enum class MassFormula {
    Verbatim,          // M [mu^2 - wx^2 + 4 zeta3]^2 / (wz^2 Omega^2 ln2), as printed
    OmegaZScaled,      // zeta term multiplied by wz^2
    SeriesConsistent,  // wz^2 kappa(pi) with kappa(pi) = (7/2) zeta3
};

struct ContinuumDispersion {
    double m_eff = 0.0;            // kg
    double quadratic_coeff = 0.0;  // hbar (dk)^2 / (2 M_eff), rad/s
};

ContinuumDispersion continuum_dispersion(const TrapConfig& cfg,
                                         MassFormula formula = MassFormula::Verbatim);

struct DetuningPoint {
    double detuning = 0.0;  // mu - omega_x, rad/s
    double alpha = 0.0;
};

/// Fits alpha at every detuning (mu - omega_x). Grid points run in parallel.
std::vector<DetuningPoint> scan_detuning(const TrapConfig& cfg, const PhononModes& modes,
                                         const std::vector<double>& detunings);

struct AlphaTuning {
    TrapConfig cfg;
    double alpha = 0.0;
    double detuning = 0.0;
};

struct TuneOptions {
    double min_detuning = units::two_pi * 50.0;  // rad/s, clear of the resonance guard
    double max_detuning = units::two_pi * 1.0e7;
    int grid_points = 241;
    double tolerance = 1e-8;
};

/// Scans mu above the centre-of-mass mode, takes the nearest grid point to
/// `target` and refines it by bisection between its neighbours.
AlphaTuning tune_alpha(const TrapConfig& cfg, const PhononModes& modes, double target,
                       const TuneOptions& options = {});

/// Rescales the Rabi frequency so that the largest off-diagonal coupling is j_max.
TrapConfig with_j_max(const TrapConfig& cfg, const PhononModes& modes, double j_max);

}  // namespace prethermal

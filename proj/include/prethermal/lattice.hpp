#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace prethermal {

enum class Geometry { Uniform, HarmonicTrap };

/// Trap and Raman-drive parameters. Frequencies are angular (rad/s), SI otherwise.
///
/// For Uniform geometry omega_z is the effective axial frequency
/// sqrt(Q^2 / (4 pi eps0 M a0^3)) and must agree with `spacing`. For
/// HarmonicTrap it is the real axial trap frequency; `spacing` is unused.
struct TrapConfig {
    int n_ions = 7;
    double omega_x = 0.0;
    double omega_z = 0.0;
    double mu = 0.0;
    double rabi = 0.0;
    double delta_k = 0.0;
    double mass = 0.0;
    double charge = 0.0;
    double spacing = 0.0;
    Geometry geometry = Geometry::Uniform;

    void validate() const;

    /// (Q^2 / (4 pi eps0 M omega_z^2))^(1/3); equals a0 for Uniform geometry.
    double length_scale() const;

    // 171Yb+ with a 4.8 MHz transverse trap and 355 nm Raman beams at 90 degrees.
    static TrapConfig ytterbium_uniform(int n_ions, double spacing);
    static TrapConfig ytterbium_harmonic(int n_ions, double omega_trap);
};

double effective_axial_frequency(double mass, double charge, double spacing);

struct PhononModes {
    Eigen::MatrixXd mode_matrix;   // V(i, m), columns orthonormal
    Eigen::VectorXd kappas;        // eigenvalues of K
    Eigen::VectorXd frequencies;   // omega_m; empty when not attached

    int size() const { return static_cast<int>(kappas.size()); }
};

/// Dimensionless dipolar matrix of a uniformly spaced chain.
Eigen::MatrixXd k_matrix(int n);

/// Same matrix for arbitrary positions measured in units of `length_scale`.
Eigen::MatrixXd k_matrix(std::span<const double> positions, double length_scale);

/// Closed-form cosine modes, m = 0..N-1 in formula order.
PhononModes perturbative_modes(int n);

/// omega_m = sqrt(omega_x^2 - omega_z^2 kappa_m); throws StabilityError if any is imaginary.
PhononModes attach_frequencies(PhononModes modes, const TrapConfig& cfg);

/// Throws ResonanceError when mu is within 1e-6 (relative) of a mode frequency.
void check_resonance(const TrapConfig& cfg, const PhononModes& modes);

struct EquilibriumOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;  // max force residual in units of the trap force scale
};

struct Equilibrium {
    std::vector<double> positions;  // metres, ascending
    double residual = 0.0;          // max |force| / trap force scale
    int iterations = 0;
};

Equilibrium equilibrium_positions(const TrapConfig& cfg, const EquilibriumOptions& options = {});

/// Numerical transverse modes, kappa ascending (omega descending).
PhononModes exact_modes(const TrapConfig& cfg);

/// Same without the resonance check, for detuning scans where mu is varied later.
PhononModes transverse_modes(const TrapConfig& cfg);

/// For each column of `reference`, the index of the matching column of
/// `candidate`: sorted-eigenvalue order, with overlap maximisation inside
/// clusters whose relative gap is below 1e-9.
std::vector<int> match_modes(const PhononModes& reference, const PhononModes& candidate);

/// min over parity of max_i |v_i -+ v_{N+1-i}|; zero for a parity eigenvector.
double inversion_asymmetry(const Eigen::VectorXd& v);

}  // namespace prethermal

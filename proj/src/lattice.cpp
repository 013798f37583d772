#include "prethermal/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "prethermal/errors.hpp"
#include "prethermal/units.hpp"

namespace prethermal {

namespace {

void require_size(int n) {
    if (n < 2) throw InvalidArgument("chain needs at least 2 ions, got " + std::to_string(n));
}

// Make the first significant entry of every column positive.
void fix_signs(Eigen::MatrixXd& v) {
    for (Eigen::Index c = 0; c < v.cols(); ++c) {
        const double scale = v.col(c).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < v.rows(); ++r) {
            if (std::abs(v(r, c)) > 1e-8 * scale) {
                if (v(r, c) < 0.0) v.col(c) *= -1.0;
                break;
            }
        }
    }
}

// Coulomb force balance in units of the trap length scale:
// F_i = -u_i + sum_j sign(u_i - u_j) / (u_i - u_j)^2.
Eigen::VectorXd trap_forces(const Eigen::VectorXd& u) {
    const auto n = u.size();
    Eigen::VectorXd f = -u;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) {
                const double d = u(i) - u(j);
                f(i) += (d > 0 ? 1.0 : -1.0) / (d * d);
            }
    return f;
}

Eigen::MatrixXd trap_jacobian(const Eigen::VectorXd& u) {
    const auto n = u.size();
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        jac(i, i) = -1.0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) {
                const double c = 2.0 / std::pow(std::abs(u(i) - u(j)), 3);
                jac(i, i) -= c;
                jac(i, j) = c;
            }
    }
    return jac;
}

}  // namespace

double effective_axial_frequency(double mass, double charge, double spacing) {
    return std::sqrt(units::coulomb_strength(charge) / (mass * spacing * spacing * spacing));
}

double TrapConfig::length_scale() const {
    return std::cbrt(units::coulomb_strength(charge) / (mass * omega_z * omega_z));
}

void TrapConfig::validate() const {
    require_size(n_ions);
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string("trap: ") + name + " must be > 0");
    };
    positive(omega_x, "omega_x");
    positive(omega_z, "omega_z");
    positive(mu, "mu");
    positive(rabi, "rabi");
    positive(delta_k, "delta_k");
    positive(mass, "mass");
    if (charge == 0.0 || !std::isfinite(charge)) throw InvalidArgument("trap: charge must be nonzero");
    if (geometry == Geometry::Uniform) {
        positive(spacing, "spacing");
        const double expected = effective_axial_frequency(mass, charge, spacing);
        if (std::abs(omega_z - expected) > 1e-6 * expected)
            throw InvalidArgument("trap: omega_z inconsistent with the uniform spacing");
    }
}

TrapConfig TrapConfig::ytterbium_uniform(int n_ions, double spacing) {
    TrapConfig c;
    c.n_ions = n_ions;
    c.omega_x = units::khz(4800.0);
    c.mass = units::yb171_mass;
    c.charge = units::elementary_charge;
    c.spacing = spacing;
    c.omega_z = effective_axial_frequency(c.mass, c.charge, spacing);
    c.mu = c.omega_x + units::khz(10.0);
    c.rabi = units::khz(100.0);
    c.delta_k = std::numbers::sqrt2 * units::two_pi / 355e-9;
    c.geometry = Geometry::Uniform;
    return c;
}

TrapConfig TrapConfig::ytterbium_harmonic(int n_ions, double omega_trap) {
    TrapConfig c = ytterbium_uniform(n_ions, 5e-6);
    c.omega_z = omega_trap;
    c.spacing = 0.0;
    c.geometry = Geometry::HarmonicTrap;
    return c;
}

Eigen::MatrixXd k_matrix(int n) {
    require_size(n);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) k(i, j) = -1.0 / std::pow(std::abs(i - j), 3);
    for (int i = 0; i < n; ++i) k(i, i) = -k.row(i).sum();
    return k;
}

Eigen::MatrixXd k_matrix(std::span<const double> positions, double length_scale) {
    const int n = static_cast<int>(positions.size());
    require_size(n);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) k(i, j) = -std::pow(length_scale / std::abs(positions[i] - positions[j]), 3);
    for (int i = 0; i < n; ++i) k(i, i) = -k.row(i).sum();
    return k;
}

PhononModes perturbative_modes(int n) {
    require_size(n);
    PhononModes m;
    m.mode_matrix.resize(n, n);
    m.kappas.resize(n);
    const double nd = n;
    for (int mode = 0; mode < n; ++mode) {
        for (int i = 1; i <= n; ++i) {
            m.mode_matrix(i - 1, mode) =
                mode == 0 ? std::sqrt(1.0 / nd)
                          : std::sqrt(2.0 / nd) * std::cos(mode * units::pi / nd * (i - 0.5));
        }
        double kappa = 0.0;
        for (int r = 1; r <= n / 2; ++r)
            kappa += (2.0 - 2.0 * std::cos(mode * r * units::pi / nd)) / (r * r * r);
        m.kappas(mode) = kappa;
    }
    return m;
}

PhononModes attach_frequencies(PhononModes modes, const TrapConfig& cfg) {
    modes.frequencies.resize(modes.size());
    for (int m = 0; m < modes.size(); ++m) {
        const double w2 = cfg.omega_x * cfg.omega_x - cfg.omega_z * cfg.omega_z * modes.kappas(m);
        if (!(w2 > 0.0))
            throw StabilityError("transverse mode " + std::to_string(m) +
                                 " is unstable (omega^2 <= 0); raise omega_x or lower omega_z");
        modes.frequencies(m) = std::sqrt(w2);
    }
    return modes;
}

void check_resonance(const TrapConfig& cfg, const PhononModes& modes) {
    for (int m = 0; m < modes.frequencies.size(); ++m) {
        if (std::abs(cfg.mu - modes.frequencies(m)) <= 1e-6 * modes.frequencies(m))
            throw ResonanceError("Raman detuning mu is resonant with transverse mode " + std::to_string(m) +
                                 " (" + std::to_string(units::to_khz(modes.frequencies(m))) + " kHz)");
    }
}

Equilibrium equilibrium_positions(const TrapConfig& cfg, const EquilibriumOptions& options) {
    cfg.validate();
    const int n = cfg.n_ions;
    Equilibrium eq;
    if (cfg.geometry == Geometry::Uniform) {
        eq.positions.resize(n);
        for (int i = 1; i <= n; ++i) eq.positions[i - 1] = cfg.spacing * (i - (n + 1) / 2.0);
        return eq;
    }

    // Damped Newton from a uniform guess with the usual N^-0.559 spacing scaling.
    const double guess = 2.018 / std::pow(static_cast<double>(n), 0.559);
    Eigen::VectorXd u(n);
    for (int i = 1; i <= n; ++i) u(i - 1) = guess * (i - (n + 1) / 2.0);
    Eigen::VectorXd f = trap_forces(u);
    double res = f.cwiseAbs().maxCoeff();
    int it = 0;
    while (res >= options.tolerance) {
        if (++it > options.max_iterations)
            throw SolverError("equilibrium positions did not converge (residual " + std::to_string(res) + ")");
        const Eigen::VectorXd step = trap_jacobian(u).partialPivLu().solve(-f);
        double damping = 1.0;
        for (;;) {
            Eigen::VectorXd trial = u + damping * step;
            bool ordered = true;
            for (int i = 1; i < n; ++i) ordered = ordered && trial(i) > trial(i - 1);
            if (ordered) {
                Eigen::VectorXd ft = trap_forces(trial);
                const double rt = ft.cwiseAbs().maxCoeff();
                if (rt < res || damping < 1e-6) {
                    u = trial;
                    f = ft;
                    res = rt;
                    break;
                }
            }
            damping *= 0.5;
            if (damping < 1e-12) throw SolverError("equilibrium positions: line search failed");
        }
    }
    // The potential is inversion symmetric; remove the rounding asymmetry.
    Eigen::VectorXd sym = 0.5 * (u - u.reverse());
    f = trap_forces(sym);
    eq.residual = f.cwiseAbs().maxCoeff();
    eq.iterations = it;
    const double scale = cfg.length_scale();
    eq.positions.resize(n);
    for (int i = 0; i < n; ++i) eq.positions[i] = sym(i) * scale;
    return eq;
}

PhononModes transverse_modes(const TrapConfig& cfg) {
    cfg.validate();
    Eigen::MatrixXd k;
    if (cfg.geometry == Geometry::Uniform) {
        k = k_matrix(cfg.n_ions);
    } else {
        const Equilibrium eq = equilibrium_positions(cfg);
        k = k_matrix(eq.positions, cfg.length_scale());
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    if (es.info() != Eigen::Success) throw SolverError("mode eigensolver failed");
    PhononModes modes;
    modes.mode_matrix = es.eigenvectors();
    modes.kappas = es.eigenvalues();
    fix_signs(modes.mode_matrix);
    return attach_frequencies(std::move(modes), cfg);
}

PhononModes exact_modes(const TrapConfig& cfg) {
    PhononModes modes = transverse_modes(cfg);
    check_resonance(cfg, modes);
    return modes;
}

std::vector<int> match_modes(const PhononModes& reference, const PhononModes& candidate) {
    const int n = reference.size();
    if (candidate.size() != n) throw InvalidArgument("match_modes: size mismatch");
    auto order = [](const Eigen::VectorXd& k) {
        std::vector<int> idx(k.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return k(a) < k(b); });
        return idx;
    };
    const auto ref = order(reference.kappas);
    const auto cand = order(candidate.kappas);
    std::vector<int> match(n);
    const double scale = std::max(1.0, candidate.kappas.cwiseAbs().maxCoeff());
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && candidate.kappas(cand[end]) - candidate.kappas(cand[end - 1]) < 1e-9 * scale) ++end;
        // Inside a near-degenerate cluster pick partners by largest overlap.
        std::vector<bool> used(end - start, false);
        for (int a = start; a < end; ++a) {
            int best = -1;
            double best_overlap = -1.0;
            for (int b = start; b < end; ++b) {
                if (used[b - start]) continue;
                const double ov =
                    std::abs(reference.mode_matrix.col(ref[a]).dot(candidate.mode_matrix.col(cand[b])));
                if (ov > best_overlap) {
                    best_overlap = ov;
                    best = b;
                }
            }
            used[best - start] = true;
            match[ref[a]] = cand[best];
        }
        start = end;
    }
    return match;
}

double inversion_asymmetry(const Eigen::VectorXd& v) {
    const Eigen::VectorXd r = v.reverse();
    return std::min((v - r).cwiseAbs().maxCoeff(), (v + r).cwiseAbs().maxCoeff());
}

}  // namespace prethermal

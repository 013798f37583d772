#include "prethermal/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "prethermal/errors.hpp"
#include "prethermal/units.hpp"

namespace prethermal {

CouplingMatrix CouplingMatrix::from_matrix(Eigen::MatrixXd j) {
    if (j.rows() != j.cols() || j.rows() < 2) throw InvalidArgument("coupling matrix must be square, N >= 2");
    const double scale = std::max(j.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if ((j - j.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw InvalidArgument("coupling matrix is not symmetric");
    CouplingMatrix c;
    c.j = 0.5 * (j + j.transpose());
    c.j_script = c.j;
    c.j_script.diagonal().setZero();
    c.j_max = c.j_script.cwiseAbs().maxCoeff();
    return c;
}

bool CouplingMatrix::has_physical_diagonal() const { return j.diagonal().cwiseAbs().maxCoeff() > 0.0; }

CouplingMatrix CouplingMatrix::scaled(double factor) const {
    CouplingMatrix c = *this;
    c.j *= factor;
    c.j_script *= factor;
    c.j_max *= std::abs(factor);
    return c;
}

CouplingMatrix power_law_couplings(int n, double j_max, double alpha) {
    if (n < 2) throw InvalidArgument("power law: need n >= 2");
    if (!(j_max > 0.0)) throw InvalidArgument("power law: j_max must be > 0");
    if (!(alpha >= 0.0)) throw InvalidArgument("power law: alpha must be >= 0");
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            if (a != b) j(a, b) = j_max / std::pow(std::abs(a - b), alpha);
    CouplingMatrix c = CouplingMatrix::from_matrix(std::move(j));
    if (n >= 3) c.alpha_fit = alpha_fit(c);
    return c;
}

double coupling_prefactor(const TrapConfig& cfg) {
    return units::hbar * cfg.delta_k * cfg.delta_k * cfg.rabi * cfg.rabi / (2.0 * cfg.mass);
}

CouplingMatrix ion_couplings(const TrapConfig& cfg, const PhononModes& modes_in) {
    cfg.validate();
    if (modes_in.size() != cfg.n_ions) throw InvalidArgument("ion couplings: mode count differs from n_ions");
    const PhononModes modes =
        modes_in.frequencies.size() == modes_in.size() ? modes_in : attach_frequencies(modes_in, cfg);
    check_resonance(cfg, modes);
    const int n = cfg.n_ions;
    Eigen::VectorXd inv(n);
    for (int m = 0; m < n; ++m) {
        const double w = modes.frequencies(m);
        inv(m) = 1.0 / (cfg.mu * cfg.mu - w * w);
    }
    const double pref = coupling_prefactor(cfg);
    const Eigen::MatrixXd& v = modes.mode_matrix;
    Eigen::MatrixXd j(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            double s = 0.0;
            for (int m = 0; m < n; ++m) s += v(a, m) * v(b, m) * inv(m);
            j(a, b) = j(b, a) = pref * s;
        }
    CouplingMatrix c = CouplingMatrix::from_matrix(std::move(j));
    bool all_positive = n >= 3;
    for (int a = 0; a < n && all_positive; ++a)
        for (int b = a + 1; b < n; ++b)
            if (!(c.j(a, b) > 0.0)) all_positive = false;
    if (all_positive) c.alpha_fit = alpha_fit(c);
    return c;
}

Eigen::VectorXd eigen_spectrum_lambda(const TrapConfig& cfg, const PhononModes& modes) {
    cfg.validate();
    const double pref = coupling_prefactor(cfg);
    Eigen::VectorXd lambda(modes.size());
    for (int m = 0; m < modes.size(); ++m) {
        const double den = cfg.mu * cfg.mu - cfg.omega_x * cfg.omega_x + cfg.omega_z * cfg.omega_z * modes.kappas(m);
        if (den == 0.0) throw ResonanceError("lambda: zero denominator at mode " + std::to_string(m));
        lambda(m) = pref / den;
    }
    return lambda;
}

double alpha_fit(const CouplingMatrix& jm) {
    const int n = jm.size();
    if (n < 3) throw InvalidArgument("alpha fit needs n >= 3");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int count = 0;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            const double v = jm.j(a, b);
            if (!(v > 0.0)) throw NumericError("alpha fit: off-diagonal coupling J(" + std::to_string(a + 1) + "," +
                                               std::to_string(b + 1) + ") is not positive");
            const double x = std::log(static_cast<double>(b - a));
            const double y = std::log(v);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++count;
        }
    const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
    return -slope;
}

EffectivePotential effective_potential(const CouplingMatrix& jm) {
    if (!jm.has_physical_diagonal())
        throw DegeneratePotentialError(
            "effective potential needs the physical diagonal J_ii; build the couplings with ion_couplings");
    const int n = jm.size();
    EffectivePotential p;
    p.u = -jm.j.diagonal();
    p.u.array() -= p.u.minCoeff();
    int left = 0;
    for (int i = 0; i < n / 2; ++i)
        if (p.u(i) < p.u(left)) left = i;
    int right = n - 1;
    for (int i = n - 1; i >= (n + 1) / 2; --i)
        if (p.u(i) < p.u(right)) right = i;
    double top = p.u(left);
    for (int i = left; i <= right; ++i) top = std::max(top, p.u(i));
    p.barrier_height = top - std::min(p.u(left), p.u(right));
    p.well_minima_sites = {left + 1, right + 1};
    return p;
}

QuadraticFit fit_central_quadratic(const Eigen::VectorXd& values, double fraction) {
    const int n = static_cast<int>(values.size());
    const int count = std::max(3, static_cast<int>(std::lround(fraction * n)));
    if (count > n) throw InvalidArgument("quadratic fit: window larger than the chain");
    const int first = (n - count) / 2;
    Eigen::MatrixXd a(count, 2);
    Eigen::VectorXd y(count);
    for (int k = 0; k < count; ++k) {
        const double x = (first + k + 1) - (n + 1) / 2.0;
        a(k, 0) = 1.0;
        a(k, 1) = x * x;
        y(k) = values(first + k);
    }
    const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(y);
    const Eigen::VectorXd resid = y - a * coef;
    QuadraticFit fit;
    fit.offset = coef(0);
    fit.curvature = coef(1);
    fit.rms_residual = std::sqrt(resid.squaredNorm() / count);
    const double range = y.maxCoeff() - y.minCoeff();
    fit.relative_rms = range > 0.0 ? fit.rms_residual / range : 0.0;
    return fit;
}

double double_well_localization(const CouplingMatrix& jm) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm.j_script);
    const Eigen::MatrixXd& v = es.eigenvectors();
    const int n = jm.size();
    auto half_weight = [n](const Eigen::VectorXd& x) {
        double left = 0.0, right = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = x(i) * x(i);
            if (2 * i + 1 < n) left += w;
            else if (2 * i + 1 > n) right += w;
            else { left += 0.5 * w; right += 0.5 * w; }
        }
        return std::max(left, right) / (left + right);
    };
    const Eigen::VectorXd plus = (v.col(0) + v.col(1)) / std::numbers::sqrt2;
    const Eigen::VectorXd minus = (v.col(0) - v.col(1)) / std::numbers::sqrt2;
    return std::min(half_weight(plus), half_weight(minus));
}

ContinuumDispersion continuum_dispersion(const TrapConfig& cfg, MassFormula formula) {
    cfg.validate();
    const double wz2 = cfg.omega_z * cfg.omega_z;
    const double detune2 = cfg.mu * cfg.mu - cfg.omega_x * cfg.omega_x;
    double shift = 0.0;
    switch (formula) {
        case MassFormula::Verbatim: shift = 4.0 * units::zeta3; break;
        case MassFormula::OmegaZScaled: shift = 4.0 * units::zeta3 * wz2; break;
        case MassFormula::SeriesConsistent: shift = 3.5 * units::zeta3 * wz2; break;
    }
    const double num = detune2 + shift;
    ContinuumDispersion d;
    d.m_eff = cfg.mass * num * num / (wz2 * cfg.rabi * cfg.rabi * units::ln2);
    if (!(d.m_eff > 0.0)) throw NumericError("continuum dispersion: effective mass is not positive");
    d.quadratic_coeff = units::hbar * cfg.delta_k * cfg.delta_k / (2.0 * d.m_eff);
    return d;
}

std::vector<DetuningPoint> scan_detuning(const TrapConfig& cfg, const PhononModes& modes,
                                         const std::vector<double>& detunings) {
    std::vector<DetuningPoint> out(detunings.size());
    const auto count = static_cast<std::int64_t>(detunings.size());
    std::vector<std::exception_ptr> errors(detunings.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t k = 0; k < count; ++k) {
        try {
            TrapConfig c = cfg;
            c.mu = cfg.omega_x + detunings[k];
            out[k].detuning = detunings[k];
            out[k].alpha = alpha_fit(ion_couplings(c, modes));
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

AlphaTuning tune_alpha(const TrapConfig& cfg, const PhononModes& modes, double target,
                       const TuneOptions& options) {
    if (options.grid_points < 2) throw InvalidArgument("tune_alpha: need at least 2 grid points");
    std::vector<double> grid(options.grid_points);
    const double l0 = std::log(options.min_detuning), l1 = std::log(options.max_detuning);
    for (int k = 0; k < options.grid_points; ++k)
        grid[k] = std::exp(l0 + (l1 - l0) * k / (options.grid_points - 1));
    const auto scan = scan_detuning(cfg, modes, grid);

    std::size_t nearest = 0;
    for (std::size_t k = 1; k < scan.size(); ++k)
        if (std::abs(scan[k].alpha - target) < std::abs(scan[nearest].alpha - target)) nearest = k;

    auto alpha_at = [&](double detuning) {
        TrapConfig c = cfg;
        c.mu = cfg.omega_x + detuning;
        return alpha_fit(ion_couplings(c, modes));
    };

    // Bracketing neighbour of the nearest grid point.
    double lo = scan[nearest].detuning, hi = lo;
    double alo = scan[nearest].alpha;
    bool bracketed = false;
    for (std::size_t nb : {nearest + 1, nearest - 1}) {
        if (nb >= scan.size()) continue;
        if ((scan[nb].alpha - target) * (scan[nearest].alpha - target) <= 0.0) {
            hi = scan[nb].detuning;
            bracketed = true;
            break;
        }
    }
    if (!bracketed && std::abs(alo - target) > options.tolerance)
        throw InvalidArgument("tune_alpha: target " + std::to_string(target) + " outside the reachable range [" +
                              std::to_string(scan.front().alpha) + ", " + std::to_string(scan.back().alpha) + "]");
    double best = lo, abest = alo;
    for (int it = 0; bracketed && it < 200 && std::abs(abest - target) > options.tolerance; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double am = alpha_at(mid);
        if ((am - target) * (alo - target) <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            alo = am;
        }
        best = mid;
        abest = am;
    }
    AlphaTuning t;
    t.cfg = cfg;
    t.cfg.mu = cfg.omega_x + best;
    t.alpha = abest;
    t.detuning = best;
    return t;
}

TrapConfig with_j_max(const TrapConfig& cfg, const PhononModes& modes, double j_max) {
    if (!(j_max > 0.0)) throw InvalidArgument("j_max must be > 0");
    const double current = ion_couplings(cfg, modes).j_max;
    TrapConfig c = cfg;
    c.rabi = cfg.rabi * std::sqrt(j_max / current);
    return c;
}

}  // namespace prethermal

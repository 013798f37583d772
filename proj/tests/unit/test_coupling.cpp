#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "oracles/oracles.hpp"
#include "prethermal/coupling.hpp"
#include "prethermal/errors.hpp"
#include "prethermal/units.hpp"

using namespace prethermal;

namespace {

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("mode-sum couplings equal the resolvent of the dipolar matrix") {
    SUBCASE("uniform") {
        auto cfg = TrapConfig::ytterbium_uniform(8, 5e-6);
        cfg.mu = cfg.omega_x + units::khz(20.0);
        const auto modes = exact_modes(cfg);
        const auto jm = ion_couplings(cfg, modes);
        const auto ref = oracle::couplings_by_inverse(k_matrix(8), coupling_prefactor(cfg), cfg.mu, cfg.omega_x,
                                                      cfg.omega_z);
        CHECK(rel_diff(jm.j, ref) < 1e-10);
        CHECK(jm.has_physical_diagonal());
    }
    SUBCASE("harmonic") {
        auto cfg = TrapConfig::ytterbium_harmonic(7, units::khz(500.0));
        cfg.mu = cfg.omega_x + units::khz(40.0);
        const auto modes = exact_modes(cfg);
        const auto jm = ion_couplings(cfg, modes);
        const auto eq = equilibrium_positions(cfg);
        const auto ref = oracle::couplings_by_inverse(k_matrix(eq.positions, cfg.length_scale()),
                                                      coupling_prefactor(cfg), cfg.mu, cfg.omega_x, cfg.omega_z);
        CHECK(rel_diff(jm.j, ref) < 1e-9);
        CHECK(jm.j_script.diagonal().cwiseAbs().maxCoeff() == 0.0);
        const Eigen::VectorXd lambda = eigen_spectrum_lambda(cfg, modes);
        const Eigen::MatrixXd recon = modes.mode_matrix * lambda.asDiagonal() * modes.mode_matrix.transpose();
        CHECK(rel_diff(recon, jm.j) < 1e-10);
    }
}

TEST_CASE("couplings scale with the square of the Rabi frequency") {
    auto cfg = TrapConfig::ytterbium_uniform(6, 5e-6);
    const auto modes = exact_modes(cfg);
    const auto a = ion_couplings(cfg, modes);
    cfg.rabi *= 3.0;
    const auto b = ion_couplings(cfg, modes);
    CHECK(rel_diff(b.j, 9.0 * a.j) < 1e-12);
    CHECK(a.alpha_fit.has_value());
    CHECK(*a.alpha_fit == doctest::Approx(*b.alpha_fit).epsilon(1e-12));
}

TEST_CASE("power-law couplings") {
    const auto jm = power_law_couplings(7, 2.0, 0.55);
    CHECK(jm.j_max == 2.0);
    CHECK(jm.j(0, 3) == doctest::Approx(2.0 / std::pow(3.0, 0.55)));
    CHECK(jm.j(2, 2) == 0.0);
    CHECK(alpha_fit(jm) == doctest::Approx(0.55).epsilon(1e-12));
    CHECK_FALSE(jm.has_physical_diagonal());
    CHECK(jm.scaled(0.5).j_max == 1.0);
    CHECK_THROWS_AS(power_law_couplings(7, -1.0, 0.5), InvalidArgument);
}

TEST_CASE("coupling matrix validation") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 3);
    m(0, 1) = 2.0;
    CHECK_THROWS_AS(CouplingMatrix::from_matrix(m), InvalidArgument);
    Eigen::MatrixXd neg = power_law_couplings(5, 1.0, 1.0).j;
    neg(0, 4) = neg(4, 0) = -0.1;
    CHECK_THROWS_AS(alpha_fit(CouplingMatrix::from_matrix(neg)), NumericError);
}

TEST_CASE("alpha tuning hits the target and grows with detuning") {
    const auto cfg = TrapConfig::ytterbium_harmonic(7, units::khz(500.0));
    const auto modes = transverse_modes(cfg);
    const auto scan = scan_detuning(cfg, modes, {units::khz(1.0), units::khz(10.0), units::khz(100.0),
                                                 units::khz(1000.0)});
    for (std::size_t k = 1; k < scan.size(); ++k) CHECK(scan[k].alpha > scan[k - 1].alpha);
    for (double target : {0.55, 1.0, 1.33}) {
        const auto t = tune_alpha(cfg, modes, target);
        CHECK(t.alpha == doctest::Approx(target).epsilon(1e-6));
        CHECK(*ion_couplings(t.cfg, modes).alpha_fit == doctest::Approx(target).epsilon(1e-6));
    }
    CHECK_THROWS_AS(tune_alpha(cfg, modes, 5.0), InvalidArgument);

    const auto scaled = with_j_max(tune_alpha(cfg, modes, 1.0).cfg, modes, units::khz(0.6));
    CHECK(ion_couplings(scaled, modes).j_max == doctest::Approx(units::khz(0.6)).epsilon(1e-12));
}

TEST_CASE("effective potential of a long-range uniform chain") {
    auto cfg = TrapConfig::ytterbium_uniform(40, 5e-6);
    const auto modes = transverse_modes(cfg);
    cfg = tune_alpha(cfg, modes, 0.4).cfg;
    const auto jm = ion_couplings(cfg, modes);
    const auto pot = effective_potential(jm);
    CHECK(pot.u.minCoeff() == 0.0);
    CHECK(pot.barrier_height > 0.0);
    CHECK(pot.well_minima_sites[0] < 20);
    CHECK(pot.well_minima_sites[1] > 21);
    CHECK(pot.well_minima_sites[0] + pot.well_minima_sites[1] == 41);
    CHECK_THROWS_AS(effective_potential(power_law_couplings(5, 1.0, 1.0)), DegeneratePotentialError);
}

TEST_CASE("central quadratic fit") {
    Eigen::VectorXd v(11);
    for (int i = 1; i <= 11; ++i) v(i - 1) = 3.0 - 0.25 * (i - 6.0) * (i - 6.0);
    const auto fit = fit_central_quadratic(v, 0.8);
    CHECK(fit.offset == doctest::Approx(3.0));
    CHECK(fit.curvature == doctest::Approx(-0.25));
    CHECK(fit.rms_residual < 1e-12);
    CHECK(fit.relative_rms < 1e-12);
}

TEST_CASE("double-well localisation of two decoupled halves") {
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(8, 8);
    for (int i = 0; i < 3; ++i) j(i, i + 1) = j(i + 1, i) = j(i + 4, i + 5) = j(i + 5, i + 4) = -1.0;
    j(3, 4) = j(4, 3) = -1e-4;
    CHECK(double_well_localization(CouplingMatrix::from_matrix(j)) > 0.999);
    CHECK(double_well_localization(power_law_couplings(8, 1.0, 12.0)) < 0.99);
}

TEST_CASE("band-bottom curvature of the continuum dispersion") {
    // lambda(q) = pref / (D + wz^2 kappa(q)), kappa(q) = sum_r 2 (1 - cos q r) / r^3.
    auto cfg = TrapConfig::ytterbium_uniform(50, 5e-6);
    cfg.mu = cfg.omega_x + units::khz(30.0);
    const double d = cfg.mu * cfg.mu - cfg.omega_x * cfg.omega_x;
    const double wz2 = cfg.omega_z * cfg.omega_z;
    auto kappa = [](double q) {
        double s = 0.0;
        for (int r = 200000; r >= 1; --r) s += 2.0 * (1.0 - std::cos(q * r)) / (double(r) * r * r);
        return s;
    };
    auto lambda = [&](double q) { return coupling_prefactor(cfg) / (d + wz2 * kappa(q)); };
    const double h = 1e-3;
    const double second = (lambda(units::pi + h) - 2.0 * lambda(units::pi) + lambda(units::pi - h)) / (h * h);
    const auto series = continuum_dispersion(cfg, MassFormula::SeriesConsistent);
    CHECK(series.quadratic_coeff == doctest::Approx(second / 2.0).epsilon(1e-4));

    cfg.mu = cfg.omega_x + units::khz(5000.0);
    const double v = continuum_dispersion(cfg, MassFormula::Verbatim).m_eff;
    const double s = continuum_dispersion(cfg, MassFormula::SeriesConsistent).m_eff;
    const double z = continuum_dispersion(cfg, MassFormula::OmegaZScaled).m_eff;
    CHECK(std::abs(v / s - 1.0) < 0.05);
    CHECK(std::abs(z / s - 1.0) < 0.05);
}

TEST_CASE("band-edge fit of the hundred-ion spectrum matches the series mass") {
    auto cfg = TrapConfig::ytterbium_uniform(100, 5e-6);
    cfg.mu = cfg.omega_x + units::khz(30.0);
    const auto modes = transverse_modes(cfg);
    const Eigen::VectorXd lambda = eigen_spectrum_lambda(cfg, modes);
    const int n = 100, take = 8;
    Eigen::MatrixXd a(take, 2);
    Eigen::VectorXd y(take);
    for (int r = 0; r < take; ++r) {
        const int m = n - 1 - r;
        const double dq = m * units::pi / n - units::pi;
        a.row(r) << 1.0, dq * dq;
        y(r) = lambda(m);
    }
    const Eigen::VectorXd coef = a.colPivHouseholderQr().solve(y);
    const double series = continuum_dispersion(cfg, MassFormula::SeriesConsistent).quadratic_coeff;
    CHECK(std::abs(series / coef(1) - 1.0) < 0.15);
}

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles/oracles.hpp"
#include "prethermal/errors.hpp"
#include "prethermal/spinwave.hpp"

using namespace prethermal;

namespace {

CouplingMatrix random_couplings(int n, double scale, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.2, 1.0);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) j(a, b) = j(b, a) = scale * u(rng);
    return CouplingMatrix::from_matrix(j);
}

}  // namespace

TEST_CASE("Bogoliubov angles and energies") {
    const auto jm = power_law_couplings(6, 1.0, 0.8);
    const double b = 7.0;
    const auto sys = build_spinwave(jm, b);
    for (int k = 0; k < sys.size(); ++k) {
        const double nu = sys.nus(k);
        CHECK(std::tanh(2.0 * sys.thetas(k)) == doctest::Approx(nu / (nu + 2.0 * b)));
        CHECK(sys.epsilons(k) == doctest::Approx(std::sqrt((2.0 * b) * (2.0 * b + 2.0 * nu))));
    }
    for (int k = 1; k < sys.size(); ++k) CHECK(sys.nus(k) >= sys.nus(k - 1));

    CHECK_THROWS_AS(build_spinwave(jm, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_spinwave(jm.scaled(-40.0), 1.0), StabilityError);
}

TEST_CASE("propagator stays symplectic and starts at the identity") {
    const auto sys = build_spinwave(power_law_couplings(7, 1.0, 0.55), 5.0);
    const auto p0 = propagator(sys, 0.0);
    CHECK((p0.u - Eigen::MatrixXcd::Identity(7, 7)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(p0.w.cwiseAbs().maxCoeff() < 1e-15);
    for (double t : {0.3, 4.0, 91.0}) CHECK(symplectic_defect(propagator(sys, t)) < 1e-12);

    const ExcitationPattern psi0(7, {3});
    const double times[] = {0.0};
    const auto tr = evolve_spinwave(sys, psi0, times);
    CHECK((tr.sz.row(0).transpose() - psi0.sz()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("anomalous propagator element against the truncated boson oracle") {
    // <1_l 1_j| a_i(t) |1_j> = w_il picks out the sign and phase of w.
    const auto jm = random_couplings(3, 1.0, 11);
    const double b = 2.5;
    const auto sys = build_spinwave(jm, b);
    const oracle::Fock fock(3, 6);
    const oracle::Mat h = fock.h0(jm.j_script, b);
    for (double t : {0.2, 0.9, 2.3}) {
        const auto p = propagator(sys, t);
        const oracle::Mat fwd = (oracle::cplx(0.0, -t) * h).exp();
        const oracle::Mat heis = fwd.adjoint() * fock.a(1) * fwd;
        for (int l : {2, 3}) {
            const auto bra = fock.fock_state({l, 1});
            const auto ket = fock.fock_state({1});
            const oracle::cplx amp = (bra.adjoint() * heis * ket)(0);
            CHECK(std::abs(amp - p.w(0, l - 1)) < 2e-3);
            CHECK(std::abs(p.w(0, l - 1)) > 0.02);
        }
        const auto vac = fock.fock_state({});
        for (int l : {1, 2, 3}) {
            const oracle::cplx amp = (vac.adjoint() * heis * fock.fock_state({l}))(0);
            CHECK(std::abs(amp - p.u(0, l - 1)) < 2e-3);
        }
    }
}

TEST_CASE("site occupations against a truncated boson simulation") {
    const auto jm = random_couplings(4, 1.0, 5);
    const double b = 10.0;
    const auto sys = build_spinwave(jm, b);
    const oracle::Fock fock(4, 4);
    const oracle::SpectralPropagator prop(fock.h0(jm.j_script, b));
    const ExcitationPattern psi0(4, {2, 3});
    const auto start = fock.fock_state({2, 3});
    const std::vector<double> times{0.0, 0.7, 3.1, 12.0};
    const auto tr = evolve_spinwave(sys, psi0, times);
    std::vector<oracle::Mat> number;
    for (int i = 1; i <= 4; ++i) number.push_back(fock.n(i));
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto psi = prop(start, times[k]);
        for (int i = 1; i <= 4; ++i) {
            const double n = (psi.adjoint() * number[i - 1] * psi)(0).real();
            CHECK(std::abs(tr.sz(static_cast<Eigen::Index>(k), i - 1) - (2.0 * n - 1.0)) < 2e-3);
        }
    }
}

TEST_CASE("GGE occupations are the conserved Bogoliubov numbers") {
    const auto jm = random_couplings(3, 1.0, 3);
    const double b = 2.0;
    const auto sys = build_spinwave(jm, b);
    const oracle::Fock fock(3, 5);
    const oracle::Mat h = fock.h0(jm.j_script, b);
    const ExcitationPattern psi0(3, {1});
    const auto start = fock.fock_state({1});
    const Eigen::VectorXd occ = gge_occupations(sys, psi0);
    for (int k = 0; k < 3; ++k) {
        oracle::Mat d = oracle::Mat::Zero(h.rows(), h.cols());
        for (int i = 1; i <= 3; ++i) {
            const oracle::Mat a = fock.a(i);
            d += sys.v(i - 1, k) * (std::cosh(sys.thetas(k)) * a + std::sinh(sys.thetas(k)) * a.adjoint());
        }
        const oracle::Mat num = d.adjoint() * d;
        CHECK((start.adjoint() * num * start)(0).real() == doctest::Approx(occ(k)).epsilon(1e-6));
        // Conserved up to truncation effects.
        const oracle::Vec later = oracle::evolve(h, start, 3.7);
        CHECK((later.adjoint() * num * later)(0).real() == doctest::Approx(occ(k)).epsilon(1e-3));
    }
}

TEST_CASE("Lagrange multipliers") {
    Eigen::VectorXd occ(3);
    occ << 0.0, 0.5, 2.0;
    const Eigen::VectorXd lam = gge_lambdas(occ);
    CHECK(std::isinf(lam(0)));
    CHECK(lam(1) == doctest::Approx(std::log(3.0)));
    const Eigen::VectorXd back = bose_occupations(lam);
    CHECK(back(0) == 0.0);
    CHECK(back(1) == doctest::Approx(0.5));
    CHECK(back(2) == doctest::Approx(2.0));
    occ(0) = -0.1;
    CHECK_THROWS_AS(gge_lambdas(occ), InvalidArgument);
}

TEST_CASE("single-excitation pair gaps against the dense flip-flop spectrum") {
    const auto jm = power_law_couplings(5, 1.0, 1.1);
    const double b = 4.0;
    const ExcitationPattern psi0(5, {2});
    const auto gaps = pair_gap_spectrum(build_spinwave(jm, b), psi0);
    REQUIRE(gaps.size() == 10);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle::xy(jm.j_script, b));
    const oracle::Vec start = oracle::product_state({2}, 5);
    std::vector<std::pair<double, double>> sector;  // energy, weight
    for (Eigen::Index n = 0; n < es.eigenvalues().size(); ++n) {
        const double w = std::norm(es.eigenvectors().col(n).dot(start));
        if (w > 1e-12) sector.emplace_back(es.eigenvalues()(n), w);
    }
    REQUIRE(sector.size() == 5);
    std::vector<std::pair<double, double>> ref, got;
    for (std::size_t a = 0; a < sector.size(); ++a)
        for (std::size_t c = a + 1; c < sector.size(); ++c)
            ref.emplace_back(std::abs(sector[a].first - sector[c].first), sector[a].second * sector[c].second);
    for (const auto& g : gaps) got.emplace_back(g.delta_e, g.weight);
    std::sort(ref.begin(), ref.end());
    std::sort(got.begin(), got.end());
    for (std::size_t k = 0; k < ref.size(); ++k) {
        CHECK(got[k].first == doctest::Approx(ref[k].first).epsilon(1e-10));
        CHECK(got[k].second == doctest::Approx(ref[k].second).epsilon(1e-8));
        CHECK(got[k].second >= 0.0);
        CHECK(got[k].second <= 1.0);
    }
    CHECK_THROWS_AS(pair_gap_spectrum(build_spinwave(jm, b), ExcitationPattern(5, {1, 2})), InvalidArgument);
}

TEST_CASE("short-range limit approaches the nearest-neighbour band") {
    const int n = 7;
    const auto sys = build_spinwave(power_law_couplings(n, 1.0, 9.0), 10.0);
    for (int m = 1; m <= n; ++m) {
        const double nn = 2.0 * std::cos(m * std::numbers::pi / (n + 1));
        CHECK(std::abs(sys.nus(n - m) - nn) < 1e-2);
    }
}

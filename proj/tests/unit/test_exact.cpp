#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "prethermal/errors.hpp"
#include "prethermal/exact.hpp"

using namespace prethermal;

namespace {

CouplingMatrix random_couplings(int n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) j(a, b) = j(b, a) = u(rng);
    return CouplingMatrix::from_matrix(j);
}

}  // namespace

TEST_CASE("two spins: flip-flop closed form") {
    Eigen::Matrix2d j;
    j << 0, 0.7, 0.7, 0;
    const auto h = build_full_ising(CouplingMatrix::from_matrix(j), 3.0);
    const std::vector<double> times{0.0, 0.4, 1.3, 5.0};
    const auto tr = evolve(h, ExcitationPattern(2, {1}), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK(tr.sz(static_cast<Eigen::Index>(k), 0) == doctest::Approx(std::cos(1.4 * times[k])));
        CHECK(tr.sz(static_cast<Eigen::Index>(k), 1) == doctest::Approx(-std::cos(1.4 * times[k])));
    }
    // |dd> <-> |uu> with detuning 4B: P(uu) = J^2/(J^2 + 4B^2) sin^2(sqrt(J^2 + 4B^2) t).
    const auto down = evolve(h, ExcitationPattern(2, {}), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const double om = std::sqrt(0.49 + 36.0);
        const double p = 0.49 / (om * om) * std::pow(std::sin(om * times[k]), 2);
        CHECK(down.sz(static_cast<Eigen::Index>(k), 0) == doctest::Approx(2.0 * p - 1.0));
    }
}

TEST_CASE("full Ising matrix matches the Kronecker construction") {
    const auto jm = random_couplings(4, 1);
    const auto h = build_full_ising(jm, 0.6);
    CHECK(h.dimension() == 16);
    const Eigen::MatrixXd ref = oracle::ising(jm.j_script, 0.6).real();
    CHECK((dense_matrix(h) - ref).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("flip-flop sector matches the full-space oracle") {
    const auto jm = random_couplings(6, 2);
    const double b = 1.7;
    const auto h = build_xy_sector(jm, b, 2);
    CHECK(h.dimension() == 15);
    const ExcitationPattern psi0(6, {2, 5});
    const std::vector<double> times{0.0, 0.8, 2.9};
    const auto tr = evolve(h, psi0, times);
    const oracle::Mat ref = oracle::xy(jm.j_script, b);
    for (std::size_t k = 0; k < times.size(); ++k) {
        const auto psi = oracle::evolve(ref, oracle::product_state({2, 5}, 6), times[k]);
        CHECK((tr.sz.row(static_cast<Eigen::Index>(k)).transpose() - oracle::sz(psi, 6)).cwiseAbs().maxCoeff() <
              1e-10);
    }
    CHECK(excitation_drift(tr) < 1e-10);
}

TEST_CASE("full Ising dynamics match the dense oracle") {
    const auto jm = random_couplings(5, 3);
    const double b = 0.9;
    const auto h = build_full_ising(jm, b);
    const ExcitationPattern psi0(5, {1, 4});
    const oracle::Mat ref = oracle::ising(jm.j_script, b);
    for (auto method : {Propagation::Dense, Propagation::Krylov}) {
        EvolveOptions opt;
        opt.method = method;
        const std::vector<double> times{0.0, 1.1, 7.5};
        const auto tr = evolve(h, psi0, times, opt);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto psi = oracle::evolve(ref, oracle::product_state({1, 4}, 5), times[k]);
            CHECK((tr.sz.row(static_cast<Eigen::Index>(k)).transpose() - oracle::sz(psi, 5)).cwiseAbs().maxCoeff() <
                  1e-9);
        }
    }
}

TEST_CASE("Krylov and dense propagation agree, conserving norm and energy") {
    const auto jm = power_law_couplings(10, 1.0, 0.7);
    const auto h = build_full_ising(jm, 6.0);
    const ExcitationPattern psi0(10, {3});
    std::vector<double> times;
    for (int k = 0; k <= 10; ++k) times.push_back(2.5 * k);
    EvolveOptions dense, krylov;
    dense.method = Propagation::Dense;
    krylov.method = Propagation::Krylov;
    const auto a = propagate_states(h, psi0, times, dense);
    const auto b = propagate_states(h, psi0, times, krylov);
    const double e0 = energy(h, initial_state(h, psi0));
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK((a[k] - b[k]).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(std::abs(a[k].norm() - 1.0) < 1e-10);
        CHECK(std::abs(b[k].norm() - 1.0) < 1e-10);
        CHECK(energy(h, a[k]) == doctest::Approx(e0).epsilon(1e-10));
        CHECK(energy(h, b[k]) == doctest::Approx(e0).epsilon(1e-10));
    }
}

TEST_CASE("mirror symmetry of inversion-symmetric couplings") {
    const auto jm = power_law_couplings(7, 1.0, 0.9);
    const auto h = build_full_ising(jm, 4.0);
    const std::vector<double> times{0.0, 3.0, 9.0};
    const ExcitationPattern p(7, {2, 3});
    const auto a = evolve(h, p, times);
    const auto b = evolve(h, p.mirror(), times);
    for (std::size_t k = 0; k < times.size(); ++k) {
        CHECK((a.sz.row(static_cast<Eigen::Index>(k)).reverse() - b.sz.row(static_cast<Eigen::Index>(k)))
                  .cwiseAbs()
                  .maxCoeff() < 1e-10);
        CHECK(a.c_series[k] == doctest::Approx(-b.c_series[k]).epsilon(1e-9));
    }
}

TEST_CASE("diagonal ensemble equals a brute-force long-time average") {
    auto brute = [](const oracle::Mat& h, const oracle::Vec& start, int n, double t_max) {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> u(0.0, t_max);
        Eigen::SelfAdjointEigenSolver<oracle::Mat> es(h);
        const oracle::Vec c = es.eigenvectors().adjoint() * start;
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(n);
        const int samples = 4000;
        for (int s = 0; s < samples; ++s) {
            const double t = u(rng);
            oracle::Vec phased = c;
            for (Eigen::Index k = 0; k < c.size(); ++k) phased(k) *= std::exp(oracle::cplx(0, -es.eigenvalues()(k) * t));
            acc += oracle::sz(es.eigenvectors() * phased, n);
        }
        return Eigen::VectorXd(acc / samples);
    };
    SUBCASE("generic spectrum") {
        const auto jm = random_couplings(5, 4);
        const auto h = build_full_ising(jm, 1.3);
        const auto de = diagonal_ensemble(h, ExcitationPattern(5, {2}));
        const auto ref = brute(oracle::ising(jm.j_script, 1.3), oracle::product_state({2}, 5), 5, 1e4);
        CHECK((de - ref).cwiseAbs().maxCoeff() < 0.02);
    }
    SUBCASE("degenerate spectrum at zero field") {
        const auto jm = power_law_couplings(4, 1.0, 1.0);
        const auto h = build_full_ising(jm, 0.0);
        const auto de = diagonal_ensemble(h, ExcitationPattern(4, {1}));
        const auto ref = brute(oracle::ising(jm.j_script, 0.0), oracle::product_state({1}, 4), 4, 1e4);
        CHECK((de - ref).cwiseAbs().maxCoeff() < 0.02);
    }
}

TEST_CASE("one diagonal ensemble serves patterns of both parities") {
    const auto jm = random_couplings(5, 11);
    const auto h = build_full_ising(jm, 1.3);
    const oracle::Mat hd = oracle::ising(jm.j_script, 1.3);
    Eigen::SelfAdjointEigenSolver<oracle::Mat> es(hd);
    DiagonalEnsemble de(h);
    for (const std::vector<int>& sites : {std::vector<int>{2}, {1, 3}, {}, {1, 2, 5}}) {
        const oracle::Vec c = es.eigenvectors().adjoint() * oracle::product_state(sites, 5);
        Eigen::VectorXd ref = Eigen::VectorXd::Zero(5);
        for (Eigen::Index k = 0; k < c.size(); ++k)
            ref += std::norm(c(k)) * oracle::sz(es.eigenvectors().col(k), 5);
        CHECK((de(ExcitationPattern(5, sites)) - ref).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("size and basis guards") {
    CHECK_THROWS_AS(build_full_ising(power_law_couplings(17, 1.0, 1.0), 1.0), SizeError);
    CHECK_NOTHROW(build_full_ising(power_law_couplings(4, 1.0, 1.0), 1.0, 4));
    const auto h = build_xy_sector(power_law_couplings(5, 1.0, 1.0), 1.0, 1);
    CHECK_THROWS_AS(initial_state(h, ExcitationPattern(5, {1, 2})), BasisError);
    CHECK(h.index_of(0b100).has_value());
    CHECK_FALSE(h.index_of(0b110).has_value());
}

TEST_CASE("full pair gaps carry probability weights") {
    const auto h = build_full_ising(power_law_couplings(5, 1.0, 1.0), 5.0);
    const auto gaps = full_pair_gap_spectrum(h, ExcitationPattern(5, {1}));
    REQUIRE_FALSE(gaps.empty());
    double total = 0.0;
    for (const auto& g : gaps) {
        CHECK(g.weight >= 0.0);
        CHECK(g.weight <= 1.0);
        CHECK(g.delta_e >= 0.0);
        total += g.weight;
    }
    CHECK(total <= 0.5 + 1e-12);
}

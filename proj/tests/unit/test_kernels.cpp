#include <doctest.h>

#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "prethermal/coupling.hpp"
#include "prethermal/exact.hpp"
#include "prethermal/kernels.hpp"
#include "prethermal/krylov.hpp"

using namespace prethermal;
using kernels::cplx;

namespace {

struct ThreadGuard {
    int saved = kernels::max_threads();
    explicit ThreadGuard(int n) { kernels::set_threads(n); }
    ~ThreadGuard() { kernels::set_threads(saved); }
};

}  // namespace

TEST_CASE("parallel kernels are bitwise identical to the serial reference") {
    const ThreadGuard guard(4);
    const auto jm = power_law_couplings(11, 1.3, 0.6);
    const auto par = kernels::full_ising_matrix(jm.j_script, 2.0);
    const auto ser = kernels::serial::full_ising_matrix(jm.j_script, 2.0);
    CHECK(par.row_ptr == ser.row_ptr);
    CHECK(par.col == ser.col);
    CHECK(par.val == ser.val);

    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    std::vector<cplx> x(par.rows), y1(par.rows), y2(par.rows);
    for (auto& v : x) v = {g(rng), g(rng)};
    kernels::matvec(par, x, y1);
    kernels::serial::matvec(ser, x, y2);
    CHECK(y1 == y2);

    std::vector<std::uint64_t> basis(par.rows);
    std::vector<double> prob(par.rows);
    for (std::size_t s = 0; s < basis.size(); ++s) {
        basis[s] = s;
        prob[s] = std::norm(x[s]);
    }
    CHECK(kernels::site_magnetization(basis, prob, 11) == kernels::serial::site_magnetization(basis, prob, 11));
}

TEST_CASE("results do not depend on the thread count") {
    const auto jm = power_law_couplings(9, 1.0, 0.8);
    const auto h = build_full_ising(jm, 5.0);
    const std::vector<double> times{0.0, 1.0, 4.0};
    QuenchTrace one, many;
    {
        const ThreadGuard guard(1);
        one = evolve(h, ExcitationPattern(9, {2}), times);
    }
    {
        const ThreadGuard guard(4);
        many = evolve(h, ExcitationPattern(9, {2}), times);
    }
    CHECK(one.sz == many.sz);
}

TEST_CASE("Krylov propagation against the Pade exponential") {
    const auto jm = power_law_couplings(8, 1.0, 1.2);
    const auto h = build_full_ising(jm, 3.0);
    const Eigen::MatrixXd dense = dense_matrix(h);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(256);
    psi(5) = 1.0;
    const double dt = 3.7;
    const Eigen::VectorXcd ref = (cplx(0.0, -dt) * dense.cast<cplx>()).exp() * psi;
    krylov_propagate(h.matrix, psi, dt);
    CHECK((psi - ref).cwiseAbs().maxCoeff() < 1e-9);

    KrylovOptions tiny;
    tiny.subspace_dim = 10;
    psi.setZero();
    psi(5) = 1.0;
    krylov_propagate(h.matrix, psi, dt, tiny);
    CHECK((psi - ref).cwiseAbs().maxCoeff() < 1e-8);
}

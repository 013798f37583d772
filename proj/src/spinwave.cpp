#include "prethermal/spinwave.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "prethermal/errors.hpp"

namespace prethermal {

using cplx = std::complex<double>;

SpinWaveSystem build_spinwave(const CouplingMatrix& jm, double b) {
    if (!(b > 0.0)) throw InvalidArgument("spin-wave: B must be > 0");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jm.j_script);
    if (es.info() != Eigen::Success) throw SolverError("spin-wave: eigensolver failed");
    SpinWaveSystem s;
    s.b_field = b;
    s.nus = es.eigenvalues();
    s.v = es.eigenvectors();
    const int n = s.size();
    s.thetas.resize(n);
    s.epsilons.resize(n);
    for (int k = 0; k < n; ++k) {
        const double nu = s.nus(k);
        if (!(b + nu > 0.0))
            throw StabilityError("spin-wave: B + nu_" + std::to_string(k) + " <= 0, Bogoliubov transformation breaks down");
        s.thetas(k) = nu == 0.0 ? 0.0 : 0.5 * std::atanh(nu / (nu + 2.0 * b));
        s.epsilons(k) = 2.0 * std::sqrt(b * (b + nu));
    }
    return s;
}

Eigen::VectorXd gge_occupations(const SpinWaveSystem& sys, const ExcitationPattern& psi0) {
    if (psi0.n_ions() != sys.size()) throw InvalidArgument("gge: pattern size differs from the chain");
    const Eigen::VectorXd n = psi0.occupations();
    Eigen::VectorXd occ(sys.size());
    for (int k = 0; k < sys.size(); ++k) {
        const double th = sys.thetas(k);
        const double sh = std::sinh(th);
        occ(k) = std::cosh(2.0 * th) * sys.v.col(k).cwiseAbs2().dot(n) + sh * sh;
    }
    return occ;
}

Eigen::VectorXd gge_lambdas(const Eigen::VectorXd& occupations) {
    Eigen::VectorXd lam(occupations.size());
    for (Eigen::Index k = 0; k < occupations.size(); ++k) {
        const double o = occupations(k);
        if (o < 0.0 || !std::isfinite(o)) throw InvalidArgument("gge: occupations must be finite and >= 0");
        lam(k) = o == 0.0 ? std::numeric_limits<double>::infinity() : std::log1p(1.0 / o);
    }
    return lam;
}

Eigen::VectorXd bose_occupations(const Eigen::VectorXd& lambdas) {
    Eigen::VectorXd occ(lambdas.size());
    for (Eigen::Index k = 0; k < lambdas.size(); ++k)
        occ(k) = std::isinf(lambdas(k)) ? 0.0 : 1.0 / std::expm1(lambdas(k));
    return occ;
}

Eigen::VectorXd gge_magnetization(const SpinWaveSystem& sys, const Eigen::VectorXd& occupations) {
    const int n = sys.size();
    if (occupations.size() != n) throw InvalidArgument("gge: occupation count differs from the chain");
    Eigen::VectorXd mode_density(n);
    for (int k = 0; k < n; ++k) {
        const double sh = std::sinh(sys.thetas(k));
        mode_density(k) = std::cosh(2.0 * sys.thetas(k)) * occupations(k) + sh * sh;
    }
    const Eigen::VectorXd a_dag_a = sys.v.cwiseAbs2() * mode_density;
    return 2.0 * a_dag_a.array() - 1.0;
}

GgeState gge_state(const SpinWaveSystem& sys, const ExcitationPattern& psi0) {
    GgeState g;
    g.d_occupations = gge_occupations(sys, psi0);
    g.lambdas = gge_lambdas(g.d_occupations);
    g.sz_gge = gge_magnetization(sys, g.d_occupations);
    return g;
}

HeisenbergPropagator propagator(const SpinWaveSystem& sys, double t) {
    if (t < 0.0) throw InvalidArgument("propagator: t must be >= 0");
    const int n = sys.size();
    Eigen::VectorXcd du(n), dw(n);
    for (int k = 0; k < n; ++k) {
        const double ch = std::cosh(sys.thetas(k)), sh = std::sinh(sys.thetas(k));
        const cplx em = std::exp(cplx(0.0, -sys.epsilons(k) * t));
        const cplx ep = std::conj(em);
        // d_k(t) = d_k e^{-i eps t} with c_k = cosh d_k - sinh d_k^dag
        du(k) = ch * ch * em - sh * sh * ep;
        dw(k) = ch * sh * (em - ep);
    }
    const Eigen::MatrixXcd v = sys.v.cast<cplx>();
    HeisenbergPropagator p;
    p.time = t;
    p.u = v * du.asDiagonal() * v.transpose();
    p.w = v * dw.asDiagonal() * v.transpose();
    return p;
}

double symplectic_defect(const HeisenbergPropagator& p) {
    const auto n = p.u.rows();
    const Eigen::MatrixXcd d = p.u * p.u.adjoint() - p.w * p.w.adjoint() - Eigen::MatrixXcd::Identity(n, n);
    return d.cwiseAbs().maxCoeff();
}

QuenchTrace evolve_spinwave(const SpinWaveSystem& sys, const ExcitationPattern& psi0,
                            std::span<const double> times) {
    if (psi0.n_ions() != sys.size()) throw InvalidArgument("spin-wave: pattern size differs from the chain");
    const int n = sys.size();
    const Eigen::VectorXd occ = psi0.occupations();
    const Eigen::VectorXd occ_plus = occ.array() + 1.0;
    Eigen::MatrixXd sz(times.size(), n);
    const auto count = static_cast<std::int64_t>(times.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < count; ++t) {
        const HeisenbergPropagator p = propagator(sys, times[t]);
        const Eigen::VectorXd density = p.u.cwiseAbs2() * occ + p.w.cwiseAbs2() * occ_plus;
        sz.row(t) = (2.0 * density.array() - 1.0).transpose();
    }
    return QuenchTrace::from_sz("spinwave", std::vector<double>(times.begin(), times.end()), std::move(sz));
}

std::vector<PairGap> pair_gap_spectrum(const SpinWaveSystem& sys, const ExcitationPattern& psi0) {
    if (psi0.count() != 1)
        throw InvalidArgument("pair gaps are defined for single-excitation patterns only (got " +
                              std::to_string(psi0.count()) + " excitations)");
    const int site = psi0.flipped().front() - 1;
    const int n = sys.size();
    std::vector<PairGap> gaps;
    gaps.reserve(n * (n - 1) / 2);
    for (int m = 0; m < n; ++m)
        for (int k = m + 1; k < n; ++k) {
            const double pm = sys.v(site, m) * sys.v(site, m);
            const double pk = sys.v(site, k) * sys.v(site, k);
            gaps.push_back({std::abs(sys.nus(m) - sys.nus(k)), pm * pk, m, k});
        }
    return gaps;
}

double min_weighted_gap(const std::vector<PairGap>& gaps, double min_weight) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : gaps)
        if (g.weight > min_weight) best = std::min(best, g.delta_e);
    return best;
}

}  // namespace prethermal

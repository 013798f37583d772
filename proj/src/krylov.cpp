#include "prethermal/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "prethermal/errors.hpp"

namespace prethermal {

namespace {

using cplx = std::complex<double>;

struct LanczosBasis {
    std::vector<Eigen::VectorXcd> q;
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[k] couples q[k] and q[k+1]
    double norm = 0.0;
    bool invariant = false;    // happy breakdown: the subspace is exact
};

LanczosBasis lanczos(const kernels::CsrMatrix& h, const Eigen::VectorXcd& psi, int m) {
    LanczosBasis lb;
    lb.norm = psi.norm();
    lb.q.push_back(psi / lb.norm);
    Eigen::VectorXcd w(psi.size());
    for (int k = 0; k < m; ++k) {
        const auto& qk = lb.q.back();
        kernels::matvec(h, {qk.data(), static_cast<std::size_t>(qk.size())},
                        {w.data(), static_cast<std::size_t>(w.size())});
        lb.alpha.push_back(qk.dot(w).real());
        // full reorthogonalisation, twice
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& qj : lb.q) w -= qj * qj.dot(w);
        const double b = w.norm();
        if (b < 1e-13 * std::max(1.0, std::abs(lb.alpha.back()))) {
            lb.invariant = true;
            break;
        }
        lb.beta.push_back(b);
        if (k + 1 < m) lb.q.push_back(w / b);
    }
    return lb;
}

}  // namespace

void krylov_propagate(const kernels::CsrMatrix& h, Eigen::VectorXcd& psi, double dt,
                      const KrylovOptions& options) {
    if (dt == 0.0 || psi.size() == 0) return;
    const int m = std::min<int>(options.subspace_dim, static_cast<int>(psi.size()));
    double remaining = dt;
    double step = dt;
    int substeps = 0;
    while (remaining > 0.0) {
        if (++substeps > options.max_substeps) throw SolverError("krylov propagation: too many substeps");
        step = std::min(step, remaining);
        const LanczosBasis lb = lanczos(h, psi, m);
        const int k = static_cast<int>(lb.alpha.size());
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) {
            t(i, i) = lb.alpha[i];
            if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = lb.beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const Eigen::VectorXd& e = es.eigenvalues();
        const Eigen::MatrixXd& s = es.eigenvectors();

        for (;;) {
            // c = exp(-i T step) e_1
            Eigen::VectorXcd phase(k);
            for (int i = 0; i < k; ++i) phase(i) = std::exp(cplx(0.0, -e(i) * step)) * s(0, i);
            Eigen::VectorXcd c = s.cast<cplx>() * phase;
            double err = 0.0;
            if (!lb.invariant && static_cast<int>(lb.beta.size()) >= k)
                err = lb.beta[k - 1] * std::abs(c(k - 1));
            if (err <= options.tolerance || step < 1e-300) {
                Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());
                for (int i = 0; i < k; ++i) next += lb.q[i] * c(i);
                psi = next * lb.norm;
                remaining -= step;
                if (err < 0.1 * options.tolerance) step *= 1.5;
                break;
            }
            step *= 0.5;
        }
    }
}

}  // namespace prethermal

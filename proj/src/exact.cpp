#include "prethermal/exact.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "prethermal/errors.hpp"

namespace prethermal {

using cplx = std::complex<double>;

namespace {

std::span<const cplx> view(const Eigen::VectorXcd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }
std::span<cplx> view(Eigen::VectorXcd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

std::vector<std::uint64_t> k_subsets(int n, int k) {
    std::vector<std::uint64_t> out;
    if (k == 0) return {0};
    std::uint64_t s = (std::uint64_t{1} << k) - 1;
    const std::uint64_t limit = std::uint64_t{1} << n;
    while (s < limit) {
        out.push_back(s);
        // Gosper's hack: next integer with the same popcount
        const std::uint64_t c = s & (~s + 1);
        const std::uint64_t r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    return out;
}

struct Eigensystem {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;
};

Eigensystem diagonalize(const HamiltonianRep& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(h));
    if (es.info() != Eigen::Success) throw SolverError("hamiltonian eigensolver failed");
    return {es.eigenvalues(), es.eigenvectors()};
}

void check_pattern(const HamiltonianRep& h, const ExcitationPattern& psi0) {
    if (psi0.n_ions() != h.n_sites)
        throw BasisError("pattern has " + std::to_string(psi0.n_ions()) + " sites, Hamiltonian has " +
                         std::to_string(h.n_sites));
    if (h.kind == SectorKind::XySector && psi0.count() != h.excitations)
        throw BasisError("pattern has " + std::to_string(psi0.count()) + " excitations, sector holds " +
                         std::to_string(h.excitations));
}

}  // namespace

std::optional<std::size_t> HamiltonianRep::index_of(std::uint64_t mask) const {
    if (kind == SectorKind::FullIsing) {
        if (mask < basis.size()) return static_cast<std::size_t>(mask);
        return std::nullopt;
    }
    auto it = std::lower_bound(basis.begin(), basis.end(), mask);
    if (it == basis.end() || *it != mask) return std::nullopt;
    return static_cast<std::size_t>(it - basis.begin());
}

HamiltonianRep build_full_ising(const CouplingMatrix& jm, double b, int cap) {
    const int n = jm.size();
    if (n > cap || n > 30)
        throw SizeError("full Ising space for N=" + std::to_string(n) + " exceeds the cap of " +
                        std::to_string(std::min(cap, 30)) + " spins; use the XY sector or spin-wave model");
    HamiltonianRep h;
    h.kind = SectorKind::FullIsing;
    h.n_sites = n;
    h.matrix = kernels::full_ising_matrix(jm.j_script, b);
    h.basis.resize(std::size_t{1} << n);
    for (std::size_t s = 0; s < h.basis.size(); ++s) h.basis[s] = s;
    return h;
}

HamiltonianRep build_xy_sector(const CouplingMatrix& jm, double b, int k) {
    const int n = jm.size();
    if (k < 0 || k > n) throw InvalidArgument("XY sector: k must be in [0, " + std::to_string(n) + "]");
    if (n > 63) throw SizeError("XY sector: at most 63 sites");
    HamiltonianRep h;
    h.kind = SectorKind::XySector;
    h.n_sites = n;
    h.excitations = k;
    h.basis = k_subsets(n, k);
    const double diag = b * static_cast<double>(2 * k - n);
    auto& a = h.matrix;
    a.rows = h.basis.size();
    a.row_ptr.assign(1, 0);
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t r = 0; r < h.basis.size(); ++r) {
        const std::uint64_t s = h.basis[r];
        row.clear();
        row.emplace_back(static_cast<std::uint32_t>(r), diag);
        for (int j = 0; j < n; ++j) {
            if (!(s >> j & 1u)) continue;
            for (int i = 0; i < n; ++i) {
                if (s >> i & 1u) continue;
                const double v = jm.j_script(i, j);
                if (v == 0.0) continue;
                const std::uint64_t t = s ^ (std::uint64_t{1} << i) ^ (std::uint64_t{1} << j);
                row.emplace_back(static_cast<std::uint32_t>(*h.index_of(t)), v);
            }
        }
        std::sort(row.begin(), row.end());
        for (const auto& [c, v] : row) {
            a.col.push_back(c);
            a.val.push_back(v);
        }
        a.row_ptr.push_back(a.col.size());
    }
    return h;
}

Eigen::MatrixXd dense_matrix(const HamiltonianRep& h) {
    const auto d = static_cast<Eigen::Index>(h.dimension());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t r = 0; r < h.matrix.rows; ++r)
        for (std::size_t k = h.matrix.row_ptr[r]; k < h.matrix.row_ptr[r + 1]; ++k)
            m(static_cast<Eigen::Index>(r), h.matrix.col[k]) += h.matrix.val[k];
    return m;
}

Eigen::VectorXcd initial_state(const HamiltonianRep& h, const ExcitationPattern& psi0) {
    check_pattern(h, psi0);
    const auto idx = h.index_of(psi0.bitmask());
    if (!idx) throw BasisError("pattern " + psi0.label() + " is not in the Hamiltonian basis");
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.dimension()));
    psi(static_cast<Eigen::Index>(*idx)) = 1.0;
    return psi;
}

std::vector<Eigen::VectorXcd> propagate_states(const HamiltonianRep& h, const ExcitationPattern& psi0,
                                               std::span<const double> times, const EvolveOptions& options) {
    const Eigen::VectorXcd start = initial_state(h, psi0);
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] < 0.0 || (k > 0 && times[k] < times[k - 1]))
            throw InvalidArgument("evolve: times must be nonnegative and nondecreasing");

    const bool dense = options.method == Propagation::Dense ||
                       (options.method == Propagation::Auto && h.dimension() <= options.dense_limit);
    std::vector<Eigen::VectorXcd> states(times.size());
    if (dense) {
        const Eigensystem es = diagonalize(h);
        const Eigen::VectorXcd coeff = es.vectors.transpose().cast<cplx>() * start;
        const auto count = static_cast<std::int64_t>(times.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t k = 0; k < count; ++k) {
            Eigen::VectorXcd phased(coeff.size());
            for (Eigen::Index n = 0; n < coeff.size(); ++n)
                phased(n) = std::exp(cplx(0.0, -es.values(n) * times[k])) * coeff(n);
            states[k] = es.vectors.cast<cplx>() * phased;
        }
    } else {
        Eigen::VectorXcd psi = start;
        double now = 0.0;
        for (std::size_t k = 0; k < times.size(); ++k) {
            krylov_propagate(h.matrix, psi, times[k] - now, options.krylov);
            now = times[k];
            states[k] = psi;
        }
    }
    return states;
}

Eigen::VectorXd magnetization(const HamiltonianRep& h, const Eigen::VectorXcd& psi) {
    const Eigen::VectorXd prob = psi.cwiseAbs2();
    const auto sz = kernels::site_magnetization(h.basis, {prob.data(), static_cast<std::size_t>(prob.size())},
                                                h.n_sites);
    return Eigen::Map<const Eigen::VectorXd>(sz.data(), static_cast<Eigen::Index>(sz.size()));
}

double energy(const HamiltonianRep& h, const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd hpsi(psi.size());
    kernels::matvec(h.matrix, view(psi), view(hpsi));
    return psi.dot(hpsi).real();
}

QuenchTrace evolve(const HamiltonianRep& h, const ExcitationPattern& psi0, std::span<const double> times,
                   const EvolveOptions& options) {
    const auto states = propagate_states(h, psi0, times, options);
    Eigen::MatrixXd sz(static_cast<Eigen::Index>(times.size()), h.n_sites);
    for (std::size_t k = 0; k < states.size(); ++k)
        sz.row(static_cast<Eigen::Index>(k)) = magnetization(h, states[k]).transpose();
    return QuenchTrace::from_sz(h.kind == SectorKind::FullIsing ? "exact" : "xy",
                                std::vector<double>(times.begin(), times.end()), std::move(sz));
}

DiagonalEnsemble::DiagonalEnsemble(const HamiltonianRep& h, double degeneracy_tol) : h_(h), tol_(degeneracy_tol) {
    if (h.dimension() > 4096)
        throw SizeError("diagonal ensemble needs a full eigendecomposition; dimension " +
                        std::to_string(h.dimension()) + " exceeds 4096");
}

// The Ising coupling flips spins in pairs, so excitation parity is conserved.
const DiagonalEnsemble::Sector& DiagonalEnsemble::sector(int parity) {
    auto& slot = sectors_[parity];
    if (slot) return *slot;
    Sector s;
    s.local.assign(h_.dimension(), -1);
    for (std::size_t r = 0; r < h_.dimension(); ++r)
        if (std::popcount(h_.basis[r]) % 2 == parity) {
            s.local[r] = static_cast<Eigen::Index>(s.basis.size());
            s.basis.push_back(h_.basis[r]);
        }
    const auto d = static_cast<Eigen::Index>(s.basis.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d, d);
    for (std::size_t r = 0; r < h_.matrix.rows; ++r) {
        if (s.local[r] < 0) continue;
        for (std::size_t k = h_.matrix.row_ptr[r]; k < h_.matrix.row_ptr[r + 1]; ++k)
            m(s.local[r], s.local[h_.matrix.col[k]]) += h_.matrix.val[k];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw SolverError("hamiltonian eigensolver failed");
    s.values = es.eigenvalues();
    s.vectors = es.eigenvectors();
    slot = std::move(s);
    return *slot;
}

Eigen::VectorXd DiagonalEnsemble::operator()(const ExcitationPattern& psi0) {
    check_pattern(h_, psi0);
    const auto start = h_.index_of(psi0.bitmask());
    if (!start) throw BasisError("pattern " + psi0.label() + " is not in the Hamiltonian basis");
    const Sector& s = sector(psi0.count() % 2);
    const Eigen::VectorXd overlap = s.vectors.row(s.local[*start]).transpose();
    const double scale = std::max(1.0, s.values.cwiseAbs().maxCoeff());
    const auto d = s.values.size();
    Eigen::VectorXd prob = Eigen::VectorXd::Zero(d);
    Eigen::Index first = 0;
    while (first < d) {
        Eigen::Index last = first + 1;
        while (last < d && s.values(last) - s.values(last - 1) <= tol_ * scale) ++last;
        const auto block = s.vectors.middleCols(first, last - first);
        const Eigen::VectorXd projected = block * overlap.segment(first, last - first);
        prob += projected.cwiseAbs2();
        first = last;
    }
    const auto sz = kernels::site_magnetization(s.basis, {prob.data(), static_cast<std::size_t>(prob.size())},
                                                h_.n_sites);
    return Eigen::Map<const Eigen::VectorXd>(sz.data(), static_cast<Eigen::Index>(sz.size()));
}

Eigen::VectorXd diagonal_ensemble(const HamiltonianRep& h, const ExcitationPattern& psi0, double degeneracy_tol) {
    return DiagonalEnsemble(h, degeneracy_tol)(psi0);
}

double excitation_drift(const QuenchTrace& trace) {
    if (trace.n_excitations.empty()) throw InvalidArgument("excitation drift: empty trace");
    double drift = 0.0;
    for (double n : trace.n_excitations) drift = std::max(drift, std::abs(n - trace.n_excitations.front()));
    return drift;
}

std::vector<PairGap> full_pair_gap_spectrum(const HamiltonianRep& h, const ExcitationPattern& psi0) {
    if (h.dimension() > 4096) throw SizeError("full pair-gap spectrum: dimension exceeds 4096");
    const Eigen::VectorXcd start = initial_state(h, psi0);
    const Eigensystem es = diagonalize(h);
    const Eigen::VectorXd p = (es.vectors.transpose() * start.real()).cwiseAbs2();
    std::vector<int> support;
    for (Eigen::Index n = 0; n < p.size(); ++n)
        if (p(n) > 1e-14) support.push_back(static_cast<int>(n));
    std::vector<PairGap> gaps;
    for (std::size_t a = 0; a < support.size(); ++a)
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            const int m = support[a], n = support[b];
            gaps.push_back({std::abs(es.values(m) - es.values(n)), p(m) * p(n), m, n});
        }
    return gaps;
}

}  // namespace prethermal

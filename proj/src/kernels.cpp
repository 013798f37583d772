#include "prethermal/kernels.hpp"

#include <bit>
#include <cassert>

#include <omp.h>

namespace prethermal::kernels {

namespace {

struct PairTerm {
    std::uint64_t mask;
    double value;
};

std::vector<PairTerm> pair_terms(const Eigen::MatrixXd& j_script) {
    std::vector<PairTerm> terms;
    const auto n = j_script.rows();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            if (j_script(i, j) != 0.0)
                terms.push_back({(std::uint64_t{1} << i) | (std::uint64_t{1} << j), j_script(i, j)});
    return terms;
}

CsrMatrix ising_skeleton(int n_sites, std::size_t per_row) {
    CsrMatrix a;
    a.rows = std::size_t{1} << n_sites;
    a.row_ptr.resize(a.rows + 1);
    for (std::size_t r = 0; r <= a.rows; ++r) a.row_ptr[r] = r * per_row;
    a.col.resize(a.rows * per_row);
    a.val.resize(a.rows * per_row);
    return a;
}

inline void fill_ising_row(CsrMatrix& a, std::size_t row, const std::vector<PairTerm>& terms,
                           int n_sites, double b) {
    std::size_t k = a.row_ptr[row];
    const int ups = std::popcount(static_cast<std::uint64_t>(row));
    a.col[k] = static_cast<std::uint32_t>(row);
    a.val[k] = b * static_cast<double>(2 * ups - n_sites);
    ++k;
    for (const auto& t : terms) {
        a.col[k] = static_cast<std::uint32_t>(row ^ t.mask);
        a.val[k] = t.value;
        ++k;
    }
}

}  // namespace

void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
    assert(x.size() == a.rows && y.size() == a.rows);
    const auto rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
        y[r] = acc;
    }
}

std::vector<double> site_magnetization(std::span<const std::uint64_t> basis,
                                       std::span<const double> probabilities, int n_sites) {
    std::vector<double> sz(n_sites, 0.0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_sites; ++i) {
        const std::uint64_t bit = std::uint64_t{1} << i;
        double acc = 0.0;
        for (std::size_t s = 0; s < basis.size(); ++s)
            acc += (basis[s] & bit) ? probabilities[s] : -probabilities[s];
        sz[i] = acc;
    }
    return sz;
}

CsrMatrix full_ising_matrix(const Eigen::MatrixXd& j_script, double b) {
    const int n = static_cast<int>(j_script.rows());
    const auto terms = pair_terms(j_script);
    CsrMatrix a = ising_skeleton(n, terms.size() + 1);
    const auto rows = static_cast<std::int64_t>(a.rows);
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < rows; ++r) fill_ising_row(a, static_cast<std::size_t>(r), terms, n, b);
    return a;
}

namespace serial {

void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y) {
    for (std::size_t r = 0; r < a.rows; ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) acc += a.val[k] * x[a.col[k]];
        y[r] = acc;
    }
}

std::vector<double> site_magnetization(std::span<const std::uint64_t> basis,
                                       std::span<const double> probabilities, int n_sites) {
    std::vector<double> sz(n_sites, 0.0);
    for (std::size_t s = 0; s < basis.size(); ++s)
        for (int i = 0; i < n_sites; ++i)
            sz[i] += (basis[s] & (std::uint64_t{1} << i)) ? probabilities[s] : -probabilities[s];
    return sz;
}

CsrMatrix full_ising_matrix(const Eigen::MatrixXd& j_script, double b) {
    const int n = static_cast<int>(j_script.rows());
    const auto terms = pair_terms(j_script);
    CsrMatrix a = ising_skeleton(n, terms.size() + 1);
    for (std::size_t r = 0; r < a.rows; ++r) fill_ising_row(a, r, terms, n, b);
    return a;
}

}  // namespace serial

int max_threads() { return omp_get_max_threads(); }

void set_threads(int n) {
    if (n > 0) omp_set_num_threads(n);
}

}  // namespace prethermal::kernels

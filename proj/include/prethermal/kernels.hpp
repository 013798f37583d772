#pragma once

// Data-parallel inner loops. Every kernel in namespace `kernels` is an OpenMP
// version of the loop with the same name in `kernels::serial`; the serial
// versions are the reference implementation used by the tests and benchmarks.
// Each output element is accumulated in the same order in both versions, so
// the results are bitwise identical regardless of thread count.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace prethermal::kernels {

using cplx = std::complex<double>;

/// Compressed sparse row matrix with real entries.
struct CsrMatrix {
    std::size_t rows = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::uint32_t> col;
    std::vector<double> val;

    std::size_t nnz() const { return val.size(); }
};

void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y);

// <sigma^z_i> for every site from basis-state probabilities. Bit i of a basis
// label is site i+1, set bit = spin up.
std::vector<double> site_magnetization(std::span<const std::uint64_t> basis,
                                       std::span<const double> probabilities, int n_sites);

// H = sum_{i<j} J_ij sx_i sx_j + B sum_i sz_i in the full 2^N z-basis.
CsrMatrix full_ising_matrix(const Eigen::MatrixXd& j_script, double b);

namespace serial {

void matvec(const CsrMatrix& a, std::span<const cplx> x, std::span<cplx> y);
std::vector<double> site_magnetization(std::span<const std::uint64_t> basis,
                                       std::span<const double> probabilities, int n_sites);
CsrMatrix full_ising_matrix(const Eigen::MatrixXd& j_script, double b);

}  // namespace serial

int max_threads();
void set_threads(int n);

}  // namespace prethermal::kernels

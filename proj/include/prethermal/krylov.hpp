#pragma once

#include <Eigen/Core>

#include "prethermal/kernels.hpp"

namespace prethermal {

struct KrylovOptions {
    int subspace_dim = 40;
    double tolerance = 1e-12;  // per-step local error estimate
    int max_substeps = 1 << 20;
};

/// psi <- exp(-i H dt) psi for real symmetric H, adaptive Lanczos substeps.
void krylov_propagate(const kernels::CsrMatrix& h, Eigen::VectorXcd& psi, double dt,
                      const KrylovOptions& options = {});

}  // namespace prethermal

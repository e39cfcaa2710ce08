// krylov.hpp: short-iterative Lanczos propagator exp(-i H dt / hbar) psi

#pragma once

#include <Eigen/Dense>

#include "qgs/hamiltonian.hpp"

namespace qgs {

struct KrylovOptions {
    int max_dim = 30;       // subspace cap; the dimension actually used adapts to tol
    double tol = 1e-10;     // a-posteriori error bound relative to ||psi||
    int max_halvings = 12;  // dt is split in two when max_dim does not reach tol
};

struct KrylovStats {
    long matvecs = 0;
    int max_subspace = 0;
    long substeps = 0;
    double max_error_estimate = 0.0;
    long happy_breakdowns = 0;

    void merge(const KrylovStats& other);
};

// Returns exp(-i H dt / hbar) psi (dt in fs, H in eV). Happy breakdown is an
// exact invariant subspace and ends the iteration early. Throws NoConvergence
// when even dt / 2^max_halvings misses tol, KrylovBreakdown on non-finite data.
Eigen::VectorXcd krylov_step(const LinearOperator& h, const Eigen::VectorXcd& psi, double dt_fs,
                             const KrylovOptions& options = {}, KrylovStats* stats = nullptr);

} // namespace qgs

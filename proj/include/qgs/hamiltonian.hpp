// hamiltonian.hpp: matrix-free vibronic Hamiltonian and Condon dipole operators
//
// H = sum_{m,a} eps_a |m,a><m,a| + sum_{m,a} J_a (|m,a><m+1,a| + h.c.)
//   + sum_{k,m} w_k (n_{k,m} + 1/2)
//   + sum_{m,a,k} g^k_{aa} Q_{k,m} |m,a><m,a|
//   + sum_{m,k} g^k_{12} Q_{k,m} (|m,S1><m,S2| + h.c.)
// with Q = (b + b^dag)/sqrt(2). All matrix elements are real.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qgs/basis.hpp"

namespace qgs {

using cplx = std::complex<double>;

// Hermitian operator acting on flat state vectors.
class LinearOperator {
public:
    virtual ~LinearOperator() = default;
    virtual std::size_t dimension() const = 0;
    // y <- A x (y is resized)
    virtual void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const = 0;
};

// Wraps a dense Hermitian matrix; used by tests and the small-system oracles.
class DenseOperator final : public LinearOperator {
public:
    explicit DenseOperator(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {}
    std::size_t dimension() const override { return static_cast<std::size_t>(matrix_.rows()); }
    void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override { y.noalias() = matrix_ * x; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

private:
    Eigen::MatrixXcd matrix_;
};

class HamiltonianAction final : public LinearOperator {
public:
    HamiltonianAction(const VibronicModel& model, const ProductBasis& basis);

    std::size_t dimension() const override { return basis_.dimension(); }
    void apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const override;

    // <x|H|x>
    double expectation(const Eigen::VectorXcd& x) const;
    // Dense real symmetric matrix; throws DimensionOverBudget above max_dim.
    Eigen::MatrixXd dense(std::size_t max_dim = 4000) const;

    const VibronicModel& model() const { return model_; }
    const ProductBasis& basis() const { return basis_; }
    // Energy of the ground-surface eigenstate |G, nu>: E0 + zero point + sum nu_k w_k
    double ground_surface_energy(std::span<const int> occupations) const;

private:
    // y_dst += coef * Q_instance x_src within one electronic block
    void accumulate_position(const cplx* x_src, cplx* y_dst, double coef, int instance) const;

    VibronicModel model_;
    ProductBasis basis_;
    std::vector<double> harmonic_;        // sum_j w_j (n_j + 1/2) per vibrational index
    std::vector<double> ladder_;          // sqrt(n/2), n = 0..max cutoff+1
};

// Applies Q_instance (dimensionless position) to every electronic block of x.
Eigen::VectorXcd apply_position(const ProductBasis& basis, const Eigen::VectorXcd& x, int instance);

// Condon dipole: V^dag = sum_{m,a} mu_a |m,a><G| (x) 1_vib, V its adjoint.
class DipoleOperator {
public:
    DipoleOperator(const VibronicModel& model, const ProductBasis& basis);

    Eigen::VectorXcd raise(const Eigen::VectorXcd& x) const; // V^dag x
    Eigen::VectorXcd lower(const Eigen::VectorXcd& x) const; // V x
    // <G, vib| V |psi> = sum_{m,a} mu_a psi[(m,a), vib]
    cplx emission_overlap(const Eigen::VectorXcd& psi, std::size_t vib) const;
    double total_strength() const; // sum_m sum_a mu_a^2
    Eigen::MatrixXd dense_raise() const;

private:
    std::array<double, kExcitedStates> dipoles_;
    ProductBasis basis_;
};

} // namespace qgs

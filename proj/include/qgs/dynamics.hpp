// dynamics.hpp: wave-packet propagation and electronic / vibrational observables

#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgs/hamiltonian.hpp"
#include "qgs/krylov.hpp"

namespace qgs {

struct StateVector {
    Eigen::VectorXcd amplitudes;
    double time_fs = 0.0;

    double norm() const { return amplitudes.norm(); }
};

// V^dag |G, 0...0>; not normalised. Appends "ZeroInitialState" to warnings
// when every transition dipole vanishes.
StateVector initial_excited_state(const VibronicModel& model, const ProductBasis& basis,
                                  std::vector<std::string>* warnings = nullptr);

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    std::size_t steps = 0;

    std::size_t samples() const { return steps + 1; }
    double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double end() const { return time(steps); }
    // Number of steps is round(duration / dt).
    static TimeGrid from_duration(double duration_fs, double dt_fs);
};

// rho_{ab} = sum_m sum_vib psi[(m,a),vib] conj(psi[(m,b),vib]); index 0 = S1, 1 = S2.
struct ElectronicRDM {
    Eigen::Matrix2cd aggregate = Eigen::Matrix2cd::Zero();
    std::vector<Eigen::Matrix2cd> per_monomer;
};

ElectronicRDM electronic_rdm(const ProductBasis& basis, const Eigen::VectorXcd& psi);

// <psi|Q_j|psi> / <psi|psi> before discarding the (round-off) imaginary part.
cplx mode_position_raw(const ProductBasis& basis, const Eigen::VectorXcd& psi, int instance);
// Throws ZeroNormState for the zero vector.
double mode_position_expectation(const ProductBasis& basis, const Eigen::VectorXcd& psi, int instance);

struct RecorderSelection {
    bool rdm = true;
    bool mode_positions = true;
    bool norm_energy = true;
    // Emission overlaps <G, vib| V |psi(t)> for each listed vibrational index.
    std::vector<std::size_t> overlap_vib_indices;
};

struct Trajectory {
    TimeGrid grid;
    std::vector<ElectronicRDM> rdm;       // per sample
    Eigen::MatrixXd mode_positions;       // samples x mode instances
    std::vector<double> norm;             // ||psi(t)||
    std::vector<double> energy;           // <H> / <psi|psi>
    Eigen::MatrixXcd overlaps;            // channels x samples
    double max_norm_drift = 0.0;          // relative
    double max_energy_drift = 0.0;        // relative
    KrylovStats krylov;

    // Mean of <Q> over the copies of mode k on every monomer.
    double mode_mean(std::size_t sample, int mode, int modes_per_monomer) const;
};

struct PropagationOptions {
    KrylovOptions krylov;
    double conservation_tol = 1e-8;
    bool enforce_conservation = true;
    std::function<void(std::size_t step, std::size_t steps)> progress;
};

// Throws ConservationViolation when norm or energy drift exceeds the tolerance.
Trajectory propagate_trajectory(const HamiltonianAction& h, const StateVector& psi0, const TimeGrid& grid,
                                const RecorderSelection& recorders, const PropagationOptions& options = {},
                                StateVector* final_state = nullptr);

struct Eigenpairs {
    Eigen::VectorXd values; // ascending
    Eigen::MatrixXd vectors;
};

// Dense diagonalisation for dim <= max_dim (DimensionOverBudget otherwise).
Eigenpairs exact_eigensolve_small(const HamiltonianAction& h, std::size_t max_dim = 2000);
// sum_n exp(-i E_n t / hbar) |n><n|psi0>
Eigen::VectorXcd spectral_propagate(const Eigenpairs& eig, const Eigen::VectorXcd& psi0, double t_fs);

} // namespace qgs

#include "qgs/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qgs/error.hpp"
#include "qgs/units.hpp"

namespace qgs {

StateVector initial_excited_state(const VibronicModel& model, const ProductBasis& basis,
                                  std::vector<std::string>* warnings) {
    Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.dimension()));
    ground[0] = 1.0; // |G> (x) |0...0> is flat index 0
    StateVector psi{DipoleOperator(model, basis).raise(ground), 0.0};
    if (psi.norm() == 0.0 && warnings) warnings->emplace_back("ZeroInitialState");
    return psi;
}

TimeGrid TimeGrid::from_duration(double duration_fs, double dt_fs) {
    if (!(dt_fs > 0.0) || !(duration_fs >= 0.0))
        throw Error(ErrorCode::InvalidValue, "time_grid", "need dt > 0 and duration >= 0");
    return {0.0, dt_fs, static_cast<std::size_t>(std::llround(duration_fs / dt_fs))};
}

ElectronicRDM electronic_rdm(const ProductBasis& basis, const Eigen::VectorXcd& psi) {
    const auto& el = basis.electronic();
    const auto nv = static_cast<Eigen::Index>(basis.vib_dimension());
    ElectronicRDM rdm;
    rdm.per_monomer.assign(static_cast<std::size_t>(el.n_monomers()), Eigen::Matrix2cd::Zero());
    for (int m = 0; m < el.n_monomers(); ++m) {
        auto& r = rdm.per_monomer[static_cast<std::size_t>(m)];
        for (int a = 0; a < kExcitedStates; ++a) {
            const auto pa = psi.segment(el.index(m, static_cast<Excited>(a)) * nv, nv);
            for (int b = a; b < kExcitedStates; ++b) {
                const auto pb = psi.segment(el.index(m, static_cast<Excited>(b)) * nv, nv);
                // sum psi_a conj(psi_b) = conj(<a|b>) with Eigen's conjugate-linear dot
                const cplx v = pb.dot(pa);
                r(a, b) = v;
                r(b, a) = std::conj(v);
            }
            r(a, a) = r(a, a).real();
        }
        rdm.aggregate += r;
    }
    return rdm;
}

cplx mode_position_raw(const ProductBasis& basis, const Eigen::VectorXcd& psi, int instance) {
    if (instance < 0 || instance >= basis.mode_instances())
        throw Error(ErrorCode::InvalidValue, "mode", "instance " + std::to_string(instance) + " out of range");
    const double n2 = psi.squaredNorm();
    if (n2 == 0.0) throw Error(ErrorCode::ZeroNormState, "mode_position");
    return psi.dot(apply_position(basis, psi, instance)) / n2;
}

double mode_position_expectation(const ProductBasis& basis, const Eigen::VectorXcd& psi, int instance) {
    return mode_position_raw(basis, psi, instance).real();
}

double Trajectory::mode_mean(std::size_t sample, int mode, int modes_per_monomer) const {
    const int instances = static_cast<int>(mode_positions.cols());
    double sum = 0.0;
    int count = 0;
    for (int j = mode; j < instances; j += modes_per_monomer, ++count)
        sum += mode_positions(static_cast<Eigen::Index>(sample), j);
    return count ? sum / count : 0.0;
}

namespace {

void record(const HamiltonianAction& h, const DipoleOperator& dipole, const Eigen::VectorXcd& psi, std::size_t i,
            const RecorderSelection& rec, Trajectory& traj) {
    const auto& basis = h.basis();
    if (rec.rdm) traj.rdm[i] = electronic_rdm(basis, psi);
    const double n2 = psi.squaredNorm();
    if (rec.mode_positions && n2 > 0.0)
        for (int j = 0; j < basis.mode_instances(); ++j)
            traj.mode_positions(static_cast<Eigen::Index>(i), j) = mode_position_expectation(basis, psi, j);
    if (rec.norm_energy) {
        traj.norm[i] = std::sqrt(n2);
        traj.energy[i] = n2 > 0.0 ? h.expectation(psi) / n2 : 0.0;
    }
    for (std::size_t c = 0; c < rec.overlap_vib_indices.size(); ++c)
        traj.overlaps(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(i)) =
            dipole.emission_overlap(psi, rec.overlap_vib_indices[c]);
}

} // namespace

Trajectory propagate_trajectory(const HamiltonianAction& h, const StateVector& psi0, const TimeGrid& grid,
                                const RecorderSelection& recorders, const PropagationOptions& options,
                                StateVector* final_state) {
    if (static_cast<std::size_t>(psi0.amplitudes.size()) != h.dimension())
        throw Error(ErrorCode::InvalidValue, "psi0", "dimension mismatch");
    if (!(grid.dt > 0.0)) throw Error(ErrorCode::InvalidValue, "time_grid.dt", "must be > 0");
    for (std::size_t vib : recorders.overlap_vib_indices)
        if (vib >= h.basis().vib_dimension()) throw Error(ErrorCode::ChannelNotInBasis, std::to_string(vib));

    const auto n = grid.samples();
    Trajectory traj;
    traj.grid = grid;
    if (recorders.rdm) traj.rdm.resize(n);
    if (recorders.mode_positions)
        traj.mode_positions = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), h.basis().mode_instances());
    // norm and energy are always tracked for the conservation checks
    RecorderSelection rec = recorders;
    rec.norm_energy = true;
    traj.norm.assign(n, 0.0);
    traj.energy.assign(n, 0.0);
    traj.overlaps = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(recorders.overlap_vib_indices.size()),
                                           static_cast<Eigen::Index>(n));

    const DipoleOperator dipole(h.model(), h.basis());
    Eigen::VectorXcd psi = psi0.amplitudes;
    record(h, dipole, psi, 0, rec, traj);
    const double norm0 = traj.norm[0];
    const double energy0 = traj.energy[0];

    for (std::size_t i = 1; i < n; ++i) {
        psi = krylov_step(h, psi, grid.dt, options.krylov, &traj.krylov);
        record(h, dipole, psi, i, rec, traj);
        if (norm0 > 0.0) {
            traj.max_norm_drift = std::max(traj.max_norm_drift, std::abs(traj.norm[i] - norm0) / norm0);
            if (energy0 != 0.0)
                traj.max_energy_drift =
                    std::max(traj.max_energy_drift, std::abs(traj.energy[i] - energy0) / std::abs(energy0));
        }
        if (options.progress) options.progress(i, grid.steps);
    }

    if (options.enforce_conservation) {
        if (traj.max_norm_drift > options.conservation_tol)
            throw Error(ErrorCode::ConservationViolation, "norm",
                        "relative drift " + std::to_string(traj.max_norm_drift));
        if (traj.max_energy_drift > options.conservation_tol)
            throw Error(ErrorCode::ConservationViolation, "energy",
                        "relative drift " + std::to_string(traj.max_energy_drift));
    }
    if (final_state) *final_state = StateVector{psi, grid.end()};
    return traj;
}

Eigenpairs exact_eigensolve_small(const HamiltonianAction& h, std::size_t max_dim) {
    if (h.dimension() > max_dim)
        throw Error(ErrorCode::DimensionOverBudget, "eigensolve", "dimension " + std::to_string(h.dimension()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.dense(max_dim));
    return {es.eigenvalues(), es.eigenvectors()};
}

Eigen::VectorXcd spectral_propagate(const Eigenpairs& eig, const Eigen::VectorXcd& psi0, double t_fs) {
    Eigen::VectorXcd coeff = eig.vectors.transpose().cast<cplx>() * psi0;
    for (Eigen::Index k = 0; k < coeff.size(); ++k)
        coeff[k] *= std::exp(cplx(0.0, -eig.values[k] * t_fs / kHbarEvFs));
    return eig.vectors.cast<cplx>() * coeff;
}

} // namespace qgs

#include "qgs/hamiltonian.hpp"

#include <algorithm>
#include <cmath>

#include "qgs/error.hpp"

namespace qgs {

namespace {

std::vector<double> ladder_table(const ProductBasis& basis) {
    int top = 0;
    for (int j = 0; j < basis.mode_instances(); ++j) top = std::max(top, basis.cutoff(j));
    std::vector<double> t(static_cast<std::size_t>(top) + 2);
    for (std::size_t n = 0; n < t.size(); ++n) t[n] = std::sqrt(0.5 * static_cast<double>(n));
    return t;
}

// y += coef * Q x over one block, Q|n> = sqrt(n/2)|n-1> + sqrt((n+1)/2)|n+1>
void position_kernel(const cplx* x, cplx* y, double coef, std::size_t stride, int cutoff, std::size_t vib_dim,
                     const std::vector<double>& ladder) {
    const std::size_t radix = static_cast<std::size_t>(cutoff) + 1;
    const std::size_t span = stride * radix;
    for (std::size_t base = 0; base < vib_dim; base += span) {
        for (std::size_t n = 0; n < radix; ++n) {
            const std::size_t row = base + n * stride;
            if (n > 0) {
                const double c = coef * ladder[n];
                for (std::size_t r = 0; r < stride; ++r) y[row + r] += c * x[row + r - stride];
            }
            if (n + 1 < radix) {
                const double c = coef * ladder[n + 1];
                for (std::size_t r = 0; r < stride; ++r) y[row + r] += c * x[row + r + stride];
            }
        }
    }
}

} // namespace

HamiltonianAction::HamiltonianAction(const VibronicModel& model, const ProductBasis& basis)
    : model_(model)
    , basis_(basis)
    , ladder_(ladder_table(basis)) {
    harmonic_.assign(basis_.vib_dimension(), 0.0);
    for (std::size_t v = 0; v < basis_.vib_dimension(); ++v) {
        double e = 0.0;
        for (int j = 0; j < basis_.mode_instances(); ++j)
            e += model_.mode_of_instance(j).frequency_ev * (basis_.occupation(v, j) + 0.5);
        harmonic_[v] = e;
    }
}

void HamiltonianAction::accumulate_position(const cplx* x_src, cplx* y_dst, double coef, int instance) const {
    if (coef == 0.0) return;
    position_kernel(x_src, y_dst, coef, basis_.stride(instance), basis_.cutoff(instance), basis_.vib_dimension(),
                    ladder_);
}

void HamiltonianAction::apply(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
    const auto& el = basis_.electronic();
    const std::size_t nv = basis_.vib_dimension();
    y.resize(x.size());
    const cplx* xp = x.data();
    cplx* yp = y.data();

    // Block order fixes the floating-point reduction order.
    for (int e = 0; e < el.dimension(); ++e) {
        const cplx* xe = xp + static_cast<std::size_t>(e) * nv;
        cplx* ye = yp + static_cast<std::size_t>(e) * nv;
        const double shift = el.is_ground(e) ? model_.ground_energy_ev
                                             : model_.state_energies_ev[static_cast<int>(el.state_of(e))];
        for (std::size_t v = 0; v < nv; ++v) ye[v] = (shift + harmonic_[v]) * xe[v];
        if (el.is_ground(e)) continue;

        const int m = el.monomer_of(e);
        const Excited a = el.state_of(e);
        const int ai = static_cast<int>(a);
        const double J = model_.exciton_couplings_ev[ai];
        if (J != 0.0) {
            for (int nb : {m - 1, m + 1}) {
                if (nb < 0 || nb >= el.n_monomers()) continue;
                const cplx* xn = xp + static_cast<std::size_t>(el.index(nb, a)) * nv;
                for (std::size_t v = 0; v < nv; ++v) ye[v] += J * xn[v];
            }
        }
        const Excited other = a == Excited::S1 ? Excited::S2 : Excited::S1;
        const cplx* xo = xp + static_cast<std::size_t>(el.index(m, other)) * nv;
        for (int k = 0; k < basis_.modes_per_monomer(); ++k) {
            const int instance = m * basis_.modes_per_monomer() + k;
            const auto& mode = model_.modes[static_cast<std::size_t>(k)];
            accumulate_position(xe, ye, mode.diagonal_coupling_ev[ai], instance);
            accumulate_position(xo, ye, mode.offdiagonal_coupling_ev, instance);
        }
    }
}

double HamiltonianAction::expectation(const Eigen::VectorXcd& x) const {
    Eigen::VectorXcd hx;
    apply(x, hx);
    return x.dot(hx).real();
}

Eigen::MatrixXd HamiltonianAction::dense(std::size_t max_dim) const {
    const std::size_t n = dimension();
    if (n > max_dim) throw Error(ErrorCode::DimensionOverBudget, "dense", "dimension " + std::to_string(n));
    Eigen::MatrixXd h(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
    Eigen::VectorXcd col;
    for (std::size_t i = 0; i < n; ++i) {
        e[static_cast<Eigen::Index>(i)] = 1.0;
        apply(e, col);
        h.col(static_cast<Eigen::Index>(i)) = col.real();
        e[static_cast<Eigen::Index>(i)] = 0.0;
    }
    return h;
}

double HamiltonianAction::ground_surface_energy(std::span<const int> occupations) const {
    double e = model_.ground_energy_ev;
    for (int j = 0; j < basis_.mode_instances(); ++j)
        e += model_.mode_of_instance(j).frequency_ev * (occupations[static_cast<std::size_t>(j)] + 0.5);
    return e;
}

Eigen::VectorXcd apply_position(const ProductBasis& basis, const Eigen::VectorXcd& x, int instance) {
    const std::size_t nv = basis.vib_dimension();
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
    std::vector<double> ladder(static_cast<std::size_t>(basis.cutoff(instance)) + 2);
    for (std::size_t n = 0; n < ladder.size(); ++n) ladder[n] = std::sqrt(0.5 * static_cast<double>(n));
    for (int e = 0; e < basis.electronic().dimension(); ++e) {
        const std::size_t off = static_cast<std::size_t>(e) * nv;
        position_kernel(x.data() + off, y.data() + off, 1.0, basis.stride(instance), basis.cutoff(instance), nv, ladder);
    }
    return y;
}

DipoleOperator::DipoleOperator(const VibronicModel& model, const ProductBasis& basis)
    : dipoles_(model.transition_dipoles)
    , basis_(basis) {}

Eigen::VectorXcd DipoleOperator::raise(const Eigen::VectorXcd& x) const {
    const auto& el = basis_.electronic();
    const auto nv = static_cast<Eigen::Index>(basis_.vib_dimension());
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
    const auto ground = x.segment(0, nv);
    for (int m = 0; m < el.n_monomers(); ++m)
        for (int a = 0; a < kExcitedStates; ++a)
            y.segment(el.index(m, static_cast<Excited>(a)) * nv, nv) = dipoles_[a] * ground;
    return y;
}

Eigen::VectorXcd DipoleOperator::lower(const Eigen::VectorXcd& x) const {
    const auto& el = basis_.electronic();
    const auto nv = static_cast<Eigen::Index>(basis_.vib_dimension());
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(x.size());
    for (int m = 0; m < el.n_monomers(); ++m)
        for (int a = 0; a < kExcitedStates; ++a)
            y.segment(0, nv) += dipoles_[a] * x.segment(el.index(m, static_cast<Excited>(a)) * nv, nv);
    return y;
}

cplx DipoleOperator::emission_overlap(const Eigen::VectorXcd& psi, std::size_t vib) const {
    const auto& el = basis_.electronic();
    const std::size_t nv = basis_.vib_dimension();
    cplx sum = 0.0;
    for (int m = 0; m < el.n_monomers(); ++m)
        for (int a = 0; a < kExcitedStates; ++a)
            sum += dipoles_[a] * psi[static_cast<Eigen::Index>(
                                     static_cast<std::size_t>(el.index(m, static_cast<Excited>(a))) * nv + vib)];
    return sum;
}

double DipoleOperator::total_strength() const {
    double s = 0.0;
    for (double mu : dipoles_) s += mu * mu;
    return s * basis_.electronic().n_monomers();
}

Eigen::MatrixXd DipoleOperator::dense_raise() const {
    const auto n = static_cast<Eigen::Index>(basis_.dimension());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        e[i] = 1.0;
        d.col(i) = raise(e).real();
        e[i] = 0.0;
    }
    return d;
}

} // namespace qgs

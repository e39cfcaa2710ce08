#include "qgs/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qgs/error.hpp"
#include "qgs/units.hpp"

namespace qgs {

void KrylovStats::merge(const KrylovStats& other) {
    matvecs += other.matvecs;
    max_subspace = std::max(max_subspace, other.max_subspace);
    substeps += other.substeps;
    max_error_estimate = std::max(max_error_estimate, other.max_error_estimate);
    happy_breakdowns += other.happy_breakdowns;
}

namespace {

// exp(-i T dt/hbar) e_1 for the real symmetric tridiagonal T = tridiag(beta, alpha, beta)
Eigen::VectorXcd tridiagonal_exp_e1(const std::vector<double>& alpha, const std::vector<double>& beta, double dt_fs) {
    const auto n = static_cast<Eigen::Index>(alpha.size());
    Eigen::VectorXcd c(n);
    if (n == 1) {
        c[0] = std::exp(cplx(0.0, -alpha[0] * dt_fs / kHbarEvFs));
        return c;
    }
    Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), n);
    Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    const auto& s = es.eigenvectors();
    Eigen::VectorXcd weights(n);
    for (Eigen::Index k = 0; k < n; ++k)
        weights[k] = s(0, k) * std::exp(cplx(0.0, -es.eigenvalues()[k] * dt_fs / kHbarEvFs));
    c = s.cast<cplx>() * weights;
    return c;
}

bool lanczos_attempt(const LinearOperator& h, const Eigen::VectorXcd& psi, double beta0, double dt_fs,
                     const KrylovOptions& options, Eigen::VectorXcd& out, KrylovStats& stats) {
    std::vector<Eigen::VectorXcd> v;
    std::vector<double> alpha, beta;
    v.reserve(static_cast<std::size_t>(options.max_dim));
    v.push_back(psi / beta0);
    Eigen::VectorXcd w;

    for (int j = 0; j < options.max_dim; ++j) {
        h.apply(v.back(), w);
        ++stats.matvecs;
        const double a = v.back().dot(w).real();
        w -= a * v.back();
        if (j > 0) w -= beta.back() * v[v.size() - 2];
        for (const auto& q : v) w -= q.dot(w) * q; // full reorthogonalisation
        const double b = w.norm();
        if (!std::isfinite(a) || !std::isfinite(b))
            throw Error(ErrorCode::KrylovBreakdown, "lanczos", "non-finite recurrence coefficient");
        alpha.push_back(a);

        const Eigen::VectorXcd c = tridiagonal_exp_e1(alpha, beta, dt_fs);
        const double scale = std::abs(a) + (beta.empty() ? 0.0 : beta.back()) + 1.0;
        const bool happy = b <= 1e-13 * scale;
        const double err = happy ? 0.0 : b * std::abs(c[c.size() - 1]);
        if (happy || err <= options.tol) {
            out = Eigen::VectorXcd::Zero(psi.size());
            for (std::size_t i = 0; i < v.size(); ++i) out += c[static_cast<Eigen::Index>(i)] * v[i];
            out *= beta0;
            stats.max_subspace = std::max(stats.max_subspace, j + 1);
            stats.max_error_estimate = std::max(stats.max_error_estimate, err);
            if (happy) ++stats.happy_breakdowns;
            return true;
        }
        beta.push_back(b);
        v.push_back(w / b);
    }
    return false;
}

Eigen::VectorXcd step_recursive(const LinearOperator& h, const Eigen::VectorXcd& psi, double dt_fs,
                                const KrylovOptions& options, int depth, KrylovStats& stats) {
    const double beta0 = psi.norm();
    if (beta0 == 0.0) return psi;
    if (!std::isfinite(beta0)) throw Error(ErrorCode::KrylovBreakdown, "lanczos", "non-finite state");
    Eigen::VectorXcd out;
    if (lanczos_attempt(h, psi, beta0, dt_fs, options, out, stats)) {
        ++stats.substeps;
        return out;
    }
    if (depth >= options.max_halvings)
        throw Error(ErrorCode::NoConvergence, "m_cap=" + std::to_string(options.max_dim),
                    "Krylov error estimate above tolerance");
    const Eigen::VectorXcd half = step_recursive(h, psi, 0.5 * dt_fs, options, depth + 1, stats);
    return step_recursive(h, half, 0.5 * dt_fs, options, depth + 1, stats);
}

} // namespace

Eigen::VectorXcd krylov_step(const LinearOperator& h, const Eigen::VectorXcd& psi, double dt_fs,
                             const KrylovOptions& options, KrylovStats* stats) {
    if (options.max_dim < 2) throw Error(ErrorCode::InvalidValue, "krylov.max_dim", "must be >= 2");
    if (!(dt_fs >= 0.0)) throw Error(ErrorCode::InvalidValue, "dt_fs", "must be >= 0");
    if (static_cast<std::size_t>(psi.size()) != h.dimension())
        throw Error(ErrorCode::InvalidValue, "psi", "dimension mismatch");
    if (dt_fs == 0.0) return psi;
    KrylovStats local;
    auto out = step_recursive(h, psi, dt_fs, options, 0, local);
    if (stats) stats->merge(local);
    return out;
}

} // namespace qgs

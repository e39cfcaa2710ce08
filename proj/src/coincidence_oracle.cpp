#include <cmath>

#include <Eigen/Eigenvalues>

#include "qgs/config.hpp"
#include "qgs/error.hpp"
#include "qgs/hamiltonian.hpp"
#include "qgs/signal.hpp"
#include "qgs/units.hpp"

namespace qgs {

namespace {

constexpr std::size_t kOracleMaxDim = 50;
constexpr std::size_t kOracleMaxPoints = 64;

// int dx exp(-x^2 / a^2) exp(-i x u / hbar) by trapezoid on +-8 a
cplx gaussian_transform(double a, double u) {
    const int n = 801;
    const double h = 16.0 * a / (n - 1);
    cplx sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const double x = -8.0 * a + h * k;
        const double w = (k == 0 || k == n - 1) ? 0.5 * h : h;
        sum += w * std::exp(-x * x / (a * a)) * std::exp(cplx(0.0, -x * u / kHbarEvFs));
    }
    return sum;
}

double trapezoid(std::size_t i, std::size_t n, double h) { return (i == 0 || i + 1 == n) ? 0.5 * h : h; }

} // namespace

// Translating every molecular time by the same c multiplies b by a unitary on the
// ground space and a global phase, so the correlation G is built once on grids
// relative to the photon-pair centre c = t - T.
OracleResult brute_force_coincidence(const VibronicModel& model, const FockTruncation& trunc, const JsaParams& jsa,
                                     double gamma_ev, const UniformAxis& omega, const UniformAxis& T,
                                     const OracleGrids& grids) {
    jsa.validate();
    if (!(gamma_ev > 0.0)) throw Error(ErrorCode::InvalidValue, "gamma", "must be > 0");
    const ProductBasis basis(model, trunc);
    if (basis.dimension() > kOracleMaxDim)
        throw Error(ErrorCode::BudgetExceeded, "dimension",
                    std::to_string(basis.dimension()) + " > " + std::to_string(kOracleMaxDim));
    for (std::size_t n : {grids.t_points, grids.t2_points, grids.t4_points, omega.size, T.size})
        if (n > kOracleMaxPoints || n < 2)
            throw Error(ErrorCode::BudgetExceeded, "grid",
                        std::to_string(n) + " points per axis (allowed 2.." + std::to_string(kOracleMaxPoints) + ")");

    const HamiltonianAction h(model, basis);
    const Eigen::MatrixXd dense = h.dense(kOracleMaxDim);
    const auto nv = static_cast<Eigen::Index>(basis.vib_dimension());
    const Eigen::Index ne = dense.rows() - nv;
    const Eigen::MatrixXd hg = dense.topLeftCorner(nv, nv);
    const Eigen::MatrixXd he = dense.bottomRightCorner(ne, ne);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(hg), ee(he);

    // V^dag |G,0> restricted to the excited block; V maps the excited block to the ground block
    const Eigen::MatrixXd raise = DipoleOperator(model, basis).dense_raise();
    const Eigen::MatrixXd v_dag = raise.bottomLeftCorner(ne, nv);
    const Eigen::VectorXd x0 = v_dag.col(0);
    const Eigen::MatrixXd v = v_dag.transpose();
    const double e_g0 = hg(0, 0);
    const Eigen::VectorXd x0_eig = ee.eigenvectors().transpose() * x0;
    const Eigen::MatrixXd v_eig = eg.eigenvectors().transpose() * v * ee.eigenvectors();

    const double tau = jsa.tau_fs;
    const double sigma_t = kHbarEvFs / jsa.sigma_ev;
    const double t2_half = grids.t2_halfwidth_taus * 2.0 * tau;
    const auto ax_c = UniformAxis::span(-grids.t_halfwidth_sigmas * 2.0 * sigma_t,
                                        grids.t_halfwidth_sigmas * 2.0 * sigma_t, grids.t_points);
    const auto ax_2 = UniformAxis::span(-t2_half, t2_half, grids.t2_points);
    const auto ax_4 = UniformAxis::span(-t2_half, t2_half + grids.emission_decay_lifetimes * kHbarEvFs / gamma_ev,
                                        grids.t4_points);
    const auto n2 = static_cast<Eigen::Index>(ax_2.size), n4 = static_cast<Eigen::Index>(ax_4.size);

    // b(t4, t2) in the ground eigenbasis, column t4 * n2 + t2
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(nv, n4 * n2);
    for (Eigen::Index i4 = 0; i4 < n4; ++i4)
        for (Eigen::Index i2 = 0; i2 < n2; ++i2) {
            const double t4 = ax_4[static_cast<std::size_t>(i4)], t2 = ax_2[static_cast<std::size_t>(i2)];
            if (t4 < t2) continue;
            const double s = t4 - t2;
            Eigen::VectorXcd e(ne);
            for (Eigen::Index n = 0; n < ne; ++n)
                e[n] = std::exp(cplx(-gamma_ev * s, -ee.eigenvalues()[n] * s) / kHbarEvFs) * x0_eig[n];
            Eigen::VectorXcd g = v_eig * e;
            for (Eigen::Index k = 0; k < nv; ++k)
                g[k] *= std::exp(cplx(0.0, (eg.eigenvalues()[k] * t4 - e_g0 * t2) / kHbarEvFs));
            b.col(i4 * n2 + i2) = g;
        }
    // G[(t3,t1),(t4,t2)] = <b(t3,t1)|b(t4,t2)>
    const Eigen::MatrixXcd corr = b.adjoint() * b;

    // f(ts, ti) = e^{-i(ws0 ts + wi0 ti)/hbar} / 2 F_X((ts+ti)/2) F_D((ts-ti)/2)
    const double d_width = 2.0 * kHbarEvFs / tau;
    auto f = [&](double ts, double ti) {
        const cplx carrier = std::exp(cplx(0.0, -(jsa.signal_center() * ts + jsa.idler_center() * ti) / kHbarEvFs));
        return 0.5 * jsa.norm * carrier * gaussian_transform(jsa.sigma_ev, 0.5 * (ts + ti)) *
               gaussian_transform(d_width, 0.5 * (ts - ti));
    };

    Eigen::VectorXcd spec = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(omega.size));
    for (std::size_t ic = 0; ic < ax_c.size; ++ic) {
        const double c = ax_c[ic];
        Eigen::VectorXcd fc(n2);
        for (Eigen::Index i2 = 0; i2 < n2; ++i2)
            fc[i2] = trapezoid(static_cast<std::size_t>(i2), ax_2.size, ax_2.step) *
                     f(ax_2[static_cast<std::size_t>(i2)] + c, c);
        // H(t3, t4) = sum_{t1,t2} conj f(t1) G f(t2)
        Eigen::MatrixXcd hc(n4, n4);
        for (Eigen::Index i3 = 0; i3 < n4; ++i3)
            for (Eigen::Index i4 = 0; i4 < n4; ++i4)
                hc(i3, i4) = fc.dot(corr.block(i3 * n2, i4 * n2, n2, n2) * fc);
        const double wc = trapezoid(ic, ax_c.size, ax_c.step);
        for (std::size_t iw = 0; iw < omega.size; ++iw) {
            Eigen::VectorXcd ph(n4);
            for (Eigen::Index i4 = 0; i4 < n4; ++i4)
                ph[i4] = trapezoid(static_cast<std::size_t>(i4), ax_4.size, ax_4.step) *
                         std::exp(cplx(0.0, omega[iw] * ax_4[static_cast<std::size_t>(i4)] / kHbarEvFs));
            spec[static_cast<Eigen::Index>(iw)] += wc * ph.dot(hc * ph);
        }
    }

    OracleResult r;
    r.spectrum = {omega, T, Eigen::MatrixXd(static_cast<Eigen::Index>(omega.size), static_cast<Eigen::Index>(T.size)),
                  {{"signal", "coincidence_oracle"},
                   {"tau_fs", format_double(tau)},
                   {"gamma_ev", format_double(gamma_ev)}}};
    for (std::size_t q = 0; q < T.size; ++q) r.spectrum.values.col(static_cast<Eigen::Index>(q)) = spec.real();
    const double re_max = spec.real().cwiseAbs().maxCoeff();
    r.max_imag_ratio = re_max > 0.0 ? spec.imag().cwiseAbs().maxCoeff() / re_max : 0.0;
    return r;
}

} // namespace qgs

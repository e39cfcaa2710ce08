#include "qgs/photonics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include <lapacke.h>

#include "qgs/error.hpp"
#include "qgs/units.hpp"

namespace qgs {

JsaParams JsaParams::from_inverse_sigma(double omega_plus_ev, double omega_minus_ev, double sigma_inverse_fs,
                                        double tau_fs) {
    JsaParams p;
    p.omega_plus_ev = omega_plus_ev;
    p.omega_minus_ev = omega_minus_ev;
    p.sigma_ev = inverse_fs_to_ev(sigma_inverse_fs);
    p.tau_fs = tau_fs;
    return p;
}

void JsaParams::validate() const {
    if (!(sigma_ev > 0.0) || !std::isfinite(sigma_ev)) throw Error(ErrorCode::InvalidValue, "jsa.sigma", "must be > 0");
    if (!(tau_fs > 0.0) || !std::isfinite(tau_fs)) throw Error(ErrorCode::InvalidValue, "jsa.tau_fs", "must be > 0");
    if (!std::isfinite(omega_plus_ev) || !std::isfinite(omega_minus_ev))
        throw Error(ErrorCode::InvalidValue, "jsa.omega", "non-finite");
}

double JsaParams::marginal_width_ev() const {
    const double diff_width = 2.0 * kHbarEvFs / tau_fs;
    return 0.5 * std::hypot(sigma_ev, diff_width);
}

double JsaParams::conditional_width_ev() const {
    const double t = tau_fs / kHbarEvFs;
    return 1.0 / std::sqrt(1.0 / (sigma_ev * sigma_ev) + 0.25 * t * t);
}

double JsaParams::separability_product() const { return sigma_ev * tau_fs / kHbarEvFs; }

std::complex<double> jsa_amplitude(double omega_s_ev, double omega_i_ev, const JsaParams& p) {
    const double sum = omega_s_ev + omega_i_ev - p.omega_plus_ev;
    const double diff = (omega_s_ev - omega_i_ev - p.omega_minus_ev) * p.tau_fs / kHbarEvFs;
    return p.norm * std::exp(-sum * sum / (p.sigma_ev * p.sigma_ev) - 0.25 * diff * diff);
}

Eigen::MatrixXd JsaGrid::weighted() const {
    Eigen::MatrixXd a = magnitude;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            a(i, j) *= std::sqrt(signal.trapezoid_weight(static_cast<std::size_t>(i)) *
                                 idler.trapezoid_weight(static_cast<std::size_t>(j)));
    return a;
}

double JsaGrid::integrated_probability() const {
    double total = 0.0;
    for (Eigen::Index i = 0; i < magnitude.rows(); ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < magnitude.cols(); ++j)
            row += idler.trapezoid_weight(static_cast<std::size_t>(j)) * magnitude(i, j) * magnitude(i, j);
        total += signal.trapezoid_weight(static_cast<std::size_t>(i)) * row;
    }
    return total;
}

JsaAxes auto_jsa_axes(const JsaParams& p, double points_per_width, double widths) {
    p.validate();
    const double half = widths * p.marginal_width_ev();
    const double h = p.conditional_width_ev() / points_per_width;
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * half / h)) + 1;
    return {UniformAxis::span(p.signal_center() - half, p.signal_center() + half, n),
            UniformAxis::span(p.idler_center() - half, p.idler_center() + half, n)};
}

JsaGrid jsa_grid(JsaParams& p, const UniformAxis& signal, const UniformAxis& idler) {
    p.validate();
    const double w = p.marginal_width_ev();
    const double h_max = p.conditional_width_ev() / 8.0;
    auto check_axis = [&](const UniformAxis& ax, double center, const char* name) {
        if (ax.size < 2) throw Error(ErrorCode::GridTooCoarse, name, "need at least 2 points");
        // small slack for the rounding in UniformAxis::span
        if (ax.step > h_max * (1.0 + 1e-9))
            throw Error(ErrorCode::GridTooCoarse, name,
                        "step " + std::to_string(ax.step) + " eV > width/8 = " + std::to_string(h_max));
        const double margin = 3.0 * w * (1.0 - 1e-9);
        if (ax.start > center - margin || ax.back() < center + margin)
            throw Error(ErrorCode::InvalidValue, name, "range must bracket the peak by 3 widths");
    };
    check_axis(signal, p.signal_center(), "jsa.signal_axis");
    check_axis(idler, p.idler_center(), "jsa.idler_axis");

    JsaGrid grid{signal, idler, Eigen::MatrixXd(signal.size, idler.size), 1.0};
    p.norm = 1.0;
    for (std::size_t i = 0; i < signal.size; ++i)
        for (std::size_t j = 0; j < idler.size; ++j)
            grid.magnitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::abs(jsa_amplitude(signal[i], idler[j], p));
    const double q = 1.0 / std::sqrt(grid.integrated_probability());
    grid.magnitude *= q;
    grid.norm = q;
    p.norm = q;
    return grid;
}

SchmidtResult schmidt_decompose(const Eigen::MatrixXd& weighted_grid) {
    // Squared singular values are the eigenvalues of the Gram matrix.
    const Eigen::MatrixXd& a = weighted_grid;
    const bool tall = a.rows() >= a.cols();
    const Eigen::Index n = tall ? a.cols() : a.rows();
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
    if (tall) gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
    else gram.selfadjointView<Eigen::Lower>().rankUpdate(a);

    std::vector<double> eig(static_cast<std::size_t>(n));
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(n), gram.data(),
                                           static_cast<lapack_int>(n), eig.data());
    if (info != 0) throw Error(ErrorCode::NoConvergence, "schmidt", "dsyevd info " + std::to_string(info));

    double total = 0.0;
    for (double& e : eig) {
        e = std::max(e, 0.0);
        total += e;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::ZeroNormState, "schmidt");
    std::sort(eig.begin(), eig.end(), std::greater<>());

    SchmidtResult r;
    double p4 = 0.0;
    r.entropy = 0.0;
    for (double e : eig) {
        const double p = e / total;
        r.coefficients.push_back(std::sqrt(p));
        p4 += p * p;
        if (p > 0.0) r.entropy -= p * std::log(p);
    }
    r.schmidt_number = 1.0 / p4;
    return r;
}

double frequency_correlation(const JsaGrid& grid) {
    double w_sum = 0.0, ms = 0.0, mi = 0.0;
    const auto rows = grid.magnitude.rows(), cols = grid.magnitude.cols();
    auto weight = [&](Eigen::Index i, Eigen::Index j) {
        const double m = grid.magnitude(i, j);
        return grid.signal.trapezoid_weight(static_cast<std::size_t>(i)) *
               grid.idler.trapezoid_weight(static_cast<std::size_t>(j)) * m * m;
    };
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double w = weight(i, j);
            w_sum += w;
            ms += w * grid.signal[static_cast<std::size_t>(i)];
            mi += w * grid.idler[static_cast<std::size_t>(j)];
        }
    ms /= w_sum;
    mi /= w_sum;
    double vs = 0.0, vi = 0.0, cov = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            const double w = weight(i, j);
            const double ds = grid.signal[static_cast<std::size_t>(i)] - ms;
            const double di = grid.idler[static_cast<std::size_t>(j)] - mi;
            vs += w * ds * ds;
            vi += w * di * di;
            cov += w * ds * di;
        }
    return cov / std::sqrt(vs * vi);
}

void GateParams::validate() const {
    if (!(tau_fs > 0.0)) throw Error(ErrorCode::InvalidValue, "gate.tau_fs", "must be > 0");
    if (!(gamma0_ev > 0.0)) throw Error(ErrorCode::InvalidValue, "gate.gamma0", "must be > 0");
    if (!(gamma_d_ev >= 0.0)) throw Error(ErrorCode::InvalidValue, "gate.gamma_d", "must be >= 0");
}

std::complex<double> time_gate(double u, const GateParams& g) {
    const double envelope = std::exp(-u * u);
    if (!g.carrier_phase) return envelope;
    return envelope * std::exp(std::complex<double>(0.0, -g.omega_minus_ev * g.tau_fs * u / kHbarEvFs));
}

} // namespace qgs

// photonics.hpp: entangled two-photon joint spectral amplitude and the time gate
//
// Phi(ws, wi) = Q exp[-(ws + wi - w+)^2 / sigma^2] exp[-(ws - wi - w-)^2 tau^2 / (4 hbar^2)]
// Frequencies in eV, tau in fs; hbar makes the second exponent dimensionless.

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qgs/grid.hpp"

namespace qgs {

struct JsaParams {
    double omega_plus_ev = 4.7;
    double omega_minus_ev = 0.7;
    double sigma_ev = 0.0;  // sum-frequency width
    double tau_fs = 7.0;    // entanglement time
    double norm = 1.0;      // Q, set by jsa_grid

    // sigma given as an inverse time (sigma^-1 = 400 fs -> sigma = hbar / 400 fs)
    static JsaParams from_inverse_sigma(double omega_plus_ev, double omega_minus_ev, double sigma_inverse_fs,
                                        double tau_fs);
    void validate() const;
    double signal_center() const { return 0.5 * (omega_plus_ev + omega_minus_ev); }
    double idler_center() const { return 0.5 * (omega_plus_ev - omega_minus_ev); }
    // 1/e half-width of |Phi| along either frequency axis (marginal envelope)
    double marginal_width_ev() const;
    // 1/e half-width of |Phi| along one axis at fixed other frequency
    double conditional_width_ev() const;
    // sigma * tau / hbar; the amplitude is separable when this equals 2
    double separability_product() const;
};

std::complex<double> jsa_amplitude(double omega_s_ev, double omega_i_ev, const JsaParams& p);

struct JsaGrid {
    UniformAxis signal; // rows
    UniformAxis idler;  // columns
    Eigen::MatrixXd magnitude; // |Phi| including Q
    double norm = 1.0;         // Q

    // sqrt(w_i w_j) |Phi_ij|: Frobenius norm 1, singular values are Schmidt coefficients
    Eigen::MatrixXd weighted() const;
    // trapezoid estimate of the double integral of |Phi|^2
    double integrated_probability() const;
};

// Smallest grid satisfying both guards of jsa_grid.
struct JsaAxes {
    UniformAxis signal;
    UniformAxis idler;
};
JsaAxes auto_jsa_axes(const JsaParams& p, double points_per_width = 8.0, double widths = 3.0);

// Samples |Phi| and sets Q (p.norm) by trapezoid quadrature on the same grid.
// Throws GridTooCoarse with fewer than 8 points per conditional width, and
// InvalidValue when a range brackets the peak by fewer than 3 marginal widths.
JsaGrid jsa_grid(JsaParams& p, const UniformAxis& signal, const UniformAxis& idler);

struct SchmidtResult {
    std::vector<double> coefficients; // lambda_n, descending, sum lambda^2 = 1
    double schmidt_number = 1.0;      // 1 / sum lambda^4
    double entropy = 0.0;             // -sum lambda^2 ln lambda^2
};

SchmidtResult schmidt_decompose(const Eigen::MatrixXd& weighted_grid);

// Pearson correlation between ws and wi under |Phi|^2.
double frequency_correlation(const JsaGrid& grid);

struct GateParams {
    double tau_fs = 7.0;
    double gamma0_ev = 0.41;
    double gamma_d_ev = 0.0;
    bool carrier_phase = false;    // multiply M by exp(-i w- tau u / hbar)
    double omega_minus_ev = 0.7;

    double gamma_ev() const { return gamma0_ev + gamma_d_ev; }
    void validate() const;
};

// M(u) = exp(-u^2), optionally times the difference-frequency carrier phase.
std::complex<double> time_gate(double u, const GateParams& g);

} // namespace qgs

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qgs/config.hpp"
#include "qgs/error.hpp"
#include "qgs/parallel.hpp"
#include "qgs/signal.hpp"
#include "qgs/units.hpp"

namespace qgs {

namespace {

const double kAmpCut = std::sqrt(std::log(1e8));       // exp(-u^2) >= 1e-8
const double kIntensityCut = std::sqrt(0.5 * std::log(1e8)); // exp(-2u^2) >= 1e-8
const double kFilterCut = std::sqrt(2.0 * std::log(1e8));    // exp(-x^2 / 2) >= 1e-8
constexpr double kLorentzSpan = 8.0;                   // HWHMs kept on each side
constexpr std::size_t kAuxLimit = 40000;

struct Fields {
    std::vector<Eigen::VectorXcd> e;
    Eigen::Index samples = 0;
    double t0 = 0.0;
    double dt = 0.0;
};

Fields build_fields(const OverlapTable& table) {
    Fields f;
    f.samples = static_cast<Eigen::Index>(table.grid.samples());
    f.t0 = table.grid.t0;
    f.dt = table.grid.dt;
    for (std::size_t c = 0; c < table.channels.size(); ++c) {
        const auto o = table.values.row(static_cast<Eigen::Index>(c));
        if (o.cwiseAbs().maxCoeff() == 0.0) continue;
        Eigen::VectorXcd e(f.samples);
        const double energy = table.channel_energy(c);
        for (Eigen::Index j = 0; j < f.samples; ++j)
            e[j] = std::exp(cplx(0.0, energy * table.grid.time(static_cast<std::size_t>(j)) / kHbarEvFs)) * o[j];
        f.e.push_back(std::move(e));
    }
    return f;
}

// Spectrogram through its lag autocorrelation: the unit-area window exp(-x^2/W^2)/(sqrt(pi) W)
// along omega is the factor exp(-W^2 s^2 / 4 hbar^2) at lag s, dephasing is exp(-gamma0 s / hbar).
void time_then_frequency(const Fields& f, const ClassicalParams& params, const UniformAxis& omega, const UniformAxis& T,
                         int workers, Spectrum2D& out) {
    const double s = params.time_width_fs();
    const double w_det = params.detector_width_ev();
    const double dt = f.dt;
    const double lag_cut = 2.0 * kHbarEvFs * kAmpCut / w_det;
    parallel_for(T.size, workers, [&](std::size_t q) {
        const double t_c = T[q];
        const auto lo = static_cast<Eigen::Index>(std::max(0.0, std::ceil((t_c - kAmpCut * s - f.t0) / dt)));
        const auto hi = std::min<Eigen::Index>(
            f.samples, static_cast<Eigen::Index>(std::max(0.0, std::floor((t_c + kAmpCut * s - f.t0) / dt) + 1)));
        if (hi <= lo) return;
        const Eigen::Index len = hi - lo;
        const Eigen::Index lags = std::min<Eigen::Index>(len, static_cast<Eigen::Index>(lag_cut / dt) + 1);
        Eigen::VectorXd gate(len);
        for (Eigen::Index k = 0; k < len; ++k) {
            const double u = (f.t0 + dt * static_cast<double>(lo + k) - t_c) / s;
            gate[k] = std::exp(-u * u);
        }
        Eigen::VectorXcd corr = Eigen::VectorXcd::Zero(lags);
        Eigen::VectorXcd g(len);
        for (const auto& e : f.e) {
            g = gate.cwiseProduct(e.segment(lo, len));
            for (Eigen::Index k = 0; k < lags; ++k) corr[k] += g.head(len - k).dot(g.tail(len - k));
        }
        for (Eigen::Index k = 0; k < lags; ++k) {
            const double lag = static_cast<double>(k) * dt;
            corr[k] *= std::exp(-0.25 * w_det * w_det * lag * lag / (kHbarEvFs * kHbarEvFs) -
                                params.gamma0_ev * lag / kHbarEvFs);
        }
        for (std::size_t i = 0; i < omega.size; ++i) {
            const cplx step = std::exp(cplx(0.0, omega[i] * dt / kHbarEvFs));
            cplx phase = step;
            double acc = corr[0].real();
            for (Eigen::Index k = 1; k < lags; ++k, phase *= step) acc += 2.0 * (phase * corr[k]).real();
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q)) = std::max(0.0, dt * dt * acc);
        }
    });
}

// Filtered field E_f(t; w) = int dt' h(t - t') e^{i w t'/hbar} E(t'), with
// h(s) = W / (sqrt(2 pi) hbar) exp(-W^2 s^2 / 2 hbar^2) so the amplitude transfer is
// exp(-(w' - w)^2 / 2 W^2). Broad windows convolve in time; narrow ones sum DFT bins of E.
class FilterBank {
public:
    FilterBank(const Fields& f, double w_det, double band_lo, double band_hi) : f_(f), w_(w_det) {
        const double reach_fs = kHbarEvFs * kFilterCut / w_det;
        half_taps_ = static_cast<Eigen::Index>(std::ceil(reach_fs / f.dt));
        const double period = f.dt * static_cast<double>(f.samples) + 2.0 * reach_fs + 10.0 * f.dt;
        bin_ = 2.0 * std::numbers::pi * kHbarEvFs / period;
        const double reach_ev = kFilterCut * w_det;
        const double bins_per_point = 2.0 * reach_ev / bin_;
        use_bins_ = 2.0 * bins_per_point < static_cast<double>(2 * half_taps_ + 1);
        if (use_bins_) {
            k_lo_ = static_cast<long>(std::floor((band_lo - reach_ev) / bin_));
            const long k_hi = static_cast<long>(std::ceil((band_hi + reach_ev) / bin_));
            n_bins_ = static_cast<Eigen::Index>(k_hi - k_lo_ + 1);
            spectra_.assign(f.e.size(), Eigen::VectorXcd::Zero(n_bins_));
            power_ = Eigen::VectorXd::Zero(n_bins_);
            for (std::size_t c = 0; c < f.e.size(); ++c) {
                auto& spec = spectra_[c];
                for (Eigen::Index k = 0; k < n_bins_; ++k) {
                    const double w = bin_energy(k);
                    const cplx step = std::exp(cplx(0.0, w * f.dt / kHbarEvFs));
                    cplx phase = std::exp(cplx(0.0, w * f.t0 / kHbarEvFs));
                    cplx acc = 0.0;
                    for (Eigen::Index j = 0; j < f.samples; ++j, phase *= step) acc += phase * f.e[c][j];
                    spec[k] = f.dt * acc;
                }
                power_ += spec.cwiseAbs2();
            }
        }
    }

    bool uses_bins() const { return use_bins_; }

    // Upper bound on the filtered intensity at w relative to other w (zero means silent).
    double passband_power(double w) const {
        if (!use_bins_) return 1.0;
        double acc = 0.0;
        for_bins(w, [&](Eigen::Index k, double x) { acc += std::exp(-x * x / (w_ * w_)) * power_[k]; });
        return acc;
    }

    // Sum over channels of |E_f(t_j; w)|^2 for j in [lo, hi).
    Eigen::VectorXd intensity(double w, Eigen::Index lo, Eigen::Index hi) const {
        const Eigen::Index len = hi - lo;
        Eigen::VectorXd out = Eigen::VectorXd::Zero(len);
        if (use_bins_) {
            std::vector<Eigen::Index> ks;
            std::vector<cplx> step;
            std::vector<double> gain;
            for_bins(w, [&](Eigen::Index k, double x) {
                ks.push_back(k);
                gain.push_back(std::exp(-0.5 * x * x / (w_ * w_)));
                step.push_back(std::exp(cplx(0.0, -x * f_.dt / kHbarEvFs)));
            });
            const double norm = bin_ / (2.0 * std::numbers::pi * kHbarEvFs);
            const double t_lo = f_.t0 + f_.dt * static_cast<double>(lo);
            for (const auto& spec : spectra_) {
                std::vector<cplx> term(ks.size());
                for (std::size_t b = 0; b < ks.size(); ++b)
                    term[b] = norm * gain[b] * spec[ks[b]] *
                              std::exp(cplx(0.0, -(bin_energy(ks[b]) - w) * t_lo / kHbarEvFs));
                for (Eigen::Index j = 0; j < len; ++j) {
                    cplx acc = 0.0;
                    for (std::size_t b = 0; b < ks.size(); ++b) {
                        acc += term[b];
                        term[b] *= step[b];
                    }
                    out[j] += std::norm(acc);
                }
            }
            return out;
        }
        const Eigen::Index a = std::max<Eigen::Index>(0, lo - half_taps_);
        const Eigen::Index b = std::min<Eigen::Index>(f_.samples, hi + half_taps_);
        Eigen::VectorXd taps(2 * half_taps_ + 1);
        for (Eigen::Index m = -half_taps_; m <= half_taps_; ++m) {
            const double sfs = f_.dt * static_cast<double>(m);
            taps[m + half_taps_] = f_.dt * w_ / (std::sqrt(2.0 * std::numbers::pi) * kHbarEvFs) *
                                   std::exp(-0.5 * w_ * w_ * sfs * sfs / (kHbarEvFs * kHbarEvFs));
        }
        Eigen::VectorXcd u(b - a);
        const cplx step = std::exp(cplx(0.0, w * f_.dt / kHbarEvFs));
        for (const auto& e : f_.e) {
            cplx phase = std::exp(cplx(0.0, w * (f_.t0 + f_.dt * static_cast<double>(a)) / kHbarEvFs));
            for (Eigen::Index j = a; j < b; ++j, phase *= step) u[j - a] = phase * e[j];
            for (Eigen::Index j = lo; j < hi; ++j) {
                const Eigen::Index m0 = std::max<Eigen::Index>(a, j - half_taps_);
                const Eigen::Index m1 = std::min<Eigen::Index>(b - 1, j + half_taps_);
                cplx acc = 0.0;
                for (Eigen::Index m = m0; m <= m1; ++m) acc += taps[j - m + half_taps_] * u[m - a];
                out[j - lo] += std::norm(acc);
            }
        }
        return out;
    }

private:
    double bin_energy(Eigen::Index k) const { return bin_ * static_cast<double>(k_lo_ + k); }

    template <class Fn>
    void for_bins(double w, Fn&& fn) const {
        const double reach = kFilterCut * w_;
        const auto k0 = std::max<long>(0, static_cast<long>(std::ceil((w - reach) / bin_)) - k_lo_);
        const auto k1 = std::min<long>(n_bins_ - 1, static_cast<long>(std::floor((w + reach) / bin_)) - k_lo_);
        for (long k = k0; k <= k1; ++k) fn(static_cast<Eigen::Index>(k), bin_energy(k) - w);
    }

    const Fields& f_;
    double w_;
    Eigen::Index half_taps_ = 0;
    double bin_ = 0.0;
    bool use_bins_ = false;
    long k_lo_ = 0;
    Eigen::Index n_bins_ = 0;
    std::vector<Eigen::VectorXcd> spectra_;
    Eigen::VectorXd power_;
};

void frequency_then_time(const Fields& f, const ClassicalParams& params, const UniformAxis& omega, const UniformAxis& T,
                         int workers, Spectrum2D& out) {
    const double s = params.time_width_fs();
    const double w_det = params.detector_width_ev();
    const double g0 = params.gamma0_ev;

    // auxiliary omega grid carrying the dephasing-free signal; it contains every output point
    const double w_first = std::min(omega[0], omega.back());
    const double w_last = std::max(omega[0], omega.back());
    double h = std::min(w_det, g0) / 3.0;
    if (omega.size > 1) h = std::abs(omega.step) / std::ceil(std::abs(omega.step) / h);
    const double pad = std::ceil(kLorentzSpan * g0 / h) * h;
    const double lo_w = w_first - pad;
    const double hi_w = w_last + pad;
    const auto n_aux = static_cast<std::size_t>(std::llround((hi_w - lo_w) / h)) + 1;
    if (n_aux > kAuxLimit)
        throw Error(ErrorCode::BudgetExceeded, "classical",
                    std::to_string(n_aux) + " auxiliary frequencies; narrow the omega range or raise gamma0");
    const UniformAxis aux{lo_w, h, n_aux};

    const FilterBank bank(f, w_det, lo_w, hi_w);
    std::vector<double> pass(n_aux, 1.0);
    if (bank.uses_bins()) {
        for (std::size_t a = 0; a < n_aux; ++a) pass[a] = bank.passband_power(aux[a]);
        const double top = *std::max_element(pass.begin(), pass.end());
        for (auto& p : pass) p = (top > 0.0 && p > 1e-14 * top) ? 1.0 : 0.0;
    }

    const double dt = f.dt;
    const double reach = kIntensityCut * s;
    const auto j_lo = static_cast<Eigen::Index>(std::max(0.0, std::ceil((T[0] - reach - f.t0) / dt)));
    const auto j_hi = std::min<Eigen::Index>(
        f.samples, static_cast<Eigen::Index>(std::max(0.0, std::floor((T.back() + reach - f.t0) / dt) + 1)));
    Eigen::MatrixXd s0 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_aux), static_cast<Eigen::Index>(T.size));
    if (j_hi > j_lo) {
        parallel_for(n_aux, workers, [&](std::size_t a) {
            if (pass[a] == 0.0) return;
            const Eigen::VectorXd inten = bank.intensity(aux[a], j_lo, j_hi);
            for (std::size_t q = 0; q < T.size; ++q) {
                const auto lo = std::max<Eigen::Index>(
                    j_lo, static_cast<Eigen::Index>(std::ceil((T[q] - reach - f.t0) / dt)));
                const auto hi = std::min<Eigen::Index>(
                    j_hi, static_cast<Eigen::Index>(std::floor((T[q] + reach - f.t0) / dt)) + 1);
                double acc = 0.0;
                for (Eigen::Index j = lo; j < hi; ++j) {
                    const double u = (f.t0 + dt * static_cast<double>(j) - T[q]) / s;
                    acc += std::exp(-2.0 * u * u) * inten[j - j_lo];
                }
                s0(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(q)) = dt * acc;
            }
        });
    }

    // Lorentzian dephasing, kernel renormalised over the kept span
    for (std::size_t i = 0; i < omega.size; ++i) {
        const double w = omega[i];
        const auto centre = static_cast<std::size_t>(std::llround((w - lo_w) / h));
        const auto half = static_cast<std::size_t>(std::llround(pad / h));
        const std::size_t a0 = centre - half;
        const std::size_t a1 = std::min(n_aux - 1, centre + half);
        Eigen::VectorXd kernel(static_cast<Eigen::Index>(a1 - a0 + 1));
        for (std::size_t a = a0; a <= a1; ++a) {
            const double x = aux[a] - w;
            kernel[static_cast<Eigen::Index>(a - a0)] = 1.0 / (x * x + g0 * g0);
        }
        kernel /= kernel.sum();
        out.values.row(static_cast<Eigen::Index>(i)) =
            kernel.transpose() * s0.middleRows(static_cast<Eigen::Index>(a0), kernel.size());
    }
}

} // namespace

void ClassicalParams::validate() const {
    auto positive = [](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorCode::ConfigError, key, "must be > 0");
    };
    positive(sigma_t_inverse_fs, "classical.sigma_t_inverse_fs");
    positive(omega_inverse_fs, "classical.omega_inverse_fs");
    positive(sigma_omega_inverse_fs, "classical.sigma_omega_inverse_fs");
    positive(gamma0_ev, "classical.gamma0");
}

double ClassicalParams::detector_width_ev() const { return kHbarEvFs / sigma_omega_inverse_fs; }

double ClassicalParams::required_margin_fs() const {
    if (order == ClassicalOrder::TimeThenFrequency) return kAmpCut * time_width_fs();
    return kIntensityCut * time_width_fs() + kFilterCut * sigma_omega_inverse_fs;
}

Spectrum2D classical_gated_signal(const OverlapTable& table, const ClassicalParams& params, const UniformAxis& omega,
                                  const UniformAxis& T, int workers) {
    params.validate();
    if (omega.size == 0 || T.size == 0) throw Error(ErrorCode::InvalidValue, "grid", "empty omega or T grid");
    const double needed = std::max(T[0], T.back()) + params.required_margin_fs();
    if (table.grid.end() + 1e-9 < needed)
        throw Error(ErrorCode::TailNotConverged, "classical",
                    "overlaps end at " + format_double(table.grid.end()) + " fs, need " + format_double(needed) + " fs");
    const Fields fields = build_fields(table);
    Spectrum2D out{omega, T,
                   Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(omega.size), static_cast<Eigen::Index>(T.size)),
                   {}};
    const int w = resolve_workers(workers);
    if (params.order == ClassicalOrder::TimeThenFrequency) time_then_frequency(fields, params, omega, T, w, out);
    else frequency_then_time(fields, params, omega, T, w, out);
    out.metadata = {{"signal", "classical"},
                    {"order", params.order == ClassicalOrder::TimeThenFrequency ? "time_first" : "frequency_first"},
                    {"sigma_t_inverse_fs", format_double(params.sigma_t_inverse_fs)},
                    {"omega_inverse_fs", format_double(params.omega_inverse_fs)},
                    {"sigma_omega_inverse_fs", format_double(params.sigma_omega_inverse_fs)},
                    {"gamma0_ev", format_double(params.gamma0_ev)}};
    return out;
}

} // namespace qgs

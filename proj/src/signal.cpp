#include "qgs/signal.hpp"

#include <cmath>
#include <limits>

#include "qgs/config.hpp"
#include "qgs/error.hpp"
#include "qgs/parallel.hpp"
#include "qgs/units.hpp"

namespace qgs {

namespace {

using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatrixXcd = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t grid_index(const TimeGrid& grid, double t_fs) {
    const double x = (t_fs - grid.t0) / grid.dt;
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-6 || r < 0.0 || r > static_cast<double>(grid.steps))
        throw Error(ErrorCode::InvalidValue, "t_fs", std::to_string(t_fs) + " fs is not a point of the overlap grid");
    return static_cast<std::size_t>(r);
}

void check_gamma(double gamma_ev) {
    if (!(gamma_ev > 0.0) || !std::isfinite(gamma_ev)) throw Error(ErrorCode::InvalidValue, "gamma", "must be > 0");
}

bool silent_channel(const OverlapTable& table, std::size_t c) {
    return table.values.row(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff() == 0.0;
}

} // namespace

std::vector<cplx> windowed_emission_amplitude(const OverlapTable& table, double omega_ev, double t_fs,
                                              double gamma_ev, double tail_tol) {
    check_gamma(gamma_ev);
    const std::size_t j0 = grid_index(table.grid, t_fs);
    const double window = table.grid.end() - table.grid.time(j0);
    const double tail = std::exp(-gamma_ev * window / kHbarEvFs);
    if (tail > tail_tol)
        throw Error(ErrorCode::TailNotConverged, "gamma",
                    "exp(-gamma (s_max - t) / hbar) = " + std::to_string(tail) + " at t = " + std::to_string(t_fs));
    const double dt = table.grid.dt;
    const std::size_t n = table.grid.samples();
    std::vector<cplx> out(table.channels.size());
    for (std::size_t c = 0; c < table.channels.size(); ++c) {
        const cplx kappa = cplx(omega_ev + table.channel_energy(c), gamma_ev) / kHbarEvFs;
        cplx sum = 0.0;
        for (std::size_t j = j0; j < n; ++j) {
            const double w = (j == j0 || j + 1 == n) ? 0.5 * dt : dt;
            const double s = static_cast<double>(j - j0) * dt;
            sum += w * std::exp(cplx(0.0, 1.0) * kappa * s) * table.values(static_cast<Eigen::Index>(c),
                                                                          static_cast<Eigen::Index>(j));
        }
        out[c] = sum;
    }
    return out;
}

Eigen::VectorXcd windowed_emission_series(const OverlapTable& table, std::size_t channel, double omega_ev,
                                          double gamma_ev) {
    const auto n = static_cast<Eigen::Index>(table.grid.samples());
    const double dt = table.grid.dt;
    const cplx kappa = cplx(omega_ev + table.channel_energy(channel), gamma_ev) / kHbarEvFs;
    const cplx r = std::exp(cplx(0.0, 1.0) * kappa * dt);
    const auto o = table.values.row(static_cast<Eigen::Index>(channel));
    Eigen::VectorXcd a(n);
    a[n - 1] = 0.0;
    for (Eigen::Index j = n - 2; j >= 0; --j) a[j] = 0.5 * dt * o[j] + r * (0.5 * dt * o[j + 1] + a[j + 1]);
    return a;
}

Spectrum2D Spectrum2D::normalized() const {
    Spectrum2D s = *this;
    const double m = max();
    if (m > 0.0) s.values /= m;
    return s;
}

std::vector<double> Spectrum2D::column(std::size_t t_index) const {
    const auto c = values.col(static_cast<Eigen::Index>(t_index));
    return {c.data(), c.data() + c.size()};
}

std::vector<double> Spectrum2D::row(std::size_t w_index) const {
    std::vector<double> r(T.size);
    for (std::size_t q = 0; q < T.size; ++q)
        r[q] = values(static_cast<Eigen::Index>(w_index), static_cast<Eigen::Index>(q));
    return r;
}

double required_signal_time(const GateParams& gates, const UniformAxis& T, const SignalOptions& options) {
    const double u_c = std::sqrt(-std::log(options.gate_cutoff));
    const double t_gate = T.back() + u_c * gates.tau_fs;
    return t_gate + kHbarEvFs / gates.gamma_ev() * std::log(1.0 / options.tail_tol);
}

Spectrum2D trqgs_signal(const OverlapTable& table, const GateParams& gates, const UniformAxis& omega,
                        const UniformAxis& T, const SignalOptions& options) {
    gates.validate();
    if (omega.size == 0 || T.size == 0) throw Error(ErrorCode::InvalidValue, "grid", "empty omega or T grid");
    if (!(options.gate_cutoff > 0.0 && options.gate_cutoff < 1.0))
        throw Error(ErrorCode::InvalidValue, "gate_cutoff", "must lie in (0, 1)");
    const double gamma = gates.gamma_ev();
    const double tau = gates.tau_fs;
    const double dt = table.grid.dt;
    const double u_c = std::sqrt(-std::log(options.gate_cutoff));

    const double needed = required_signal_time(gates, T, options);
    if (table.grid.end() + 1e-9 < needed)
        throw Error(ErrorCode::TailNotConverged, "duration",
                    "overlap series ends at " + std::to_string(table.grid.end()) + " fs, need " +
                        std::to_string(needed) + " fs");
    const double t_gate = T.back() + u_c * tau;
    const auto j_count = std::min<std::size_t>(
        table.grid.samples(), static_cast<std::size_t>(std::ceil((t_gate - table.grid.t0) / dt)) + 1);
    const auto nw = static_cast<Eigen::Index>(omega.size);
    const int workers = resolve_workers(options.workers);

    // gate window [lo, hi) of t-indices for a given T and its weights
    auto window = [&](double t_center, std::vector<double>& wts, std::vector<cplx>* phased) {
        const double lo_t = t_center - u_c * tau, hi_t = t_center + u_c * tau;
        const auto lo = static_cast<std::size_t>(std::max(0.0, std::ceil((lo_t - table.grid.t0) / dt)));
        const auto hi = std::min<std::size_t>(
            j_count, static_cast<std::size_t>(std::max(0.0, std::floor((hi_t - table.grid.t0) / dt) + 1.0)));
        wts.clear();
        if (phased) phased->clear();
        for (std::size_t j = lo; j < hi; ++j) {
            const double t = table.grid.time(j);
            const double w = (j == 0 ? 0.5 : 1.0) * dt;
            const cplx m = time_gate((t_center - t) / tau, gates);
            wts.push_back(w * std::norm(m));
            if (phased) phased->push_back(w * m);
        }
        return lo;
    };

    Spectrum2D out{omega, T, Eigen::MatrixXd::Zero(nw, static_cast<Eigen::Index>(T.size)), {}};
    if (options.mode == GateMode::Incoherent) {
        RowMatrixXd p = RowMatrixXd::Zero(static_cast<Eigen::Index>(j_count), nw);
        parallel_for(omega.size, workers, [&](std::size_t i) {
            for (std::size_t c = 0; c < table.channels.size(); ++c) {
                if (silent_channel(table, c)) continue;
                const auto a = windowed_emission_series(table, c, omega[i], gamma);
                for (std::size_t j = 0; j < j_count; ++j)
                    p(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) +=
                        std::norm(a[static_cast<Eigen::Index>(j)]);
            }
        });
        parallel_for(T.size, workers, [&](std::size_t q) {
            std::vector<double> wts;
            const std::size_t lo = window(T[q], wts, nullptr);
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(nw);
            for (std::size_t k = 0; k < wts.size(); ++k)
                acc += wts[k] * p.row(static_cast<Eigen::Index>(lo + k)).transpose();
            out.values.col(static_cast<Eigen::Index>(q)) = acc / tau;
        });
    } else {
        const double e_frame = options.frame_energy_set ? options.frame_energy_ev : table.ground_energy_ev;
        RowMatrixXcd a_c(static_cast<Eigen::Index>(j_count), nw);
        for (std::size_t c = 0; c < table.channels.size(); ++c) {
            if (silent_channel(table, c)) continue;
            parallel_for(omega.size, workers, [&](std::size_t i) {
                const auto a = windowed_emission_series(table, c, omega[i], gamma);
                for (std::size_t j = 0; j < j_count; ++j) {
                    const double t = table.grid.time(j);
                    a_c(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
                        std::exp(cplx(0.0, e_frame * t / kHbarEvFs)) * a[static_cast<Eigen::Index>(j)];
                }
            });
            parallel_for(T.size, workers, [&](std::size_t q) {
                std::vector<double> wts;
                std::vector<cplx> gate;
                const std::size_t lo = window(T[q], wts, &gate);
                Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(nw);
                for (std::size_t k = 0; k < gate.size(); ++k)
                    acc += gate[k] * a_c.row(static_cast<Eigen::Index>(lo + k)).transpose();
                out.values.col(static_cast<Eigen::Index>(q)) += acc.cwiseAbs2() / tau;
            });
        }
    }
    out.metadata = {{"signal", "trqgs"},
                    {"gate_mode", options.mode == GateMode::Incoherent ? "incoherent" : "coherent"},
                    {"tau_fs", format_double(tau)},
                    {"gamma0_ev", format_double(gates.gamma0_ev)},
                    {"gamma_d_ev", format_double(gates.gamma_d_ev)},
                    {"phase_flag", gates.carrier_phase ? "true" : "false"},
                    {"channels", std::to_string(table.channels.size())}};
    return out;
}

Spectrum2D rescale_band(const Spectrum2D& s, double omega_threshold_ev, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw Error(ErrorCode::InvalidValue, "rescale.factor", "must be > 0");
    Spectrum2D out = s;
    bool touched = false;
    for (std::size_t i = 0; i < s.omega.size; ++i)
        if (s.omega[i] > omega_threshold_ev) {
            out.values.row(static_cast<Eigen::Index>(i)) *= factor;
            touched = true;
        }
    if (touched && factor != 1.0)
        out.metadata.emplace_back("rescale", "omega > " + format_double(omega_threshold_ev) + " eV x" +
                                                 format_double(factor));
    return out;
}

} // namespace qgs

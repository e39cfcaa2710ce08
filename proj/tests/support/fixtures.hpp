// Small models and synthetic emitters shared by the unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>

#include "qgs/analysis.hpp"
#include "qgs/model.hpp"
#include "qgs/signal.hpp"
#include "qgs/units.hpp"

namespace qgs::test {

// One monomer, S1/S2 with the given gaps and dipoles, one idle mode truncated at n = 0.
inline VibronicModel two_level(double eps1, double eps2, double mu1, double mu2) {
    VibronicModel m;
    m.id = "two_level";
    m.state_energies_ev = {eps1, eps2};
    m.transition_dipoles = {mu1, mu2};
    VibrationalMode idle;
    idle.name = "idle";
    idle.frequency_ev = 0.1;
    idle.default_cutoff = 0;
    m.modes.push_back(idle);
    return m;
}

// Single-channel table with E(t) = O(t) (zero channel and ground energies).
template <class Fn>
OverlapTable synthetic_emitter(double duration_fs, double dt_fs, Fn&& amplitude) {
    OverlapTable t;
    t.grid = TimeGrid::from_duration(duration_fs, dt_fs);
    t.channels.push_back({{0}, 0.0, 0});
    t.values.resize(1, static_cast<Eigen::Index>(t.grid.samples()));
    for (std::size_t j = 0; j < t.grid.samples(); ++j)
        t.values(0, static_cast<Eigen::Index>(j)) = amplitude(j, t.grid.time(j));
    return t;
}

struct Resolution {
    double time_fs = 0.0;   // 1/e half-width of an impulse along T
    double energy_ev = 0.0; // 1/e half-width of a monochromatic line along omega
    double product() const { return time_fs * energy_ev; }
};

// Extracts the time and frequency resolution of a classical gate setting from
// an impulsive and a monochromatic emitter. The grids are sized from the gate
// parameters only.
inline Resolution classical_resolution(const ClassicalParams& p) {
    const double dt = 0.2, level = std::exp(-1.0);
    const double scale = p.time_width_fs() + p.sigma_omega_inverse_fs;
    const double margin = p.required_margin_fs();
    Resolution r;
    {
        const double t_imp = 6.0 * scale;
        const auto j_imp = static_cast<std::size_t>(std::llround(t_imp / dt));
        const auto table = synthetic_emitter(12.0 * scale + margin + dt, dt, [&](std::size_t j, double) {
            return cplx(j == j_imp ? 1.0 / dt : 0.0, 0.0);
        });
        const auto T = UniformAxis::span(0.0, 12.0 * scale, 601);
        const auto s = classical_gated_signal(table, p, UniformAxis::span(2.0, 2.0, 1), T);
        r.time_fs = peak_half_width(T.values(), s.row(0), level);
    }
    {
        const double eps = 2.0;
        const double reach = 4.0 * (p.detector_width_ev() + p.gamma0_ev);
        const double t_c = margin + 10.0;
        const auto table = synthetic_emitter(t_c + margin + dt, dt, [&](std::size_t, double t) {
            return std::exp(cplx(0.0, -eps * t / kHbarEvFs));
        });
        const auto omega = UniformAxis::span(eps - reach, eps + reach, 1601);
        const auto s = classical_gated_signal(table, p, omega, UniformAxis::span(t_c, t_c, 1));
        r.energy_ev = peak_half_width(omega.values(), s.column(0), level);
    }
    return r;
}

} // namespace qgs::test

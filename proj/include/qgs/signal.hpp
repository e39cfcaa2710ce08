// signal.hpp: emission overlaps, the tr-QGS coincidence spectrum, the classical
// gated-fluorescence spectrogram and the brute-force coincidence oracle

#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "qgs/dynamics.hpp"
#include "qgs/grid.hpp"
#include "qgs/photonics.hpp"

namespace qgs {

// Vibrational state |G, nu> on the ground electronic surface.
struct FinalChannel {
    std::vector<int> occupations; // one entry per mode instance
    double energy_ev = 0.0;       // sum nu_k w_k (zero point excluded)
    std::size_t id = 0;
};

inline constexpr std::size_t kDefaultChannelBudget = 100'000;

// All nu with sum nu_k <= n_f, ordered by total occupation, then lexicographically
// with larger occupations on earlier instances first.
std::vector<FinalChannel> enumerate_final_channels(const VibronicModel& model, int n_f,
                                                   std::size_t budget = kDefaultChannelBudget);

// Vibrational indices of the channels; ChannelNotInBasis if nu exceeds the truncation.
std::vector<std::size_t> overlap_vib_indices(const ProductBasis& basis, const std::vector<FinalChannel>& channels);

// O_nu(s) = <G, nu| V |phi(s)>, phi(s) = U(s) V^dag |G, 0>.
//
// Binary layout (little-endian): 8-byte magic "QGSOVL1\0", u64 n_channels,
// u64 n_steps, f64 dt_fs, f64 t0_fs, f64 ground_energy_ev, u32 n_instances,
// then per channel n_instances i32 occupations and f64 energy_ev, then the
// samples channel-major as (f64 re, f64 im) pairs, n_steps + 1 per channel.
struct OverlapTable {
    TimeGrid grid;
    std::vector<FinalChannel> channels;
    Eigen::MatrixXcd values;        // channels x samples
    double ground_energy_ev = 0.0;  // E0 + zero point, energy of |G, 0>

    double channel_energy(std::size_t c) const { return ground_energy_ev + channels[c].energy_ev; }
    void write(const std::filesystem::path& path) const;
    static OverlapTable read(const std::filesystem::path& path);
};

// Wraps the overlap recorder of a trajectory. Throws InvalidValue when the
// Condon invariant O_nu(0) = 0 (nu != 0) fails.
OverlapTable record_overlaps(const Trajectory& trajectory, const VibronicModel& model,
                             const std::vector<FinalChannel>& channels);

// Propagates V^dag |G, 0> over grid recording only the channel overlaps.
OverlapTable propagate_overlaps(const VibronicModel& model, const ProductBasis& basis,
                                const std::vector<FinalChannel>& channels, const TimeGrid& grid,
                                const PropagationOptions& options = {});

// A_nu(w, t) = int_0^{s_max - t} dt' exp(i (w + E_nu + i gamma) t' / hbar) O_nu(t + t'),
// trapezoid rule on the table grid. t must be a grid point. TailNotConverged when
// exp(-gamma (s_max - t) / hbar) exceeds tail_tol.
std::vector<cplx> windowed_emission_amplitude(const OverlapTable& table, double omega_ev, double t_fs,
                                              double gamma_ev, double tail_tol = 1e-6);

// A_nu(w, t_j) for every grid point j by a backward recursion over the table.
Eigen::VectorXcd windowed_emission_series(const OverlapTable& table, std::size_t channel, double omega_ev,
                                          double gamma_ev);

struct Spectrum2D {
    UniformAxis omega; // eV, rows
    UniformAxis T;     // fs, columns
    Eigen::MatrixXd values;
    std::vector<std::pair<std::string, std::string>> metadata;

    double max() const { return values.size() ? values.maxCoeff() : 0.0; }
    // Scaled so the maximum is 1 (unchanged when identically zero).
    Spectrum2D normalized() const;
    std::vector<double> column(std::size_t t_index) const; // S(., T)
    std::vector<double> row(std::size_t w_index) const;    // S(w, .)
};

enum class GateMode {
    // |M|^2 weights the emission probability: S = (1/tau) sum_t dt |M|^2 sum_nu |A_nu|^2
    Incoherent,
    // amplitude gate: S = (1/tau) sum_nu |sum_t dt exp(i E_f t / hbar) A_nu M|^2
    Coherent,
};

struct SignalOptions {
    GateMode mode = GateMode::Incoherent;
    bool frame_energy_set = false;
    double frame_energy_ev = 0.0; // E_f of the coherent mode; defaults to E(|G,0>)
    double tail_tol = 1e-6;
    double gate_cutoff = 1e-6;    // |M| below this is dropped
    int workers = 1;
};

// Time support [0, T_max + u_c tau] is needed, u_c = sqrt(-ln gate_cutoff).
double required_signal_time(const GateParams& gates, const UniformAxis& T, const SignalOptions& options = {});

Spectrum2D trqgs_signal(const OverlapTable& table, const GateParams& gates, const UniformAxis& omega,
                        const UniformAxis& T, const SignalOptions& options = {});

// Time and frequency gate of the classical comparator.
enum class ClassicalOrder {
    // spectrometer on the field amplitude, then time-gated intensity detection
    FrequencyThenTime,
    // time-gated field, spectrogram, power convolved with the detector window
    TimeThenFrequency,
};

struct ClassicalParams {
    double sigma_t_inverse_fs = 3.5;
    double omega_inverse_fs = 3.5;
    double sigma_omega_inverse_fs = 0.5;
    double gamma0_ev = 0.41;
    ClassicalOrder order = ClassicalOrder::FrequencyThenTime;

    void validate() const; // ConfigError unless every width > 0
    double time_width_fs() const { return sigma_t_inverse_fs + omega_inverse_fs; }
    double detector_width_ev() const; // hbar / sigma_omega^-1
    // Field support needed beyond T_max (gate tail plus filter response).
    double required_margin_fs() const;
};

// Field E_nu(t) = exp(i E_nu t / hbar) O_nu(t); time gate G(u) = exp(-u^2 / s^2),
// s = sigma_T^-1 + Omega^-1; detector power window exp(-x^2 / W^2), W = hbar / sigma_omega^-1;
// gamma0 dephases the field, exp(-gamma0 |s| / hbar) on its two-time correlation, which is a
// Lorentzian of HWHM gamma0 along omega.
//   FrequencyThenTime: S(w, T) = sum_nu int dt G(t - T)^2 |int dt' h(t - t') e^{i w t'/hbar} E_nu(t')|^2
//                      with h the unit-gain filter response of the window, then the Lorentzian.
//   TimeThenFrequency: sum_nu |int dt e^{i w t/hbar} G(t - T) E_nu(t)|^2 convolved with the
//                      unit-area window and the Lorentzian.
// TailNotConverged when the table ends before T_max + required_margin_fs().
Spectrum2D classical_gated_signal(const OverlapTable& table, const ClassicalParams& params, const UniformAxis& omega,
                                  const UniformAxis& T, int workers = 1);

struct OracleGrids {
    std::size_t t_points = 16;   // detection time t (idler arrival)
    std::size_t t2_points = 32;  // absorption times t1, t2
    std::size_t t4_points = 64;  // emission times t3, t4
    double t_halfwidth_sigmas = 3.0;
    double t2_halfwidth_taus = 3.5;
    double emission_decay_lifetimes = 8.0;
};

struct OracleResult {
    Spectrum2D spectrum;       // real part
    double max_imag_ratio = 0; // max |Im S| / max |Re S|
};

// Direct quadrature of the fourth-order coincidence signal with the factored
// six-point field correlation, f the numerical 2-D Fourier transform of the JSA,
// T_s = 0 and T_i = T. Needs dimension <= 50 and <= 64 points per time axis
// (BudgetExceeded otherwise).
OracleResult brute_force_coincidence(const VibronicModel& model, const FockTruncation& trunc, const JsaParams& jsa,
                                     double gamma_ev, const UniformAxis& omega, const UniformAxis& T,
                                     const OracleGrids& grids = {});

// Values at w > threshold multiplied by factor (> 0); annotation added to metadata.
Spectrum2D rescale_band(const Spectrum2D& s, double omega_threshold_ev, double factor);

} // namespace qgs

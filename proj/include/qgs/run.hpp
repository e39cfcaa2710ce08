// run.hpp: run configuration, sweep expansion and the four pipelines behind qgs-sim
//
// A run file is a KeyValueDocument:
//   [run]         kind (dynamics | qgs | classical | jsa), model, output, workers, name
//   [propagation] duration_fs (number or "auto"), dt_fs, krylov_dim, krylov_tol, conservation_tol
//   [fock]        nmax (one value per mode, replicated on every monomer) or uniform_nmax
//   [channels]    n_f
//   [spectrum]    omega_min_ev, omega_max_ev, omega_points, delay_min_fs, delay_max_fs,
//                 delay_points, rescale_threshold_ev, rescale_factor
//   [gate]        tau_fs, gamma0_*, gamma_d_*, phase_flag, omega_minus_ev, mode, frame_energy_ev, tail_tol
//   [classical]   sigma_t_inverse_fs, omega_inverse_fs, sigma_omega_inverse_fs, gamma0_*,
//                 order (frequency_first | time_first)
//   [jsa]         omega_plus_ev, omega_minus_ev, sigma_inverse_fs, tau_fs, points_per_width, widths
// A comma list in [gate], [classical], [jsa] or [spectrum] is a sweep; the
// cartesian product of all lists runs as independent members in sub-directories.
// Relative paths resolve against the directory of the run file.

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "qgs/config.hpp"
#include "qgs/model.hpp"

namespace qgs {

inline constexpr const char* kVersion = "0.1.0";

enum class RunKind { Dynamics, Qgs, Classical, Jsa };

RunKind parse_run_kind(std::string_view text);
const char* run_kind_name(RunKind kind);

struct RunConfig {
    KeyValueDocument doc;
    std::filesystem::path base_dir; // for relative paths
    RunKind kind = RunKind::Dynamics;
    std::filesystem::path model_path;
    std::filesystem::path output;
    int workers = 0; // 0: QGS_SIM_WORKERS, else 1
};

// ConfigError for unreadable files, unknown kinds or a missing model file.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

struct SweepMember {
    std::string label; // "" when nothing is swept, else "key-value_key-value"
    KeyValueDocument doc;
};
std::vector<SweepMember> expand_sweeps(const KeyValueDocument& doc);

struct RunReport {
    std::vector<std::filesystem::path> directories; // one per member
    std::vector<std::string> lines;                 // human-readable summary
};

using Logger = std::function<void(const std::string&)>;

RunReport run_dynamics(const RunConfig& cfg, const Logger& log = {});
RunReport run_qgs(const RunConfig& cfg, const Logger& log = {});
RunReport run_classical(const RunConfig& cfg, const Logger& log = {});
RunReport run_jsa(const RunConfig& cfg, const Logger& log = {});
RunReport run(const RunConfig& cfg, const Logger& log = {});

} // namespace qgs

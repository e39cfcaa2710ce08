// export.hpp: CSV tables and SVG heatmaps

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qgs/dynamics.hpp"
#include "qgs/photonics.hpp"
#include "qgs/signal.hpp"

namespace qgs {

// t_fs, rho_s1s1, rho_s2s2, re_rho_s1s2, im_rho_s1s2, q1..qK (mean over monomers), norm, energy_ev
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, int modes_per_monomer);

// t_fs, m1_s1, m1_s2, m2_s1, ...
void write_monomer_populations_csv(const std::filesystem::path& path, const Trajectory& traj);

// Long form: omega_ev, T_fs, value_raw, value_norm
void write_spectrum_csv(const std::filesystem::path& path, const Spectrum2D& s);

// First row: "omega_s_ev\omega_i_ev" then idler values; each further row starts with its signal value.
void write_jsa_csv(const std::filesystem::path& path, const JsaGrid& grid);

struct HeatmapLabels {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::string annotation;
};

// values(i, j) drawn at (x[j], y[i]); large grids are block-averaged to at most 240 cells per axis.
std::string render_heatmap_svg(const std::vector<double>& x, const std::vector<double>& y,
                               const Eigen::MatrixXd& values, const HeatmapLabels& labels);
void write_text(const std::filesystem::path& path, const std::string& text);

// Spectrum heatmap: T on x, omega on y.
void write_spectrum_svg(const std::filesystem::path& path, const Spectrum2D& s, const std::string& title);

} // namespace qgs

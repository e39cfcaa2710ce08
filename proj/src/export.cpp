#include "qgs/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "qgs/error.hpp"

namespace qgs {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::IoError, path.string(), "cannot open for writing");
    return os;
}

// viridis anchor colours, linearly interpolated
std::string colour(double v) {
    static const double stops[][3] = {{68, 1, 84},   {59, 82, 139},  {33, 145, 140},
                                      {94, 201, 98}, {253, 231, 37}};
    v = std::clamp(std::isfinite(v) ? v : 0.0, 0.0, 1.0) * 4.0;
    const int k = std::min(3, static_cast<int>(v));
    const double f = v - k;
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(stops[k][0] + f * (stops[k + 1][0] - stops[k][0]))),
                  static_cast<int>(std::lround(stops[k][1] + f * (stops[k + 1][1] - stops[k][1]))),
                  static_cast<int>(std::lround(stops[k][2] + f * (stops[k + 1][2] - stops[k][2]))));
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

} // namespace

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto os = open_out(path);
    os << text;
    if (!os) throw Error(ErrorCode::IoError, path.string(), "write failed");
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, int modes_per_monomer) {
    auto os = open_out(path);
    os << "t_fs,rho_s1s1,rho_s2s2,re_rho_s1s2,im_rho_s1s2";
    for (int k = 0; k < modes_per_monomer; ++k) os << ",q" << k + 1;
    os << ",norm,energy_ev\n";
    for (std::size_t i = 0; i < traj.grid.samples(); ++i) {
        const auto& r = traj.rdm[i].aggregate;
        os << num(traj.grid.time(i)) << ',' << num(r(0, 0).real()) << ',' << num(r(1, 1).real()) << ','
           << num(r(0, 1).real()) << ',' << num(r(0, 1).imag());
        for (int k = 0; k < modes_per_monomer; ++k) os << ',' << num(traj.mode_mean(i, k, modes_per_monomer));
        os << ',' << num(traj.norm[i]) << ',' << num(traj.energy[i]) << '\n';
    }
    if (!os) throw Error(ErrorCode::IoError, path.string(), "write failed");
}

void write_monomer_populations_csv(const std::filesystem::path& path, const Trajectory& traj) {
    auto os = open_out(path);
    const std::size_t n_mon = traj.rdm.empty() ? 0 : traj.rdm.front().per_monomer.size();
    os << "t_fs";
    for (std::size_t m = 0; m < n_mon; ++m) os << ",m" << m + 1 << "_s1,m" << m + 1 << "_s2";
    os << '\n';
    for (std::size_t i = 0; i < traj.grid.samples(); ++i) {
        os << num(traj.grid.time(i));
        for (const auto& r : traj.rdm[i].per_monomer) os << ',' << num(r(0, 0).real()) << ',' << num(r(1, 1).real());
        os << '\n';
    }
    if (!os) throw Error(ErrorCode::IoError, path.string(), "write failed");
}

void write_spectrum_csv(const std::filesystem::path& path, const Spectrum2D& s) {
    auto os = open_out(path);
    const double m = s.max();
    os << "omega_ev,T_fs,value_raw,value_norm\n";
    for (std::size_t i = 0; i < s.omega.size; ++i)
        for (std::size_t q = 0; q < s.T.size; ++q) {
            const double v = s.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(q));
            os << num(s.omega[i]) << ',' << num(s.T[q]) << ',' << num(v) << ',' << num(m > 0.0 ? v / m : 0.0) << '\n';
        }
    if (!os) throw Error(ErrorCode::IoError, path.string(), "write failed");
}

void write_jsa_csv(const std::filesystem::path& path, const JsaGrid& grid) {
    auto os = open_out(path);
    os << "omega_s_ev\\omega_i_ev";
    for (std::size_t j = 0; j < grid.idler.size; ++j) os << ',' << num(grid.idler[j]);
    os << '\n';
    for (std::size_t i = 0; i < grid.signal.size; ++i) {
        os << num(grid.signal[i]);
        for (std::size_t j = 0; j < grid.idler.size; ++j)
            os << ',' << num(grid.magnitude(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        os << '\n';
    }
    if (!os) throw Error(ErrorCode::IoError, path.string(), "write failed");
}

std::string render_heatmap_svg(const std::vector<double>& x, const std::vector<double>& y,
                               const Eigen::MatrixXd& values, const HeatmapLabels& labels) {
    constexpr int kMaxCells = 240;
    constexpr double left = 80, top = 40, width = 480, height = 360;
    const auto rows = values.rows(), cols = values.cols();
    const Eigen::Index by = std::max<Eigen::Index>(1, (rows + kMaxCells - 1) / kMaxCells);
    const Eigen::Index bx = std::max<Eigen::Index>(1, (cols + kMaxCells - 1) / kMaxCells);
    const Eigen::Index ny = (rows + by - 1) / by, nx = (cols + bx - 1) / bx;
    Eigen::MatrixXd cells(ny, nx);
    for (Eigen::Index i = 0; i < ny; ++i)
        for (Eigen::Index j = 0; j < nx; ++j) {
            const auto h = std::min(by, rows - i * by), w = std::min(bx, cols - j * bx);
            cells(i, j) = values.block(i * by, j * bx, h, w).mean();
        }
    const double lo = cells.size() ? cells.minCoeff() : 0.0;
    const double hi = cells.size() ? cells.maxCoeff() : 1.0;
    const double span = hi > lo ? hi - lo : 1.0;

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"470\" font-family=\"sans-serif\" "
          "font-size=\"12\">\n";
    os << "<text x=\"" << left + width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(labels.title) << "</text>\n";
    const double cw = width / static_cast<double>(std::max<Eigen::Index>(nx, 1));
    const double ch = height / static_cast<double>(std::max<Eigen::Index>(ny, 1));
    os << "<g shape-rendering=\"crispEdges\">\n";
    for (Eigen::Index i = 0; i < ny; ++i)
        for (Eigen::Index j = 0; j < nx; ++j)
            os << "<rect x=\"" << num(left + j * cw) << "\" y=\"" << num(top + height - (i + 1) * ch) << "\" width=\""
               << num(cw + 0.05) << "\" height=\"" << num(ch + 0.05) << "\" fill=\""
               << colour((cells(i, j) - lo) / span) << "\"/>\n";
    os << "</g>\n";
    os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width << "\" height=\"" << height
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    auto ticks = [&](const std::vector<double>& v, bool horizontal) {
        if (v.empty()) return;
        for (int k = 0; k <= 4; ++k) {
            const double f = k / 4.0;
            const double val = v.front() + f * (v.back() - v.front());
            if (horizontal)
                os << "<text x=\"" << num(left + f * width) << "\" y=\"" << top + height + 16
                   << "\" text-anchor=\"middle\">" << num(std::round(val * 1000) / 1000) << "</text>\n";
            else
                os << "<text x=\"" << left - 6 << "\" y=\"" << num(top + height - f * height + 4)
                   << "\" text-anchor=\"end\">" << num(std::round(val * 1000) / 1000) << "</text>\n";
        }
    };
    ticks(x, true);
    ticks(y, false);
    os << "<text x=\"" << left + width / 2 << "\" y=\"" << top + height + 36 << "\" text-anchor=\"middle\">"
       << escape(labels.x_label) << "</text>\n";
    os << "<text transform=\"translate(22," << top + height / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(labels.y_label) << "</text>\n";
    if (!labels.annotation.empty())
        os << "<text x=\"" << left << "\" y=\"" << top + height + 56 << "\">" << escape(labels.annotation)
           << "</text>\n";
    os << "</svg>\n";
    return os.str();
}

void write_spectrum_svg(const std::filesystem::path& path, const Spectrum2D& s, const std::string& title) {
    std::string note;
    for (const auto& [k, v] : s.metadata)
        if (k == "rescale") note += (note.empty() ? "" : "; ") + ("rescaled " + v);
    write_text(path, render_heatmap_svg(s.T.values(), s.omega.values(), s.values,
                                        {title, "T (fs)", "omega (eV)", note}));
}

} // namespace qgs

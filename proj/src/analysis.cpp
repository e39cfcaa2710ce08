#include "qgs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "qgs/error.hpp"
#include "qgs/units.hpp"

namespace qgs {

BandPeak dominant_frequency(const std::vector<double>& series, double dt_fs, double e_min_ev, double e_max_ev,
                            int pad) {
    const std::size_t n = series.size();
    if (n < 4 || !(dt_fs > 0.0) || pad < 1) throw Error(ErrorCode::InvalidValue, "dft", "need >= 4 samples, dt > 0");
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> x(n);
    double wsum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double w = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n - 1));
        x[i] = w * (series[i] - mean);
        wsum += w;
    }
    BandPeak best;
    best.bin_ev = kTwoPi * kHbarEvFs / (static_cast<double>(n) * dt_fs);
    const double step = best.bin_ev / pad;
    for (double e = std::ceil(e_min_ev / step) * step; e <= e_max_ev + 1e-12; e += step) {
        const std::complex<double> rot = std::polar(1.0, -e * dt_fs / kHbarEvFs);
        std::complex<double> ph = 1.0, acc = 0.0;
        for (std::size_t i = 0; i < n; ++i, ph *= rot) acc += x[i] * ph;
        const double amp = 2.0 * std::abs(acc) / wsum;
        if (amp > best.amplitude) {
            best.amplitude = amp;
            best.energy_ev = e;
        }
    }
    return best;
}

std::vector<std::size_t> local_maxima(const std::vector<double>& y, double min_prominence) {
    std::vector<std::size_t> out;
    if (y.size() < 3) return out;
    const double top = *std::max_element(y.begin(), y.end());
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        double left = y[i], right = y[i];
        for (std::size_t k = i; k-- > 0;) {
            if (y[k] > y[i]) break;
            left = std::min(left, y[k]);
        }
        for (std::size_t k = i + 1; k < y.size(); ++k) {
            if (y[k] > y[i]) break;
            right = std::min(right, y[k]);
        }
        if (y[i] - std::max(left, right) >= min_prominence * top) out.push_back(i);
    }
    return out;
}

std::size_t argmax(const std::vector<double>& y) {
    return static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
}

double peak_half_width(const std::vector<double>& x, const std::vector<double>& y, double level) {
    const std::size_t p = argmax(y);
    const double cut = level * y[p];
    double left = std::numeric_limits<double>::quiet_NaN(), right = left;
    for (std::size_t k = p; k-- > 0;)
        if (y[k] <= cut) {
            left = x[k] + (cut - y[k]) / (y[k + 1] - y[k]) * (x[k + 1] - x[k]);
            break;
        }
    for (std::size_t k = p + 1; k < y.size(); ++k)
        if (y[k] <= cut) {
            right = x[k - 1] + (y[k - 1] - cut) / (y[k - 1] - y[k]) * (x[k] - x[k - 1]);
            break;
        }
    return 0.5 * (right - left);
}

} // namespace qgs

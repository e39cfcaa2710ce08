// analysis.hpp: spectral estimates and peak/width extraction on sampled series

#pragma once

#include <cstddef>
#include <vector>

namespace qgs {

struct BandPeak {
    double energy_ev = 0.0;  // hbar * angular frequency of the strongest component
    double amplitude = 0.0;  // cosine amplitude estimate of that component
    double bin_ev = 0.0;     // natural resolution 2 pi hbar / (N dt)
};

// Strongest Fourier component of a real series with energy in [e_min, e_max].
// The mean is removed and a Hann window applied; the DFT is evaluated on a grid
// refined pad times beyond the natural bin.
BandPeak dominant_frequency(const std::vector<double>& series, double dt_fs, double e_min_ev, double e_max_ev,
                            int pad = 4);

// Interior local maxima whose prominence is at least min_prominence * max(y).
std::vector<std::size_t> local_maxima(const std::vector<double>& y, double min_prominence = 0.01);

// Half-width of the global peak where y drops to level * max(y), by linear
// interpolation between samples. NaN when the peak does not drop to level on both sides.
double peak_half_width(const std::vector<double>& x, const std::vector<double>& y, double level);

std::size_t argmax(const std::vector<double>& y);

} // namespace qgs

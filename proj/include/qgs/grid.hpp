// grid.hpp: uniform 1-D axes and trapezoid weights

#pragma once

#include <cstddef>
#include <vector>

namespace qgs {

struct UniformAxis {
    double start = 0.0;
    double step = 0.0;
    std::size_t size = 0;

    // n >= 2 points spanning [lo, hi]; n == 1 gives the single point lo.
    static UniformAxis span(double lo, double hi, std::size_t n) {
        return {lo, n > 1 ? (hi - lo) / static_cast<double>(n - 1) : 0.0, n};
    }
    double operator[](std::size_t i) const { return start + step * static_cast<double>(i); }
    double back() const { return (*this)[size - 1]; }
    double trapezoid_weight(std::size_t i) const {
        if (size < 2) return 1.0;
        return (i == 0 || i + 1 == size) ? 0.5 * step : step;
    }
    std::vector<double> values() const {
        std::vector<double> v(size);
        for (std::size_t i = 0; i < size; ++i) v[i] = (*this)[i];
        return v;
    }
};

} // namespace qgs

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "latentpde/grid.hpp"

namespace latentpde::testing {

// Random real band-limited field as an explicit mode list, so values and
// derivatives can be evaluated by direct summation (FFT-free oracle path).
struct ModeField {
    // c[k], k = 1..kmax; field = 2*Re(sum_k c_k exp(i k0 k x)) + c0
    std::vector<std::complex<double>> modes;
    double mean = 0.0;
    double k0 = 1.0;

    double value(double x) const {
        double v = mean;
        for (size_t k = 1; k <= modes.size(); ++k) {
            const auto c = modes[k - 1];
            v += 2.0 * (c * std::exp(std::complex<double>(0.0, k0 * k * x))).real();
        }
        return v;
    }

    double derivative(double x) const {
        double v = 0.0;
        for (size_t k = 1; k <= modes.size(); ++k) {
            const auto c = modes[k - 1] * std::complex<double>(0.0, k0 * k);
            v += 2.0 * (c * std::exp(std::complex<double>(0.0, k0 * k * x))).real();
        }
        return v;
    }
};

inline ModeField random_mode_field(int kmax, double domain_length, unsigned seed,
                                   double amplitude = 1.0) {
    ModeField f;
    f.k0 = 2.0 * std::numbers::pi / domain_length;
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    f.mean = amplitude * unit(rng);
    for (int k = 1; k <= kmax; ++k) {
        f.modes.emplace_back(amplitude * unit(rng) / k, amplitude * unit(rng) / k);
    }
    return f;
}

inline std::vector<double> sample_on_grid(const ModeField& f, const latentpde::Grid1D& grid) {
    std::vector<double> u(static_cast<size_t>(grid.num_points));
    for (int i = 0; i < grid.num_points; ++i) u[static_cast<size_t>(i)] = f.value(grid.point(i));
    return u;
}

inline double rel_l2_error(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double l2_norm(std::span<const double> a) {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

} // namespace latentpde::testing

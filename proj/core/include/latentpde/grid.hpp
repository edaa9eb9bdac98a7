#pragma once

#include <vector>

#include "latentpde/errors.hpp"

namespace latentpde {

/// Equi-spaced periodic grid on [x_min, x_min + length). The point at
/// x_min + length is identified with x_min and therefore not stored.
struct Grid1D {
    double length = 0.0;
    int num_points = 0;
    double x_min = 0.0;

    Grid1D() = default;
    Grid1D(double length_, int num_points_, double x_min_ = 0.0);

    double spacing() const { return length / num_points; }
    double point(int i) const { return x_min + i * spacing(); }
    std::vector<double> points() const;

    bool operator==(const Grid1D&) const = default;
};

bool is_power_of_two(int n);

} // namespace latentpde

#include "latentpde/grid.hpp"

#include <string>

namespace latentpde {

bool is_power_of_two(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

Grid1D::Grid1D(double length_, int num_points_, double x_min_)
    : length(length_), num_points(num_points_), x_min(x_min_) {
    if (length <= 0.0) {
        throw ConfigError("Grid1D: domain length must be positive, got " + std::to_string(length));
    }
    if (!is_power_of_two(num_points)) {
        throw ConfigError("Grid1D: num_points must be a power of two, got " +
                          std::to_string(num_points));
    }
}

std::vector<double> Grid1D::points() const {
    std::vector<double> x(static_cast<size_t>(num_points));
    for (int i = 0; i < num_points; ++i) {
        x[static_cast<size_t>(i)] = point(i);
    }
    return x;
}

} // namespace latentpde

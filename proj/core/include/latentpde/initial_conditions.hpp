#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "latentpde/grid.hpp"

namespace latentpde {

/// Random initial-condition family. sine_sum draws 3*n_c sine terms with
/// harmonics 1..max_harmonic of the domain; gaussian_process draws from a
/// periodic squared-exponential kernel (chordal distance on the circle).
struct InitialConditionSpec {
    std::string kind = "sine_sum"; // sine_sum | gaussian_process

    // sine_sum
    int n_c = 30;
    double amplitude = 0.5;
    int max_harmonic = 3;

    // gaussian_process; length_scale <= 0 resolves to 0.4 * L at sample time
    double gp_length_scale = 0.0;
    double gp_variance = 0.25; // sigma^2

    static InitialConditionSpec sine_sum(int n_c);
    static InitialConditionSpec gaussian_process(double length_scale = 0.0,
                                                 double variance = 0.25);
    /// VB uses the Gaussian process; KS sine_sum with n_c=30; KdV n_c=10.
    static InitialConditionSpec default_for_equation(const std::string& equation);

    nlohmann::json to_json() const;
    static InitialConditionSpec from_json(const nlohmann::json& j);

    bool operator==(const InitialConditionSpec&) const = default;
};

/// Deterministic in (spec, grid, seed); the returned field is periodic on the grid.
std::vector<double> sample_initial_condition(const InitialConditionSpec& spec, const Grid1D& grid,
                                             uint64_t seed);

} // namespace latentpde

#include "latentpde/initial_conditions.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "latentpde/errors.hpp"
#include "latentpde/spectral.hpp"

namespace latentpde {

namespace {

std::vector<double> sample_sine_sum(const InitialConditionSpec& spec, const Grid1D& grid,
                                    uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> harmonic(1, spec.max_harmonic);
    std::uniform_real_distribution<double> amp(-spec.amplitude, spec.amplitude);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    const double w0 = 2.0 * std::numbers::pi / grid.length;
    std::vector<double> u(static_cast<size_t>(grid.num_points), 0.0);
    for (int block = 0; block < 3; ++block) {
        for (int j = 0; j < spec.n_c; ++j) {
            const double w = w0 * harmonic(rng);
            const double a = amp(rng);
            const double p = phase(rng);
            for (int i = 0; i < grid.num_points; ++i) {
                u[static_cast<size_t>(i)] += a * std::sin(w * grid.point(i) + p);
            }
        }
    }
    return u;
}

// Sample y = C^(1/2) w for the circulant covariance C by diagonalizing in
// Fourier space: eigenvalues are the DFT of the kernel row.
std::vector<double> sample_gaussian_process(const InitialConditionSpec& spec, const Grid1D& grid,
                                            uint64_t seed) {
    const int n = grid.num_points;
    const double L = grid.length;
    const double ell = spec.gp_length_scale > 0.0 ? spec.gp_length_scale : 0.4 * L;
    const double var = spec.gp_variance;

    std::vector<double> row(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double d = i * grid.spacing();
        const double chord = (L / std::numbers::pi) * std::sin(std::numbers::pi * d / L);
        row[static_cast<size_t>(i)] = var * std::exp(-chord * chord / (2.0 * ell * ell));
    }
    auto row_hat = to_spectral(row, grid).coeffs; // DFT(row)/N

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> w(static_cast<size_t>(n));
    for (auto& v : w) v = normal(rng);

    auto w_hat = to_spectral(w, grid);
    for (int j = 0; j < n; ++j) {
        const double lambda = std::max(0.0, n * row_hat[static_cast<size_t>(j)].real());
        w_hat.coeffs[static_cast<size_t>(j)] *= std::sqrt(lambda);
    }
    return to_real(w_hat, grid);
}

} // namespace

InitialConditionSpec InitialConditionSpec::sine_sum(int n_c) {
    InitialConditionSpec spec;
    spec.kind = "sine_sum";
    spec.n_c = n_c;
    return spec;
}

InitialConditionSpec InitialConditionSpec::gaussian_process(double length_scale, double variance) {
    InitialConditionSpec spec;
    spec.kind = "gaussian_process";
    spec.gp_length_scale = length_scale;
    spec.gp_variance = variance;
    return spec;
}

InitialConditionSpec InitialConditionSpec::default_for_equation(const std::string& equation) {
    if (equation == "viscid_burgers") return gaussian_process();
    if (equation == "kuramoto_sivashinsky") return sine_sum(30);
    if (equation == "kdv") return sine_sum(10);
    throw ConfigError("InitialConditionSpec: unknown equation '" + equation + "'");
}

nlohmann::json InitialConditionSpec::to_json() const {
    nlohmann::json j;
    j["kind"] = kind;
    if (kind == "sine_sum") {
        j["n_c"] = n_c;
        j["amplitude"] = amplitude;
        j["max_harmonic"] = max_harmonic;
    } else if (kind == "gaussian_process") {
        j["length_scale"] = gp_length_scale;
        j["variance"] = gp_variance;
    }
    return j;
}

InitialConditionSpec InitialConditionSpec::from_json(const nlohmann::json& j) {
    InitialConditionSpec spec;
    spec.kind = j.at("kind").get<std::string>();
    if (spec.kind == "sine_sum") {
        spec.n_c = j.at("n_c").get<int>();
        spec.amplitude = j.value("amplitude", 0.5);
        spec.max_harmonic = j.value("max_harmonic", 3);
    } else if (spec.kind == "gaussian_process") {
        spec.gp_length_scale = j.at("length_scale").get<double>();
        spec.gp_variance = j.at("variance").get<double>();
    } else {
        throw ConfigError("InitialConditionSpec: unknown kind '" + spec.kind + "'");
    }
    return spec;
}

std::vector<double> sample_initial_condition(const InitialConditionSpec& spec, const Grid1D& grid,
                                             uint64_t seed) {
    if (spec.kind == "sine_sum") return sample_sine_sum(spec, grid, seed);
    if (spec.kind == "gaussian_process") return sample_gaussian_process(spec, grid, seed);
    throw ConfigError("sample_initial_condition: unknown kind '" + spec.kind + "'");
}

} // namespace latentpde

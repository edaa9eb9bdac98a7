#include "latentpde/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "latentpde/errors.hpp"
#include "latentpde/spectral.hpp"

namespace latentpde {

namespace {

double l2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void check_same_size(size_t a, size_t b, const char* what) {
    if (a != b) {
        throw DimensionError(std::string(what) + ": size mismatch " + std::to_string(a) +
                             " vs " + std::to_string(b));
    }
}

} // namespace

double rel_rmse(std::span<const double> pred, std::span<const double> truth) {
    check_same_size(pred.size(), truth.size(), "rel_rmse");
    const double denom = l2(truth);
    if (denom == 0.0) throw MetricError("rel_rmse: zero-norm truth, metric undefined");
    double num = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) {
        num += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    }
    return std::sqrt(num) / denom;
}

EnergyRatio energy_ratio(std::span<const double> pred, std::span<const double> truth,
                         const Grid1D& grid) {
    check_same_size(pred.size(), truth.size(), "energy_ratio");
    const int n = grid.num_points;
    check_same_size(pred.size(), static_cast<size_t>(n), "energy_ratio grid");

    // |unnormalized DFT|; to_spectral is normalized by 1/N
    auto spectrum = [&](std::span<const double> u) {
        auto coeffs = to_spectral(u, grid).coeffs;
        std::vector<double> mag(static_cast<size_t>(n / 2 + 1));
        for (int k = 0; k <= n / 2; ++k) {
            const int j = (k < n / 2) ? k : n / 2; // harmonic -N/2 sits at bin N/2
            mag[static_cast<size_t>(k)] = std::abs(coeffs[static_cast<size_t>(j)]) * n;
        }
        return mag;
    };

    auto e_pred = spectrum(pred);
    auto e_true = spectrum(truth);
    const double floor = 1e-12 * *std::max_element(e_true.begin(), e_true.end());

    EnergyRatio out;
    out.freq.resize(e_true.size());
    out.log_ratio.resize(e_true.size());
    out.masked.resize(e_true.size());
    for (size_t k = 0; k < e_true.size(); ++k) {
        out.freq[k] = static_cast<double>(k) / grid.length;
        if (e_true[k] <= floor) {
            out.masked[k] = true;
            out.log_ratio[k] = 0.0;
        } else {
            out.masked[k] = false;
            out.log_ratio[k] = std::log(e_pred[k] / e_true[k]);
        }
    }
    return out;
}

double consistency_rel_rmse(std::span<const double> theta,
                            std::span<const double> theta_reencoded) {
    check_same_size(theta.size(), theta_reencoded.size(), "consistency_rel_rmse");
    const double denom = l2(theta);
    if (denom == 0.0) throw MetricError("consistency_rel_rmse: zero-norm theta");
    double num = 0.0;
    for (size_t i = 0; i < theta.size(); ++i) {
        num += (theta[i] - theta_reencoded[i]) * (theta[i] - theta_reencoded[i]);
    }
    return std::sqrt(num) / denom;
}

double tv_norm(std::span<const double> values, int num_traj, int num_steps, int dim, double dt) {
    check_same_size(values.size(),
                    static_cast<size_t>(num_traj) * num_steps * dim, "tv_norm");
    if (num_traj < 1 || num_steps < 1 || dim < 1) {
        throw ConfigError("tv_norm: empty trajectory set");
    }
    auto at = [&](int q, int s, int i) {
        return values[(static_cast<size_t>(q) * num_steps + s) * dim + i];
    };
    double best = 0.0;
    for (int i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int q = 0; q < num_traj; ++q) {
            for (int s = 0; s + 1 < num_steps; ++s) {
                acc += dt * std::abs(at(q, s + 1, i) - at(q, s, i));
            }
        }
        best = std::max(best, acc / num_traj);
    }
    return best;
}

bool working_gate(std::span<const double> rel_rmse_curve, int gate_steps) {
    if (static_cast<int>(rel_rmse_curve.size()) < gate_steps) {
        throw MetricError("working_gate: curve has " + std::to_string(rel_rmse_curve.size()) +
                          " steps, need " + std::to_string(gate_steps));
    }
    for (int i = 0; i < gate_steps; ++i) {
        if (!(rel_rmse_curve[static_cast<size_t>(i)] < 1.0)) return false;
    }
    return true;
}

} // namespace latentpde

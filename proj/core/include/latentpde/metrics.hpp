#pragma once

#include <span>
#include <vector>

#include "latentpde/grid.hpp"

namespace latentpde {

/// ||pred - truth|| / ||truth|| (Euclidean over the snapshot).
/// Throws MetricError when the truth norm is zero.
double rel_rmse(std::span<const double> pred, std::span<const double> truth);

/// One-sided magnitude spectrum comparison log(E_pred(f_k) / E_true(f_k))
/// with E(f_k) = |sum_i u(x_i) exp(-j 2 pi k x_i / L)|, k = 0..N/2.
/// Entries where the truth energy is below 1e-12 of the spectrum maximum
/// are masked (log_ratio forced to 0, masked flag set).
struct EnergyRatio {
    std::vector<double> freq;      // f_k = k / L
    std::vector<double> log_ratio;
    std::vector<bool> masked;
};
EnergyRatio energy_ratio(std::span<const double> pred, std::span<const double> truth,
                         const Grid1D& grid);

/// ||theta - theta_reencoded|| / ||theta||; MetricError on zero-norm theta.
double consistency_rel_rmse(std::span<const double> theta,
                            std::span<const double> theta_reencoded);

/// Maximum over latent dimensions of the trajectory-averaged first-order
/// total variation: max_i (1/Q) sum_q sum_n dt * |theta[q,n+1,i] - theta[q,n,i]|.
/// values is row-major [num_traj, num_steps, dim].
double tv_norm(std::span<const double> values, int num_traj, int num_steps, int dim, double dt);

/// True iff relRMSE stays strictly below 1.0 for the first gate_steps entries.
/// Throws MetricError if the curve is shorter than gate_steps.
bool working_gate(std::span<const double> rel_rmse_curve, int gate_steps = 40);

} // namespace latentpde

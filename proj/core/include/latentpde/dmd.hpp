#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "latentpde/dataset.hpp"

namespace latentpde {

/// Rank-K linear one-step model in SVD-projected coordinates:
/// z = basis^T u,  z' = reduced_op z,  u' = basis z'.
struct DMDModel {
    int rank = 0;
    Eigen::MatrixXd reduced_op;      // K x K
    Eigen::MatrixXd basis;           // d x K, orthonormal columns
    Eigen::VectorXd singular_values; // retained sigma_1..sigma_K

    int effective_rank = 0;  // numerical rank of the snapshot matrix
    bool rank_warning = false;

    double spectral_radius() const;
};

/// Exact-DMD fit of min ||A X - X'||_F over rank-K operators, where X/X'
/// stack the shifted snapshot pairs of every trajectory column-wise.
/// A requested rank above the numerical rank is clamped with a warning flag.
DMDModel fit_dmd(const TrajectoryDataset& ds, int rank);
DMDModel fit_dmd_matrices(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Xp, int rank);

/// Returns steps+1 snapshots: the projection-reconstruction of u0 followed
/// by `steps` applications of the reduced operator.
std::vector<std::vector<double>> dmd_rollout(const DMDModel& model, std::span<const double> u0,
                                             int steps);

/// ||basis reduced_op basis^T X - X'||_F on the training pairs.
double dmd_training_residual(const DMDModel& model, const TrajectoryDataset& ds);

/// Stacked input/output matrices used by the fit (exposed for diagnostics).
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> dmd_snapshot_matrices(const TrajectoryDataset& ds);

} // namespace latentpde

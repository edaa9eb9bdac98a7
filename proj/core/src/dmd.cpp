#include "latentpde/dmd.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "latentpde/errors.hpp"

namespace latentpde {

double DMDModel::spectral_radius() const {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(reduced_op, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> dmd_snapshot_matrices(const TrajectoryDataset& ds) {
    const int d = ds.meta.num_grid;
    const int per_traj = ds.meta.num_steps - 1;
    const long m = static_cast<long>(ds.meta.num_traj) * per_traj;

    Eigen::MatrixXd x(d, m), xp(d, m);
    long col = 0;
    for (int t = 0; t < ds.meta.num_traj; ++t) {
        for (int s = 0; s < per_traj; ++s, ++col) {
            auto cur = ds.snapshot(t, s);
            auto nxt = ds.snapshot(t, s + 1);
            for (int i = 0; i < d; ++i) {
                x(i, col) = cur[static_cast<size_t>(i)];
                xp(i, col) = nxt[static_cast<size_t>(i)];
            }
        }
    }
    return {std::move(x), std::move(xp)};
}

DMDModel fit_dmd_matrices(const Eigen::MatrixXd& x, const Eigen::MatrixXd& xp, int rank) {
    if (rank < 1) throw ConfigError("fit_dmd: rank must be >= 1");
    if (rank > std::min(x.rows(), x.cols())) {
        throw ConfigError("fit_dmd: rank " + std::to_string(rank) + " exceeds min(d, M) = " +
                          std::to_string(std::min(x.rows(), x.cols())));
    }

    Eigen::BDCSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sigma = svd.singularValues();

    const double tol = std::max(x.rows(), x.cols()) *
                       std::numeric_limits<double>::epsilon() * sigma(0);
    int numerical_rank = 0;
    for (int i = 0; i < sigma.size(); ++i) {
        if (sigma(i) > tol) ++numerical_rank;
    }

    DMDModel model;
    model.effective_rank = numerical_rank;
    model.rank_warning = rank > numerical_rank;
    const int k = std::min(rank, numerical_rank);
    model.rank = k;
    model.basis = svd.matrixU().leftCols(k);
    model.singular_values = sigma.head(k);

    // A_tilde = U^T X' V S^-1
    Eigen::MatrixXd v = svd.matrixV().leftCols(k);
    Eigen::VectorXd inv_sigma = sigma.head(k).cwiseInverse();
    model.reduced_op = model.basis.transpose() * xp * v * inv_sigma.asDiagonal();
    return model;
}

DMDModel fit_dmd(const TrajectoryDataset& ds, int rank) {
    if (ds.meta.num_steps < 2) throw ConfigError("fit_dmd: need num_steps >= 2");
    auto [x, xp] = dmd_snapshot_matrices(ds);
    return fit_dmd_matrices(x, xp, rank);
}

std::vector<std::vector<double>> dmd_rollout(const DMDModel& model, std::span<const double> u0,
                                             int steps) {
    if (static_cast<long>(u0.size()) != model.basis.rows()) {
        throw DimensionError("dmd_rollout: u0 has dimension " + std::to_string(u0.size()) +
                             ", model expects " + std::to_string(model.basis.rows()));
    }
    Eigen::Map<const Eigen::VectorXd> u0_vec(u0.data(), static_cast<long>(u0.size()));
    Eigen::VectorXd z = model.basis.transpose() * u0_vec;

    std::vector<std::vector<double>> out;
    out.reserve(static_cast<size_t>(steps) + 1);
    for (int s = 0; s <= steps; ++s) {
        Eigen::VectorXd lifted = model.basis * z;
        out.emplace_back(lifted.data(), lifted.data() + lifted.size());
        if (s < steps) z = model.reduced_op * z;
    }
    return out;
}

double dmd_training_residual(const DMDModel& model, const TrajectoryDataset& ds) {
    auto [x, xp] = dmd_snapshot_matrices(ds);
    Eigen::MatrixXd pred = model.basis * (model.reduced_op * (model.basis.transpose() * x));
    return (pred - xp).norm();
}

} // namespace latentpde

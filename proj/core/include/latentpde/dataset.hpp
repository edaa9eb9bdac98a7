#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "latentpde/equation.hpp"
#include "latentpde/grid.hpp"
#include "latentpde/initial_conditions.hpp"

namespace latentpde {

struct DatasetMetadata {
    int format_version = 1;
    std::string equation;
    double nu = 0.0;
    double domain_length = 0.0;
    int num_grid = 0;
    double dt_save = 0.0;
    double dt_solver = 0.0;
    int num_traj = 0;
    int num_steps = 0;
    uint64_t seed = 0;
    InitialConditionSpec ic_spec;

    bool operator==(const DatasetMetadata&) const = default;
};

/// Snapshot array u[traj, step, grid] plus the generation metadata.
///
/// On-disk layout (fixed): <dir>/metadata.json (UTF-8) and <dir>/u.bin
/// (little-endian float64, row-major [traj, step, grid], no header).
class TrajectoryDataset {
public:
    DatasetMetadata meta;
    std::vector<double> u;

    std::span<const double> snapshot(int traj, int step) const;
    std::span<double> snapshot(int traj, int step);

    Grid1D grid() const;
    EquationSpec equation_spec() const;

    /// Throws NumericalError if any value is non-finite.
    void validate() const;
    std::vector<double> max_abs_per_trajectory() const;
};

/// Trajectory i uses seed^i; generation is parallel over trajectories
/// (capped by LATENTPDE_THREADS).
TrajectoryDataset generate_dataset(const EquationSpec& eq, const InitialConditionSpec& ic,
                                   const Grid1D& grid, int num_traj, int num_steps,
                                   double dt_save, double dt_solver, uint64_t seed);

void save_dataset(const TrajectoryDataset& ds, const std::filesystem::path& dir);
TrajectoryDataset load_dataset(const std::filesystem::path& dir);

/// generate + save; removes partial output if a trajectory goes unstable.
TrajectoryDataset generate_dataset_to(const std::filesystem::path& dir, const EquationSpec& eq,
                                      const InitialConditionSpec& ic, const Grid1D& grid,
                                      int num_traj, int num_steps, double dt_save,
                                      double dt_solver, uint64_t seed);

/// A contiguous time window inside one trajectory.
struct SnapshotWindow {
    int traj = 0;
    int t0 = 0;
};

/// One pass over all windows in seeded shuffled order, batch by batch.
/// The final batch of an epoch may be smaller than batch_size.
class BatchIterator {
public:
    struct Batch {
        std::vector<SnapshotWindow> items;
        std::vector<double> values; // [items.size(), window_len, num_grid]
        int window_len = 0;
        int num_grid = 0;
    };

    BatchIterator(const TrajectoryDataset& ds, int batch_size, int window_len, uint64_t seed);

    std::optional<Batch> next();
    void reset(uint64_t seed);
    size_t windows_per_epoch() const { return order_.size(); }

private:
    const TrajectoryDataset& ds_;
    int batch_size_;
    int window_len_;
    std::vector<SnapshotWindow> order_;
    size_t cursor_ = 0;
};

} // namespace latentpde

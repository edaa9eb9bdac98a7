#include "latentpde/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "latentpde/errors.hpp"
#include "latentpde/spectral.hpp"
#include "latentpde/threading.hpp"

static_assert(std::endian::native == std::endian::little,
              "u.bin is little-endian; byte swapping is not implemented");

namespace latentpde {

namespace {

size_t flat_index(const DatasetMetadata& m, int traj, int step) {
    return (static_cast<size_t>(traj) * m.num_steps + step) * m.num_grid;
}

nlohmann::json metadata_to_json(const DatasetMetadata& m) {
    nlohmann::json j;
    j["format_version"] = m.format_version;
    j["equation"] = m.equation;
    j["nu"] = m.nu;
    j["domain_length"] = m.domain_length;
    j["num_grid"] = m.num_grid;
    j["dt_save"] = m.dt_save;
    j["dt_solver"] = m.dt_solver;
    j["num_traj"] = m.num_traj;
    j["num_steps"] = m.num_steps;
    j["seed"] = m.seed;
    j["ic_spec"] = m.ic_spec.to_json();
    return j;
}

DatasetMetadata metadata_from_json(const nlohmann::json& j) {
    DatasetMetadata m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != 1) {
        throw IoError("dataset: unsupported format_version " +
                      std::to_string(m.format_version) + " (expected 1)");
    }
    m.equation = j.at("equation").get<std::string>();
    m.nu = j.at("nu").get<double>();
    m.domain_length = j.at("domain_length").get<double>();
    m.num_grid = j.at("num_grid").get<int>();
    m.dt_save = j.at("dt_save").get<double>();
    m.dt_solver = j.at("dt_solver").get<double>();
    m.num_traj = j.at("num_traj").get<int>();
    m.num_steps = j.at("num_steps").get<int>();
    m.seed = j.at("seed").get<uint64_t>();
    m.ic_spec = InitialConditionSpec::from_json(j.at("ic_spec"));
    return m;
}

} // namespace

std::span<const double> TrajectoryDataset::snapshot(int traj, int step) const {
    return {u.data() + flat_index(meta, traj, step), static_cast<size_t>(meta.num_grid)};
}

std::span<double> TrajectoryDataset::snapshot(int traj, int step) {
    return {u.data() + flat_index(meta, traj, step), static_cast<size_t>(meta.num_grid)};
}

Grid1D TrajectoryDataset::grid() const {
    return Grid1D(meta.domain_length, meta.num_grid, EquationSpec::default_x_min(meta.equation));
}

EquationSpec TrajectoryDataset::equation_spec() const {
    EquationSpec eq = EquationSpec::by_name(meta.equation);
    eq.nu = meta.nu;
    return eq;
}

void TrajectoryDataset::validate() const {
    for (int t = 0; t < meta.num_traj; ++t) {
        for (int s = 0; s < meta.num_steps; ++s) {
            for (double v : snapshot(t, s)) {
                if (!std::isfinite(v)) {
                    throw NumericalError("dataset: non-finite value in trajectory " +
                                         std::to_string(t) + " step " + std::to_string(s));
                }
            }
        }
    }
}

std::vector<double> TrajectoryDataset::max_abs_per_trajectory() const {
    std::vector<double> out(static_cast<size_t>(meta.num_traj), 0.0);
    for (int t = 0; t < meta.num_traj; ++t) {
        double m = 0.0;
        for (int s = 0; s < meta.num_steps; ++s) {
            for (double v : snapshot(t, s)) m = std::max(m, std::abs(v));
        }
        out[static_cast<size_t>(t)] = m;
    }
    return out;
}

TrajectoryDataset generate_dataset(const EquationSpec& eq, const InitialConditionSpec& ic,
                                   const Grid1D& grid, int num_traj, int num_steps,
                                   double dt_save, double dt_solver, uint64_t seed) {
    if (num_traj < 1 || num_steps < 2) {
        throw ConfigError("generate_dataset: need num_traj >= 1 and num_steps >= 2");
    }
    TrajectoryDataset ds;
    ds.meta.equation = eq.name;
    ds.meta.nu = eq.nu;
    ds.meta.domain_length = grid.length;
    ds.meta.num_grid = grid.num_points;
    ds.meta.dt_save = dt_save;
    ds.meta.dt_solver = dt_solver;
    ds.meta.num_traj = num_traj;
    ds.meta.num_steps = num_steps;
    ds.meta.seed = seed;
    ds.meta.ic_spec = ic;
    ds.u.resize(static_cast<size_t>(num_traj) * num_steps * grid.num_points);

    std::atomic<int> next_traj{0};
    std::mutex error_mutex;
    std::optional<std::string> first_error;

    auto worker = [&]() {
        for (;;) {
            const int t = next_traj.fetch_add(1);
            if (t >= num_traj) return;
            {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (first_error) return;
            }
            try {
                auto u0 = sample_initial_condition(ic, grid, seed ^ static_cast<uint64_t>(t));
                auto saves = solve_trajectory(u0, eq, grid, dt_solver, dt_save, num_steps);
                for (int s = 0; s < num_steps; ++s) {
                    std::copy(saves[static_cast<size_t>(s)].begin(),
                              saves[static_cast<size_t>(s)].end(), ds.snapshot(t, s).begin());
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) {
                    first_error = "trajectory " + std::to_string(t) + ": " + e.what();
                }
                return;
            }
        }
    };

    const int num_workers = std::min(max_worker_threads(), num_traj);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(num_workers));
    for (int i = 0; i < num_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    if (first_error) throw NumericalError("generate_dataset: " + *first_error);
    return ds;
}

void save_dataset(const TrajectoryDataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream meta(dir / "metadata.json");
        if (!meta) throw IoError("save_dataset: cannot write " + (dir / "metadata.json").string());
        meta << metadata_to_json(ds.meta).dump(2) << "\n";
    }
    {
        std::ofstream bin(dir / "u.bin", std::ios::binary);
        if (!bin) throw IoError("save_dataset: cannot write " + (dir / "u.bin").string());
        bin.write(reinterpret_cast<const char*>(ds.u.data()),
                  static_cast<std::streamsize>(ds.u.size() * sizeof(double)));
    }
}

TrajectoryDataset load_dataset(const std::filesystem::path& dir) {
    const auto meta_path = dir / "metadata.json";
    const auto bin_path = dir / "u.bin";
    if (!std::filesystem::exists(meta_path) || !std::filesystem::exists(bin_path)) {
        throw MissingArtifactError("load_dataset: no dataset at " + dir.string());
    }

    TrajectoryDataset ds;
    {
        std::ifstream meta(meta_path);
        nlohmann::json j;
        try {
            meta >> j;
        } catch (const nlohmann::json::exception& e) {
            throw IoError("load_dataset: bad metadata.json: " + std::string(e.what()));
        }
        ds.meta = metadata_from_json(j);
    }

    const auto expected_bytes = static_cast<uintmax_t>(ds.meta.num_traj) * ds.meta.num_steps *
                                ds.meta.num_grid * sizeof(double);
    const auto actual_bytes = std::filesystem::file_size(bin_path);
    if (actual_bytes != expected_bytes) {
        throw IoError("load_dataset: u.bin has " + std::to_string(actual_bytes) +
                      " bytes, expected " + std::to_string(expected_bytes) +
                      " ([traj=" + std::to_string(ds.meta.num_traj) +
                      ", step=" + std::to_string(ds.meta.num_steps) +
                      ", grid=" + std::to_string(ds.meta.num_grid) + "] float64)");
    }

    ds.u.resize(expected_bytes / sizeof(double));
    std::ifstream bin(bin_path, std::ios::binary);
    bin.read(reinterpret_cast<char*>(ds.u.data()), static_cast<std::streamsize>(expected_bytes));
    if (!bin) throw IoError("load_dataset: short read from " + bin_path.string());
    return ds;
}

TrajectoryDataset generate_dataset_to(const std::filesystem::path& dir, const EquationSpec& eq,
                                      const InitialConditionSpec& ic, const Grid1D& grid,
                                      int num_traj, int num_steps, double dt_save,
                                      double dt_solver, uint64_t seed) {
    try {
        auto ds = generate_dataset(eq, ic, grid, num_traj, num_steps, dt_save, dt_solver, seed);
        save_dataset(ds, dir);
        return ds;
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(dir / "metadata.json", ec);
        std::filesystem::remove(dir / "u.bin", ec);
        throw;
    }
}

BatchIterator::BatchIterator(const TrajectoryDataset& ds, int batch_size, int window_len,
                             uint64_t seed)
    : ds_(ds), batch_size_(batch_size), window_len_(window_len) {
    if (batch_size < 1) throw ConfigError("BatchIterator: batch_size must be >= 1");
    if (window_len < 1 || window_len > ds.meta.num_steps) {
        throw ConfigError("BatchIterator: window_len must be in [1, num_steps]");
    }
    reset(seed);
}

void BatchIterator::reset(uint64_t seed) {
    order_.clear();
    for (int t = 0; t < ds_.meta.num_traj; ++t) {
        for (int s = 0; s + window_len_ <= ds_.meta.num_steps; ++s) {
            order_.push_back({t, s});
        }
    }
    std::mt19937_64 rng(seed);
    std::shuffle(order_.begin(), order_.end(), rng);
    cursor_ = 0;
}

std::optional<BatchIterator::Batch> BatchIterator::next() {
    if (cursor_ >= order_.size()) return std::nullopt;
    const size_t count = std::min(static_cast<size_t>(batch_size_), order_.size() - cursor_);

    Batch batch;
    batch.window_len = window_len_;
    batch.num_grid = ds_.meta.num_grid;
    batch.items.assign(order_.begin() + static_cast<long>(cursor_),
                       order_.begin() + static_cast<long>(cursor_ + count));
    batch.values.resize(count * window_len_ * static_cast<size_t>(ds_.meta.num_grid));

    double* dst = batch.values.data();
    for (const auto& w : batch.items) {
        for (int s = 0; s < window_len_; ++s) {
            auto snap = ds_.snapshot(w.traj, w.t0 + s);
            std::copy(snap.begin(), snap.end(), dst);
            dst += snap.size();
        }
    }
    cursor_ += count;
    return batch;
}

} // namespace latentpde

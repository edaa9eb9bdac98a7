#include "latentpde/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <unordered_map>

#include "latentpde/errors.hpp"

namespace latentpde {

namespace {

// FFTW's planner is not thread-safe; execution of existing plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// One complex-to-complex plan pair per transform size.
class FftPlan {
public:
    explicit FftPlan(int n) : n_(n) {
        buf_ = fftw_alloc_complex(static_cast<size_t>(n));
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_1d(n, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }

    ~FftPlan() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd_);
        fftw_destroy_plan(bwd_);
        fftw_free(buf_);
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    // forward, normalized by 1/N so that round trips are the identity
    void forward(std::span<const std::complex<double>> in,
                 std::vector<std::complex<double>>& out) {
        load(in);
        fftw_execute(fwd_);
        store(out, 1.0 / n_);
    }

    void backward(std::span<const std::complex<double>> in,
                  std::vector<std::complex<double>>& out) {
        load(in);
        fftw_execute(bwd_);
        store(out, 1.0);
    }

private:
    void load(std::span<const std::complex<double>> in) {
        for (int i = 0; i < n_; ++i) {
            buf_[i][0] = in[static_cast<size_t>(i)].real();
            buf_[i][1] = in[static_cast<size_t>(i)].imag();
        }
    }

    void store(std::vector<std::complex<double>>& out, double scale) {
        out.resize(static_cast<size_t>(n_));
        for (int i = 0; i < n_; ++i) {
            out[static_cast<size_t>(i)] = {buf_[i][0] * scale, buf_[i][1] * scale};
        }
    }

    int n_;
    fftw_complex* buf_;
    fftw_plan fwd_;
    fftw_plan bwd_;
};

FftPlan& plan_for(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<FftPlan>> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
    }
    return *it->second;
}

std::vector<std::complex<double>> as_complex(std::span<const double> u) {
    std::vector<std::complex<double>> c(u.size());
    for (size_t i = 0; i < u.size(); ++i) c[i] = {u[i], 0.0};
    return c;
}

void check_size(size_t have, const Grid1D& grid, const char* what) {
    if (have != static_cast<size_t>(grid.num_points)) {
        throw DimensionError(std::string(what) + ": field size " + std::to_string(have) +
                             " does not match grid N=" + std::to_string(grid.num_points));
    }
}

// 2/3-rule: zero harmonics |k| > N/3 in place.
void dealias_mask(std::vector<std::complex<double>>& coeffs) {
    const int n = static_cast<int>(coeffs.size());
    const int cutoff = n / 3;
    for (int j = 0; j < n; ++j) {
        if (std::abs(fft_harmonic(j, n)) > cutoff) coeffs[static_cast<size_t>(j)] = 0.0;
    }
}

bool all_finite(const std::vector<std::complex<double>>& coeffs) {
    for (const auto& c : coeffs) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
}

// Spectral coefficients of the convective term c_N * (u u_x) from u_hat.
std::vector<std::complex<double>> convective_hat(const std::vector<std::complex<double>>& u_hat,
                                                 const EquationSpec& eq, const Grid1D& grid) {
    const int n = static_cast<int>(u_hat.size());
    auto& plan = plan_for(n);
    const double k0 = 2.0 * std::numbers::pi / grid.length;

    std::vector<std::complex<double>> a = u_hat;
    std::vector<std::complex<double>> da(a.size());
    for (int j = 0; j < n; ++j) {
        const int k = fft_harmonic(j, n);
        // drop the Nyquist mode of the derivative (no conjugate partner)
        const double kk = (n % 2 == 0 && k == -n / 2) ? 0.0 : k0 * k;
        da[static_cast<size_t>(j)] = std::complex<double>(0.0, kk) * a[static_cast<size_t>(j)];
    }
    if (eq.dealias) {
        dealias_mask(a);
        dealias_mask(da);
    }

    std::vector<std::complex<double>> u_real, du_real;
    plan.backward(a, u_real);
    plan.backward(da, du_real);

    std::vector<std::complex<double>> prod(a.size());
    for (size_t i = 0; i < prod.size(); ++i) {
        prod[i] = {eq.nonlinear_coeff * u_real[i].real() * du_real[i].real(), 0.0};
    }
    std::vector<std::complex<double>> prod_hat;
    plan.forward(prod, prod_hat);
    if (eq.dealias) dealias_mask(prod_hat);
    return prod_hat;
}

} // namespace

int fft_harmonic(int j, int n) {
    return j < n / 2 ? j : j - n;
}

SpectralState to_spectral(std::span<const double> u, const Grid1D& grid, double time) {
    check_size(u.size(), grid, "to_spectral");
    SpectralState state;
    state.time = time;
    plan_for(grid.num_points).forward(as_complex(u), state.coeffs);
    return state;
}

std::vector<double> to_real(const SpectralState& state, const Grid1D& grid) {
    check_size(state.coeffs.size(), grid, "to_real");
    std::vector<std::complex<double>> out;
    plan_for(grid.num_points).backward(state.coeffs, out);
    std::vector<double> u(out.size());
    for (size_t i = 0; i < out.size(); ++i) u[i] = out[i].real();
    return u;
}

SpectralState fourier_derivative(const SpectralState& state, int order, const Grid1D& grid) {
    check_size(state.coeffs.size(), grid, "fourier_derivative");
    if (order < 1) {
        throw ConfigError("fourier_derivative: order must be >= 1, got " + std::to_string(order));
    }
    const int n = grid.num_points;
    const double k0 = 2.0 * std::numbers::pi / grid.length;
    SpectralState out;
    out.time = state.time;
    out.coeffs.resize(state.coeffs.size());
    for (int j = 0; j < n; ++j) {
        const int k = fft_harmonic(j, n);
        if (order % 2 == 1 && n % 2 == 0 && k == -n / 2) {
            out.coeffs[static_cast<size_t>(j)] = 0.0;
            continue;
        }
        const std::complex<double> ik(0.0, k0 * k);
        out.coeffs[static_cast<size_t>(j)] =
            std::pow(ik, order) * state.coeffs[static_cast<size_t>(j)];
    }
    return out;
}

std::vector<double> convective_term(std::span<const double> u, const Grid1D& grid, bool dealias) {
    check_size(u.size(), grid, "convective_term");
    EquationSpec eq{.name = "", .nu = 0.0, .nonlinear_coeff = 1.0, .dealias = dealias};
    SpectralState state = to_spectral(u, grid);
    auto prod_hat = convective_hat(state.coeffs, eq, grid);
    SpectralState prod{std::move(prod_hat), state.time};
    return to_real(prod, grid);
}

SpectralState imex_step(const SpectralState& state, double dt, const EquationSpec& eq,
                        const Grid1D& grid) {
    check_size(state.coeffs.size(), grid, "imex_step");
    if (dt <= 0.0) throw ConfigError("imex_step: dt must be positive");

    const int n = grid.num_points;
    const double k0 = 2.0 * std::numbers::pi / grid.length;

    std::vector<std::complex<double>> symbol(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        symbol[static_cast<size_t>(j)] = eq.linear_symbol(k0 * fft_harmonic(j, n));
    }

    // Crank-Nicolson propagation of the linear symbol over a*dt, plus an
    // explicit increment that enters the implicit solve.
    auto cn_apply = [&](const std::vector<std::complex<double>>& base,
                        const std::vector<std::complex<double>>& increment, double a) {
        std::vector<std::complex<double>> out(base.size());
        for (size_t j = 0; j < base.size(); ++j) {
            const std::complex<double> half = 0.5 * a * dt * symbol[j];
            out[j] = ((1.0 + half) * base[j] + increment[j]) / (1.0 - half);
        }
        return out;
    };

    const bool has_nonlinear = eq.nonlinear_coeff != 0.0;
    auto nonlinear = [&](const std::vector<std::complex<double>>& u_hat) {
        if (!has_nonlinear) return std::vector<std::complex<double>>(u_hat.size(), 0.0);
        return convective_hat(u_hat, eq, grid);
    };

    auto scaled = [](const std::vector<std::complex<double>>& v, double s) {
        std::vector<std::complex<double>> out(v.size());
        for (size_t i = 0; i < v.size(); ++i) out[i] = s * v[i];
        return out;
    };

    const auto& u0 = state.coeffs;
    auto n1 = nonlinear(u0);
    auto u2 = cn_apply(u0, scaled(n1, 0.5 * dt), 0.5);
    auto n2 = nonlinear(u2);
    auto u3 = cn_apply(u0, scaled(n2, 0.5 * dt), 0.5);
    auto n3 = nonlinear(u3);
    auto u4 = cn_apply(u0, scaled(n3, dt), 1.0);
    auto n4 = nonlinear(u4);

    std::vector<std::complex<double>> combo(u0.size());
    for (size_t j = 0; j < combo.size(); ++j) {
        combo[j] = (dt / 6.0) * (n1[j] + 2.0 * n2[j] + 2.0 * n3[j] + n4[j]);
    }
    SpectralState next;
    next.coeffs = cn_apply(u0, combo, 1.0);
    next.time = state.time + dt;

    if (!all_finite(next.coeffs)) {
        throw NumericalError("imex_step: non-finite state at t=" + std::to_string(next.time));
    }
    return next;
}

std::vector<std::vector<double>> solve_trajectory(std::span<const double> u0,
                                                  const EquationSpec& eq, const Grid1D& grid,
                                                  double dt_solver, double dt_save,
                                                  int num_saves) {
    check_size(u0.size(), grid, "solve_trajectory");
    if (num_saves < 1) throw ConfigError("solve_trajectory: num_saves must be >= 1");
    if (dt_solver <= 0.0 || dt_save <= 0.0) {
        throw ConfigError("solve_trajectory: dt_solver and dt_save must be positive");
    }
    const double ratio = dt_save / dt_solver;
    const long steps_per_save = std::lround(ratio);
    if (steps_per_save < 1 || std::abs(ratio - static_cast<double>(steps_per_save)) > 1e-9 * ratio) {
        throw ConfigError("solve_trajectory: dt_save must be an integer multiple of dt_solver");
    }

    std::vector<std::vector<double>> saves;
    saves.reserve(static_cast<size_t>(num_saves));
    saves.emplace_back(u0.begin(), u0.end());

    SpectralState state = to_spectral(u0, grid);
    long global_step = 0;
    for (int s = 1; s < num_saves; ++s) {
        for (long i = 0; i < steps_per_save; ++i) {
            try {
                state = imex_step(state, dt_solver, eq, grid);
            } catch (const NumericalError& e) {
                throw NumericalError(std::string(e.what()) + " (solver step " +
                                     std::to_string(global_step) + ")");
            }
            ++global_step;
        }
        saves.push_back(to_real(state, grid));
    }
    return saves;
}

} // namespace latentpde

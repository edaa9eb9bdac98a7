#pragma once

#include <complex>
#include <span>
#include <vector>

#include "latentpde/equation.hpp"
#include "latentpde/grid.hpp"

namespace latentpde {

/// Fourier coefficients of a grid field in standard FFT ordering
/// (index j holds harmonic k = j for j < N/2 and k = j - N for j >= N/2).
struct SpectralState {
    std::vector<std::complex<double>> coeffs;
    double time = 0.0;
};

/// Signed integer harmonic for FFT bin j of an N-point transform.
int fft_harmonic(int j, int n);

SpectralState to_spectral(std::span<const double> u, const Grid1D& grid, double time = 0.0);
std::vector<double> to_real(const SpectralState& state, const Grid1D& grid);

/// Coefficients of the order-th derivative: (i * 2*pi*k/L)^order * u_hat_k.
/// The Nyquist mode is zeroed for odd orders.
SpectralState fourier_derivative(const SpectralState& state, int order, const Grid1D& grid);

/// u * du/dx evaluated pseudo-spectrally. With dealias, the 2/3-rule zeroes
/// harmonics |k| > N/3 of both factors and of the product.
std::vector<double> convective_term(std::span<const double> u, const Grid1D& grid,
                                    bool dealias = true);

/// One step of the 4-stage IMEX scheme: linear symbol via a Crank-Nicolson
/// solve per stage, convective term explicit with classical RK4 weights.
/// Throws NumericalError naming the time reached if the result is not finite.
SpectralState imex_step(const SpectralState& state, double dt, const EquationSpec& eq,
                        const Grid1D& grid);

/// Integrates u0 and samples num_saves snapshots every dt_save
/// (the first snapshot is u0 itself). dt_save must be an integer multiple
/// of dt_solver.
std::vector<std::vector<double>> solve_trajectory(std::span<const double> u0,
                                                  const EquationSpec& eq, const Grid1D& grid,
                                                  double dt_solver, double dt_save,
                                                  int num_saves);

} // namespace latentpde

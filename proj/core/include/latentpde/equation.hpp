#pragma once

#include <complex>
#include <string>

#include "latentpde/errors.hpp"

namespace latentpde {

/// Semi-linear PDE family du/dt = D u + c_N * (u du/dx) on a periodic domain,
/// identified by its Fourier-space linear symbol D(k) (k in rad/length).
struct EquationSpec {
    std::string name;             // viscid_burgers | kuramoto_sivashinsky | kdv
    double nu = 0.0;              // viscosity (unused by kdv)
    double nonlinear_coeff = -1.0; // c_N multiplying u * du/dx
    bool dealias = true;          // 2/3-rule when forming the convective term

    /// Linear symbol at angular wavenumber k. Real for diffusive operators,
    /// imaginary for the KdV dispersion.
    std::complex<double> linear_symbol(double k) const;

    static EquationSpec viscid_burgers(double nu = 0.01);
    static EquationSpec kuramoto_sivashinsky(double nu = 1.0);
    static EquationSpec kdv();
    static EquationSpec by_name(const std::string& name);

    /// Conventional domain length for each named system (VB on [-1,1],
    /// KS on [0,64], KdV on [-16,16]).
    static double default_domain_length(const std::string& name);
    static double default_x_min(const std::string& name);
    static double default_dt_solver(const std::string& name);
    static double default_dt_save(const std::string& name);
};

} // namespace latentpde

#include "latentpde/equation.hpp"

namespace latentpde {

std::complex<double> EquationSpec::linear_symbol(double k) const {
    const double k2 = k * k;
    if (name == "viscid_burgers") {
        return {-nu * k2, 0.0};
    }
    if (name == "kuramoto_sivashinsky") {
        return {nu * k2 - nu * k2 * k2, 0.0};
    }
    if (name == "kdv") {
        // d/dt u = 6 u u_x - u_xxx; -F[u_xxx] = i k^3 u_hat
        return {0.0, k2 * k};
    }
    throw ConfigError("EquationSpec: unknown equation '" + name + "'");
}

EquationSpec EquationSpec::viscid_burgers(double nu) {
    return {.name = "viscid_burgers", .nu = nu, .nonlinear_coeff = -1.0};
}

EquationSpec EquationSpec::kuramoto_sivashinsky(double nu) {
    return {.name = "kuramoto_sivashinsky", .nu = nu, .nonlinear_coeff = -1.0};
}

EquationSpec EquationSpec::kdv() {
    return {.name = "kdv", .nu = 0.0, .nonlinear_coeff = 6.0};
}

EquationSpec EquationSpec::by_name(const std::string& name) {
    if (name == "viscid_burgers") return viscid_burgers();
    if (name == "kuramoto_sivashinsky") return kuramoto_sivashinsky();
    if (name == "kdv") return kdv();
    throw ConfigError("EquationSpec: unknown equation '" + name + "'");
}

double EquationSpec::default_domain_length(const std::string& name) {
    if (name == "viscid_burgers") return 2.0;
    if (name == "kuramoto_sivashinsky") return 64.0;
    if (name == "kdv") return 32.0;
    throw ConfigError("EquationSpec: unknown equation '" + name + "'");
}

double EquationSpec::default_x_min(const std::string& name) {
    if (name == "viscid_burgers") return -1.0;
    if (name == "kuramoto_sivashinsky") return 0.0;
    if (name == "kdv") return -16.0;
    throw ConfigError("EquationSpec: unknown equation '" + name + "'");
}

double EquationSpec::default_dt_solver(const std::string& name) {
    if (name == "viscid_burgers") return 1e-3;
    if (name == "kuramoto_sivashinsky") return 1e-3;
    if (name == "kdv") return 1e-5;
    throw ConfigError("EquationSpec: unknown equation '" + name + "'");
}

double EquationSpec::default_dt_save(const std::string& name) {
    if (name == "viscid_burgers") return 0.25;
    if (name == "kuramoto_sivashinsky") return 0.5;
    if (name == "kdv") return 0.02;
    throw ConfigError("EquationSpec: unknown equation '" + name + "'");
}

} // namespace latentpde

#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "finite_section.hpp"
#include "krein_system.hpp"

namespace sk::experiments {

using Complex = std::complex<double>;

struct W21Probe {
    Complex z;
    std::vector<double> xi;
    std::vector<Complex> w21;
    Complex krein_side;   // 2C hatPi_closed(z)
    Complex vchain_side;  // 2C * hat limit of the transformed chain (doubled parameter)
    bool stabilizes_to_krein = false;
    bool stabilizes_to_vchain = false;
};

struct ObstructionReport {
    double mu = 0.0;
    std::vector<double> t_list;
    std::vector<double> xi_ladder;
    std::vector<double> norm_r_xi;
    std::vector<double> cauchy_t;
    std::vector<double> cauchy_delta;
    std::vector<double> cauchy_delta_sqrt_t;
    double g_at_zero = 0.0;
    double h0_from_hat_pi_closed = 0.0;  // 2C |hatPi(0)|
    double h0_from_pi_closed = 0.0;      // -2C Pi(0)
    double h0_from_hat_pi_ode = 0.0;
    double h0_from_pi_ode = 0.0;
    double mismatch_ratio = 0.0;  // g_at_zero / (1 - mu)
    double norm_k = 0.0;          // mu * ||H|| from the default section spectrum
    std::vector<W21Probe> probes;

    nlohmann::json to_json() const;
};

struct ObstructionParams {
    int ladder_ppu = 8;
    int ladder_order = 6;
    Complex limit_probe{0.0, 0.05};  // z used for the z -> 0 ODE limits
};

ObstructionReport obstruction_report(double mu, const std::vector<double>& t_list,
                                     const std::vector<Complex>& z_probes,
                                     ObstructionParams params = {});

struct VolterraReport {
    double mu = 0.0;
    double xi = 0.0;
    int n = 0;
    double spectral_radius = 0.0;
    double spectral_radius_refined = 0.0;  // panels doubled
    double w_norm = 0.0;                   // power-iteration 2-norm estimate
    double max_eigenvalue_diff = 0.0;      // Rayleigh at mapped eigenvectors vs diag(V)
    double max_eigen_residual = 0.0;       // ||W u - lambda u||_inf / ||u||_inf
    double similarity_defect = 0.0;        // max |S^{-1/2} W S^{1/2} - V|
    int eigen_checked = 0;

    nlohmann::json to_json() const;
};

VolterraReport volterra_demo(double mu, double xi, finite_section::GridParams params = {});

struct CheckResult {
    int criterion = 0;
    std::string id;
    std::string ref;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double seconds = 0.0;
};

struct SuiteConfig {
    double mu = 0.5;
    std::vector<double> q_mu_list{0.25, 0.5, 0.75};
    double t_min = 2.0;
    double t_max = 10.0;
    double dt = 0.05;
    double ladder_step = 0.125;
    int ladder_order = 6;
    double x_max = 40.0;
    int jobs = 1;
    std::map<std::string, double> tolerance_overrides;

    static SuiteConfig from_json(const nlohmann::json& j);
};

struct SuiteReport {
    std::vector<CheckResult> checks;
    double total_seconds = 0.0;
    bool pass = false;

    nlohmann::json to_json() const;
};

SuiteReport run_suite(const SuiteConfig& config);

}  // namespace sk::experiments

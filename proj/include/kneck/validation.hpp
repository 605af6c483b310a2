#pragma once

#include "kneck/neck_assembly.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace kneck {

// Parameter windows: delta in (0, delta0), nu in (-2, -3/2), mu in (max(delta, nu + 2), 1), alpha in [0, 1).
struct WeightSpec {
    double delta = 0.3;
    double nu = -1.8;
    double mu = 0.6;
    double alpha = 0.5;
    double T = 50.0;
    double C3 = 1.0;
    int k = 0;
    double delta0 = 0.6;
};

void validate_weight_spec(const WeightSpec& s);

// r_w is absent away from the singular chart.
struct WeightPoint {
    std::optional<double> r_w;
    double w = 0.0;
};

// Needs 0 < C3 <= 1 and T >= 4 / C3 so that every plateau is nonempty.
double weight_W(const WeightPoint& q, double T, double C3);

// (1 + |w|)^-delta W^(nu + k + alpha) T^mu after the window check.
double weight_rho(const WeightSpec& s, const WeightPoint& q);
// Same product without window checks.
double weight_rho_raw(double delta, double nu, double mu, double k_plus_alpha, const WeightPoint& q, double T,
                      double C3);

// min(2^-delta T^(mu - nu - 2), (2T)^-delta T^mu), a lower bound for rho^(0)_{delta, nu+2, mu} when |w| <= T.
double rho_lower_bound(const WeightSpec& s);

// chi = a z + 1, h = (a z + 1) / ((2/3) a z^3 + z^2 + c).
struct ExactFamily {
    double a = 0.0;
    double c = 0.01;
    double h(double z) const { return h_jet(z).f; }
    Jet h_jet(double z) const;
    double chi(double z) const { return a * z + 1.0; }
    double chi_z() const { return a; }
};

// (log h - log chi)_z + 2 h z.
double maineqn1_residual(const Jet& h, double chi, double chi_z, double z);

// d_z(delta_h / h0) - delta_chi_z + 2 z delta_h; equals -g_inf identically.
double linearized_residual(const NeckData& nd, const DPoint& q, double z);

// (z^2 + T^-2) dh_zz + 6 z dh_z + 4 dh + Delta_D dh with Delta_D from fourth-order differences of step hD.
double deltah_eqn_residual_fd(const DeltaH& dh, const DPoint& q, double z, double hD = 1e-2);

// D-invariant reduced data with the potential normalization C'.
struct ReducedProfile {
    std::function<double(double)> h;
    std::function<double(double)> chi;
    double C_prime = 0.0;
    std::vector<double> breakpoints; // kinks and zone edges, passed to the quadrature
};

ReducedProfile zero_mode_profile(const NeckData& nd);
ReducedProfile exact_family_profile(const ExactFamily& f);

// phi(z) = int_0^z 2 h(u) u du + C' on an arbitrary grid.
std::vector<double> kahler_potential(const ReducedProfile& p, std::span<const double> grid);
std::function<double(double)> kahler_potential_zero_mode(const NeckData& nd);

struct ZoneErr {
    Zone zone = Zone::inner;
    double sup_err = 0.0;
    std::size_t points = 0;
};

struct ErrReport {
    double T = 0.0;
    double sup_err = 0.0;
    Zone worst_zone = Zone::inner;
    std::vector<ZoneErr> zones;
    std::size_t grid_size = 0;
};

// Grid uniform in asinh(T z) over [-1, 1/2], z = 0 excluded.
std::vector<double> default_err_grid(double T, std::size_t n = 801);

// Err_KE = (chi / h) e^-phi - 1.
ErrReport einstein_error(const ReducedProfile& p, std::span<const double> grid,
                         const std::function<Zone(double)>& zone_of, double T);
ErrReport einstein_error_zero_mode(const NeckData& nd, std::span<const double> grid);

struct LimitReport {
    int case_id = 0;
    double T = 0.0;
    double deviation = 0.0;
    double bound = 0.0;
    bool passed = false;
    std::string model;
};

// Regimes: 1: T r_w <= 5. 2: T r_w >= 10, r_w <= 0.1. 3: r_w in [0.5, 2], |w| <= 5. 4: |w| >= 10.
// Case 4 uses the chart only through w; the patch runs over D at z = w / T.
LimitReport rescaled_limit_compare(const NeckData& nd, int case_id, const SingularChart& base);

struct OrderFit {
    std::vector<double> T;
    std::vector<double> values;
    double slope = 0.0;
    double expected = 0.0;
    bool passed = false;
};

// Slope of log(values) against log(T), passes within tol of expected.
OrderFit fit_order(std::span<const double> T, std::span<const double> values, double expected, double tol = 0.3);

struct GrowthFit {
    double lambda = 0.0;
    double minus_beta = 0.0;
    double slope = 0.0;
    bool exceeds_threshold = false; // -beta > (sqrt 5 - 1)/2
};

// Re F and Im F of F(alpha, beta, 1; (1 + i w)/2) both solve (1 + w^2) u'' + 2 w u' - (1 + lambda^2) u = 0.
// Slope of log|F| against log w on [w_lo, w_hi].
GrowthFit cylinder_mode_growth(double lambda, double w_lo = 20.0, double w_hi = 200.0);

struct CorrectorOptions {
    int nodes = 65; // per zone
    double tol = 1e-10;
    int max_iter = 40;
    double damping = 0.5;
    double contraction_limit = 0.5; // C_fit ||F(y0)|| must stay below this
};

struct CorrectorResult {
    bool converged = false;
    int iterations = 0;
    std::vector<double> residual_log; // ||F|| before each step and after the last
    double initial_residual = 0.0;
    double final_residual = 0.0;
    double correction_norm = 0.0; // max |y* - y0|, y = log h
    double C_fit = 0.0;           // ||J(y0)^-1||_inf
    bool bound_holds = false;     // correction_norm <= 2 C_fit initial_residual
    Eigen::VectorXd z;
    Eigen::VectorXd h;
    Eigen::VectorXd chi;
};

// Collocation of (log h)_z = (log chi)_z - 2 h z with chi = 1 + k z on [-1, 0] and [0, 1/2], in s = asinh(T z).
// h(0) = T^2 is pinned from the left and log h is continuous at 0.
CorrectorResult reduced_nonlinear_correct(double T, int k_minus, int k_plus, const std::function<double(double)>& h0,
                                          const CorrectorOptions& opt = {});
// Starts from the linearized zero-mode h.
CorrectorResult reduced_nonlinear_correct(const NeckData& nd, const CorrectorOptions& opt = {});

} // namespace kneck

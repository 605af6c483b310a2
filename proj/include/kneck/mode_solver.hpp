#pragma once

#include "kneck/specfun.hpp"

#include <array>
#include <memory>
#include <span>
#include <vector>

namespace kneck {

struct SigmaClassification {
    double lambda = 0.0;
    bool in_sigma = false;
    double nearest_integer_gap = 0.0;
};

struct ModeOptions {
    double lambda_max = 60.0;
    double sigma_tol = 1e-9;
    std::array<double, 3> ladder = {1e-3, 5e-4, 2.5e-4};
    double extrapolation_tol = 1e-6;
};

// Value and first two derivatives.
struct Jet {
    double f = 0.0;
    double df = 0.0;
    double d2f = 0.0;
};

HypergeomParams hypergeom_params_of(double lambda);
SigmaClassification classify_sigma(double lambda, double tol = 1e-9);
cplx wronskian_at_zero(const HypergeomParams& p, double T);

// Decaying solution phi of (1 + u^2) phi'' + 6 u phi' + (4 - lambda^2) phi = 0 on u >= 0,
// normalized so that phi(u) u^alpha -> 1.
class DecayProfile {
public:
    explicit DecayProfile(double lambda);

    Jet eval(double u) const;

    // int_0^U u phi(u) du, exact through the ODE.
    double moment(double U) const;

    double lambda() const { return lambda_; }
    double alpha() const { return alpha_; }
    double far_radius() const { return u_far_; }

private:
    Jet far_series(double u) const;
    Jet taylor_from(std::size_t node, double u) const;

    double lambda_;
    double alpha_;
    double beta_;
    double u_far_;
    std::vector<double> a_;    // far-series coefficients of u^{-alpha-2k}
    std::vector<double> u_;    // nodes, descending from u_far to 0
    std::vector<double> phi_;
    std::vector<double> dphi_;
};

class ModeSolution {
public:
    enum class Kind { zero, decaying, extrapolated };

    struct Term {
        double weight;
        std::shared_ptr<const DecayProfile> profile;
    };

    static ModeSolution make_zero(double T, double psi);
    static ModeSolution make_combination(Kind kind, double lambda, double T, double psi, std::vector<Term> terms);

    // One-sided (right) second derivative at z = 0.
    Jet eval(double z) const;
    double value(double z) const { return eval(z).f; }

    // int_0^z s f(s) ds.
    double moment_integral(double z) const;

    Kind kind() const { return kind_; }
    double lambda() const { return lambda_; }
    double T() const { return T_; }
    double psi() const { return psi_; }

    // Variation-of-parameters data; NaN where undefined (zero mode, Sigma limits).
    double C1 = 0.0;
    double rho_coeff = 0.0;
    double amplitude_jump = 0.0; // pi psi T / phi'(0+), NaN for combinations
    double error_bar = 0.0;

private:
    Kind kind_ = Kind::zero;
    double lambda_ = 0.0;
    double T_ = 1.0;
    double psi_ = 0.0;
    std::vector<Term> terms_;
};

ModeSolution decaying_mode(double lambda, double T, double psi_at_p, const ModeOptions& opt = {});

ModeSolution mode_at_sigma(double lambda_star, double T, double psi_at_p, const ModeOptions& opt = {});

// Limit from one side only (side = +1 from above, -1 from below).
ModeSolution mode_at_sigma_one_sided(double lambda_star, double T, double psi_at_p, int side,
                                     const ModeOptions& opt = {});

ModeSolution zero_mode(double T, double psi0_at_p);

// Dispatches to zero_mode, mode_at_sigma or decaying_mode.
ModeSolution solve_mode(double lambda, double T, double psi_at_p, const ModeOptions& opt = {});

double mode_value_at_zero_closed_form(double lambda, double T, double psi_at_p);

// f from the two-series formula with the hypergeometric function evaluated directly.
// Uses the disk series where it converges and ODE path continuation elsewhere.
double mode_value_hypergeometric(double lambda, double T, double psi_at_p, double z);

struct MonotonicityReport {
    bool passed = true;
    std::vector<double> violations; // z where the expected order fails
    double max_violation = 0.0;
};
MonotonicityReport monotonicity_check(const ModeSolution& m, std::span<const double> grid);

struct DecayFit {
    double slope = 0.0;
    double residual = 0.0;
};
DecayFit decay_exponent_fit(const ModeSolution& m, double z_lo, double z_hi, int samples = 64);

// (z^2 + T^-2) f'' + 6 z f' + (4 - lambda^2) f with f'' and f' from central differences of f.
double mode_ode_residual_fd(const ModeSolution& m, double z, double h);

// T^-2 (f'(0+) - f'(0-)) by one-sided second-order differences.
double derivative_jump(const ModeSolution& m, double h);

} // namespace kneck

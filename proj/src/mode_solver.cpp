#include "kneck/mode_solver.hpp"

#include "kneck/errors.hpp"
#include "kneck/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace kneck {

namespace {

constexpr double nan_v = std::numeric_limits<double>::quiet_NaN();

double sgn(double z)
{
    return z < 0.0 ? -1.0 : 1.0;
}

// Closed-form amplitude of phi(T|z|) in the two-series representation.
double closed_form_amplitude(const HypergeomParams& p, double T, double psi)
{
    const double a = p.alpha;
    const double b = p.beta;
    const double s = std::sin(0.5 * pi * (a - b)) / std::cos(0.5 * pi * b);
    const double g = gamma_ratio({0.5 * (2.0 + a), 0.5 * (2.0 + b), 3.0, b - a}, {0.5, 4.0, b, 3.0 - a});
    return psi * 6.0 * pi * T / (a * b) * std::exp2(a) * s * g;
}

double c1_of(const HypergeomParams& p, double T, double psi)
{
    return psi * 12.0 * pi * T / (p.alpha * p.beta) *
           gamma_ratio({0.5 * (2.0 + p.alpha), 0.5 * (2.0 + p.beta)}, {0.5, 4.0});
}

void check_lambda(double lambda, const ModeOptions& opt)
{
    if (!(lambda >= 0.0))
        throw DomainError("lambda must be nonnegative");
    if (lambda > opt.lambda_max)
        throw OverflowError("lambda " + std::to_string(lambda) + " exceeds the configured maximum");
}

} // namespace

HypergeomParams hypergeom_params_of(double lambda)
{
    if (lambda < 0.0)
        throw DomainError("hypergeom_params_of: lambda < 0");
    const double r = std::sqrt(9.0 + 4.0 * lambda * lambda);
    const double alpha = 0.5 * (5.0 + r);
    return {alpha, 5.0 - alpha, 3.0, lambda};
}

SigmaClassification classify_sigma(double lambda, double tol)
{
    const double r = std::sqrt(9.0 + 4.0 * lambda * lambda);
    const double gap = std::abs(r - std::round(r));
    return {lambda, lambda > 0.0 && gap <= tol, gap};
}

cplx wronskian_at_zero(const HypergeomParams& p, double T)
{
    const double d = p.alpha - p.beta;
    if (std::abs(d - std::round(d)) <= 1e-9)
        throw SigmaError("wronskian_at_zero: lambda in Sigma");
    const double a = p.alpha;
    const double b = p.beta;
    const double g = gamma_ratio({0.5, 0.5, 0.5 * (1.0 + a + b), 0.5 * (3.0 + a + b)},
                                 {0.5 * (1.0 + a), 0.5 * (2.0 + a), 0.5 * (1.0 + b), 0.5 * (2.0 + b)});
    return cplx(0.0, -T * a * b / p.gamma * g);
}

DecayProfile::DecayProfile(double lambda) : lambda_(lambda)
{
    const HypergeomParams p = hypergeom_params_of(lambda);
    alpha_ = p.alpha;
    beta_ = p.beta;
    u_far_ = std::max(4.0, 2.0 * std::sqrt(alpha_));

    a_.push_back(1.0);
    for (int k = 1; k < 400; ++k) {
        const double kd = k;
        const double ak = -a_.back() * (alpha_ + 2 * kd - 2) * (alpha_ + 2 * kd - 1) / (2 * kd * (alpha_ - beta_ + 2 * kd));
        a_.push_back(ak);
        if (std::abs(ak) * std::pow(u_far_, -2.0 * kd) < 1e-18)
            break;
    }

    const Jet start = far_series(u_far_);
    u_.push_back(u_far_);
    phi_.push_back(start.f);
    dphi_.push_back(start.df);
    const double l2 = lambda_ * lambda_;
    while (u_.back() > 0.0) {
        const double u0 = u_.back();
        const double radius = std::sqrt(1.0 + u0 * u0);
        const double h = std::min(0.4 * radius / std::max(1.0, lambda_ / 8.0), u0);
        const double t = -h;
        double dm = phi_.back();
        double dn = dphi_.back() * t;
        double val = dm + dn;
        double der = dphi_.back();
        int small = 0;
        for (int n = 0; n < 5000; ++n) {
            const double nd = n;
            const double d2 = -(2 * u0 * (nd + 3) * (nd + 1) * dn * t + ((nd + 1) * (nd + 4) - l2) * dm * t * t) /
                              ((u0 * u0 + 1) * (nd + 2) * (nd + 1));
            val += d2;
            der += (nd + 2) * d2 / t;
            dm = dn;
            dn = d2;
            if (std::abs(d2) < 1e-18 * std::abs(val) && nd > 4) {
                if (++small >= 2)
                    break;
            } else {
                small = 0;
            }
        }
        const double unew = (h == u0) ? 0.0 : u0 - h;
        u_.push_back(unew);
        phi_.push_back(val);
        dphi_.push_back(der);
    }
}

Jet DecayProfile::far_series(double u) const
{
    double f = 0.0, df = 0.0, d2f = 0.0;
    const double lu = std::log(u);
    for (std::size_t k = 0; k < a_.size(); ++k) {
        const double s = alpha_ + 2.0 * static_cast<double>(k);
        const double term = a_[k] * std::exp(-s * lu);
        f += term;
        df += -s * term / u;
        d2f += s * (s + 1) * term / (u * u);
        if (k > 2 && std::abs(term) < 1e-18 * std::abs(f))
            break;
    }
    return {f, df, d2f};
}

Jet DecayProfile::taylor_from(std::size_t node, double u) const
{
    const double u0 = u_[node];
    const double t = u - u0;
    const double f0 = phi_[node];
    const double f1 = dphi_[node];
    const double l2 = lambda_ * lambda_;
    const double f2 = -(6.0 * u0 * f1 + (4.0 - l2) * f0) / (1.0 + u0 * u0);
    if (t == 0.0)
        return {f0, f1, f2};
    double dm = f0;
    double dn = f1 * t;
    double val = dm + dn;
    double der = f1;
    double sec = 0.0;
    int small = 0;
    for (int n = 0; n < 5000; ++n) {
        const double nd = n;
        const double d2 = -(2 * u0 * (nd + 3) * (nd + 1) * dn * t + ((nd + 1) * (nd + 4) - l2) * dm * t * t) /
                          ((u0 * u0 + 1) * (nd + 2) * (nd + 1));
        val += d2;
        der += (nd + 2) * d2 / t;
        sec += (nd + 2) * (nd + 1) * d2 / (t * t);
        dm = dn;
        dn = d2;
        if (std::abs(d2) < 1e-18 * std::abs(val) && nd > 4) {
            if (++small >= 2)
                break;
        } else {
            small = 0;
        }
    }
    return {val, der, sec};
}

Jet DecayProfile::eval(double u) const
{
    if (u < 0.0)
        throw DomainError("DecayProfile::eval: u < 0");
    if (u >= u_far_)
        return far_series(u);
    // Nodes are descending; pick the nearest.
    auto it = std::lower_bound(u_.begin(), u_.end(), u, std::greater<double>());
    std::size_t idx = static_cast<std::size_t>(it - u_.begin());
    if (idx >= u_.size())
        idx = u_.size() - 1;
    if (idx > 0 && std::abs(u_[idx - 1] - u) < std::abs(u_[idx] - u))
        --idx;
    return taylor_from(idx, u);
}

double DecayProfile::moment(double U) const
{
    const Jet j = eval(U);
    const double phi0 = phi_.back();
    return (U * (1.0 + U * U) * j.df + (3.0 * U * U - 1.0) * j.f + phi0) / (2.0 + lambda_ * lambda_);
}

ModeSolution ModeSolution::make_zero(double T, double psi)
{
    ModeSolution m;
    m.kind_ = Kind::zero;
    m.lambda_ = 0.0;
    m.T_ = T;
    m.psi_ = psi;
    m.C1 = nan_v;
    m.rho_coeff = nan_v;
    m.amplitude_jump = nan_v;
    return m;
}

ModeSolution ModeSolution::make_combination(Kind kind, double lambda, double T, double psi, std::vector<Term> terms)
{
    ModeSolution m;
    m.kind_ = kind;
    m.lambda_ = lambda;
    m.T_ = T;
    m.psi_ = psi;
    m.terms_ = std::move(terms);
    return m;
}

Jet ModeSolution::eval(double z) const
{
    const double s = sgn(z);
    const double u = T_ * std::abs(z);
    if (kind_ == Kind::zero) {
        const double v2 = u * u;
        const double q = 1.0 + v2;
        const double g = u * (1.0 + v2 / 3.0) / (q * q);
        const double g1 = (1.0 - 2.0 * v2 - v2 * v2 / 3.0) / (q * q * q);
        const double g2 = u * (-10.0 + (20.0 / 3.0) * v2 + (2.0 / 3.0) * v2 * v2) / (q * q * q * q);
        const double c = pi * T_ * psi_;
        return {c * g, c * T_ * s * g1, c * T_ * T_ * g2};
    }
    Jet out;
    for (const Term& t : terms_) {
        const Jet j = t.profile->eval(u);
        out.f += t.weight * j.f;
        out.df += t.weight * T_ * s * j.df;
        out.d2f += t.weight * T_ * T_ * j.d2f;
    }
    return out;
}

double ModeSolution::moment_integral(double z) const
{
    const double u = T_ * std::abs(z);
    if (kind_ == Kind::zero)
        return pi * psi_ / (3.0 * T_) * u * u * u / (1.0 + u * u);
    double acc = 0.0;
    for (const Term& t : terms_)
        acc += t.weight * t.profile->moment(u);
    return acc / (T_ * T_);
}

ModeSolution decaying_mode(double lambda, double T, double psi_at_p, const ModeOptions& opt)
{
    check_lambda(lambda, opt);
    if (lambda == 0.0)
        throw DomainError("decaying_mode: lambda must be positive; use zero_mode");
    if (!(T > 0.0))
        throw DomainError("decaying_mode: T must be positive");
    const SigmaClassification sc = classify_sigma(lambda, opt.sigma_tol);
    if (sc.in_sigma)
        throw SigmaError("decaying_mode: lambda " + std::to_string(lambda) + " lies in Sigma");
    const HypergeomParams p = hypergeom_params_of(lambda);
    auto prof = std::make_shared<const DecayProfile>(lambda);
    const double amp = closed_form_amplitude(p, T, psi_at_p);
    ModeSolution m = ModeSolution::make_combination(ModeSolution::Kind::decaying, lambda, T, psi_at_p, {{amp, prof}});
    m.C1 = c1_of(p, T, psi_at_p);
    m.rho_coeff = -std::tan(0.5 * pi * p.beta);
    m.amplitude_jump = pi * psi_at_p * T / prof->eval(0.0).df;
    return m;
}

namespace {

// Terms of a Richardson combination over the ladder, each weight multiplying decaying_mode(lambda_i).
ModeSolution ladder_combination(double lambda_star, double T, double psi, const std::vector<std::pair<double, double>>& lw,
                                const std::vector<std::pair<double, double>>& lw_check, const ModeOptions& opt)
{
    std::vector<ModeSolution::Term> terms;
    std::vector<ModeSolution::Term> check;
    auto term_of = [&](double l, double w) -> ModeSolution::Term {
        if (classify_sigma(l, opt.sigma_tol).in_sigma)
            throw SigmaError("mode_at_sigma: ladder point lies in Sigma");
        return {w * closed_form_amplitude(hypergeom_params_of(l), T, psi), std::make_shared<const DecayProfile>(l)};
    };
    for (const auto& [l, w] : lw)
        terms.push_back(term_of(l, w));
    for (const auto& [l, w] : lw_check)
        check.push_back(term_of(l, w));
    ModeSolution best = ModeSolution::make_combination(ModeSolution::Kind::extrapolated, lambda_star, T, psi, terms);
    ModeSolution lower = ModeSolution::make_combination(ModeSolution::Kind::extrapolated, lambda_star, T, psi, check);
    double scale = 0.0, diff = 0.0;
    for (double u : linspace(0.0, 10.0, 41)) {
        const double z = u / T;
        const double a = best.value(z);
        const double b = lower.value(z);
        scale = std::max(scale, std::abs(a));
        diff = std::max(diff, std::abs(a - b));
    }
    best.error_bar = scale > 0.0 ? diff / scale : diff;
    best.C1 = nan_v;
    best.rho_coeff = nan_v;
    best.amplitude_jump = nan_v;
    if (best.error_bar > opt.extrapolation_tol)
        throw ConvergenceError("mode_at_sigma: extrapolation error bar " + std::to_string(best.error_bar) +
                               " above tolerance");
    return best;
}

} // namespace

ModeSolution mode_at_sigma(double lambda_star, double T, double psi_at_p, const ModeOptions& opt)
{
    check_lambda(lambda_star, opt);
    const auto& e = opt.ladder;
    // m(eps) = (f(l+eps) + f(l-eps))/2 is even in eps; two Richardson levels in eps^2.
    const double w1 = 1.0 / 45.0, w2 = -20.0 / 45.0, w3 = 64.0 / 45.0;
    std::vector<std::pair<double, double>> lw = {{lambda_star + e[0], 0.5 * w1}, {lambda_star - e[0], 0.5 * w1},
                                                 {lambda_star + e[1], 0.5 * w2}, {lambda_star - e[1], 0.5 * w2},
                                                 {lambda_star + e[2], 0.5 * w3}, {lambda_star - e[2], 0.5 * w3}};
    std::vector<std::pair<double, double>> lc = {{lambda_star + e[1], -0.5 / 3.0}, {lambda_star - e[1], -0.5 / 3.0},
                                                 {lambda_star + e[2], 0.5 * 4.0 / 3.0}, {lambda_star - e[2], 0.5 * 4.0 / 3.0}};
    return ladder_combination(lambda_star, T, psi_at_p, lw, lc, opt);
}

ModeSolution mode_at_sigma_one_sided(double lambda_star, double T, double psi_at_p, int side, const ModeOptions& opt)
{
    check_lambda(lambda_star, opt);
    const auto& e = opt.ladder;
    const double s = side >= 0 ? 1.0 : -1.0;
    // g(eps) = L + a eps + b eps^2.
    std::vector<std::pair<double, double>> lw = {
        {lambda_star + s * e[0], 1.0 / 3.0}, {lambda_star + s * e[1], -2.0}, {lambda_star + s * e[2], 8.0 / 3.0}};
    std::vector<std::pair<double, double>> lc = {{lambda_star + s * e[1], -1.0}, {lambda_star + s * e[2], 2.0}};
    ModeOptions relaxed = opt;
    relaxed.extrapolation_tol = std::max(opt.extrapolation_tol, 1e-4);
    return ladder_combination(lambda_star, T, psi_at_p, lw, lc, relaxed);
}

ModeSolution zero_mode(double T, double psi0_at_p)
{
    if (!(T > 0.0))
        throw DomainError("zero_mode: T must be positive");
    return ModeSolution::make_zero(T, psi0_at_p);
}

ModeSolution solve_mode(double lambda, double T, double psi_at_p, const ModeOptions& opt)
{
    if (lambda == 0.0)
        return zero_mode(T, psi_at_p);
    if (classify_sigma(lambda, opt.sigma_tol).in_sigma)
        return mode_at_sigma(lambda, T, psi_at_p, opt);
    return decaying_mode(lambda, T, psi_at_p, opt);
}

double mode_value_at_zero_closed_form(double lambda, double T, double psi_at_p)
{
    if (!(lambda > 2.0))
        throw DomainError("mode_value_at_zero_closed_form: requires lambda > 2");
    if (classify_sigma(lambda).in_sigma)
        throw SigmaError("mode_value_at_zero_closed_form: lambda in Sigma");
    const HypergeomParams p = hypergeom_params_of(lambda);
    const double a = p.alpha;
    const double b = p.beta;
    const double g = gamma_ratio({0.5 * (2.0 + a), 0.5 * (2.0 + b), 0.5, 3.0},
                                 {0.5, 4.0, 0.5 * (1.0 + a), 0.5 * (1.0 + b)});
    return -12.0 * pi * T * psi_at_p / (2.0 * a * b) * g * std::tan(0.5 * pi * b);
}

double mode_value_hypergeometric(double lambda, double T, double psi_at_p, double z)
{
    if (classify_sigma(lambda).in_sigma)
        throw SigmaError("mode_value_hypergeometric: lambda in Sigma");
    const HypergeomParams p = hypergeom_params_of(lambda);
    const double c1 = c1_of(p, T, psi_at_p);
    const double rho = -std::tan(0.5 * pi * p.beta);
    const cplx x(0.5, 0.5 * T * z);
    const cplx F = std::abs(x) < 0.9 ? hyp2f1_disk(p, x).value : hyp2f1_path(p, x).value;
    const double sigma0 = z >= 0.0 ? 1.0 : 0.0;
    return c1 * ((sigma0 - 0.5) * F.imag() + 0.5 * rho * F.real());
}

MonotonicityReport monotonicity_check(const ModeSolution& m, std::span<const double> grid)
{
    if (!(m.lambda() > 2.0))
        throw DomainError("monotonicity_check: requires lambda > 2");
    MonotonicityReport rep;
    std::vector<double> f(grid.size());
    double fmax = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        f[i] = m.value(grid[i]);
        fmax = std::max(fmax, std::abs(f[i]));
    }
    const double tol = 1e-9 * fmax;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = grid[i];
        const double b = grid[i + 1];
        double excess = 0.0;
        if (b <= 0.0)
            excess = f[i + 1] - f[i]; // nonincreasing
        else if (a >= 0.0)
            excess = f[i] - f[i + 1]; // nondecreasing
        if (excess > tol) {
            rep.passed = false;
            rep.violations.push_back(b);
            rep.max_violation = std::max(rep.max_violation, excess);
        }
    }
    return rep;
}

DecayFit decay_exponent_fit(const ModeSolution& m, double z_lo, double z_hi, int samples)
{
    if (!(z_lo > 0.0 && z_hi > z_lo))
        throw DomainError("decay_exponent_fit: need 0 < z_lo < z_hi");
    if (m.T() * z_lo < 5.0)
        throw DomainError("decay_exponent_fit: window must satisfy T z >= 5");
    std::vector<double> lx, ly;
    for (double z : logspace(z_lo, z_hi, static_cast<std::size_t>(samples))) {
        const double f = std::abs(m.value(z));
        if (f == 0.0)
            throw DomainError("decay_exponent_fit: f vanishes on the window");
        lx.push_back(std::log(m.T() * z));
        ly.push_back(std::log(f));
    }
    const LineFit fit = fit_line(lx, ly);
    return {fit.slope, fit.rms_residual};
}

double mode_ode_residual_fd(const ModeSolution& m, double z, double h)
{
    auto f = [&](double s) { return m.value(s); };
    const double d1 = diff1(f, z, h);
    const double d2 = diff2(f, z, h);
    const double T = m.T();
    const double l = m.lambda();
    return (z * z + 1.0 / (T * T)) * d2 + 6.0 * z * d1 + (4.0 - l * l) * f(z);
}

double derivative_jump(const ModeSolution& m, double h)
{
    const double f0 = m.value(0.0);
    const double right = (-3.0 * f0 + 4.0 * m.value(h) - m.value(2.0 * h)) / (2.0 * h);
    const double left = (3.0 * f0 - 4.0 * m.value(-h) + m.value(-2.0 * h)) / (2.0 * h);
    const double T = m.T();
    return (right - left) / (T * T);
}

} // namespace kneck

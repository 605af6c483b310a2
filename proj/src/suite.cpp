#include "kneck/suite.hpp"

#include "kneck/errors.hpp"
#include "kneck/model_spaces.hpp"
#include "kneck/numerics.hpp"
#include "kneck/specfun.hpp"
#include "kneck/validation.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <sstream>

namespace kneck {

namespace {

std::string tag(const std::string& key, double v)
{
    std::ostringstream os;
    os << key << '=' << v;
    return os.str();
}

CheckRow row(const std::string& id, double T, const std::string& where, double value, double bound, bool pass)
{
    return {id, T, where, value, bound, pass};
}

CheckRow below(const std::string& id, double T, const std::string& where, double value, double bound)
{
    return row(id, T, where, value, bound, value < bound);
}

NeckConfig neck_config(const SuiteConfig& cfg, double T, bool zero_mode_only)
{
    NeckConfig nc;
    nc.T = T;
    nc.k_minus = cfg.k_minus;
    nc.k_plus = cfg.k_plus;
    nc.zero_mode_only = zero_mode_only;
    return nc;
}

// Adaptive Dormand-Prince through the grid points, starting from the solver's own jet at grid.front().
std::vector<double> rk_mode_values(double lambda, double T, const Jet& start, std::span<const double> grid)
{
    namespace odeint = boost::numeric::odeint;
    using State = std::array<double, 2>;
    const double c = 1.0 / (T * T);
    auto rhs = [&](const State& y, State& dy, double z) {
        dy[0] = y[1];
        dy[1] = -(6.0 * z * y[1] + (4.0 - lambda * lambda) * y[0]) / (z * z + c);
    };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-13, 1e-13);
    State y{start.f, start.df};
    std::vector<double> out{y[0]};
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double dz = 1e-3 * (grid[i] - grid[i - 1]);
        odeint::integrate_adaptive(stepper, rhs, y, grid[i - 1], grid[i], dz);
        out.push_back(y[0]);
    }
    return out;
}

void gauss_identity(const SuiteConfig&, std::vector<CheckRow>& rows)
{
    for (double lambda : {0.5, 1.0, 1.5, 3.3}) {
        const HypergeomParams p = hypergeom_params_of(lambda);
        const double series = hyp2f1_disk(p, cplx(0.5, 0.0)).value.real();
        const double closed = gauss_half_value(p);
        rows.push_back(below("gauss_half", 0.0, tag("lambda", lambda), std::abs(series - closed) / std::abs(closed), 1e-10));
    }
}

void mode_ode(const SuiteConfig&, std::vector<CheckRow>& rows)
{
    for (double T : {10.0, 50.0})
        for (double lambda : {0.0, 1.0, 2.0, 3.0, 7.0}) {
            const ModeSolution m = lambda == 2.0 ? mode_at_sigma(lambda, T, 1.0) : solve_mode(lambda, T, 1.0);
            const std::vector<double> left = linspace(-1.0, -0.01, 199);
            const std::vector<double> right = linspace(0.5, 0.01, 99);
            double fmax = 0.0;
            for (double z : linspace(-1.0, 0.5, 3001))
                fmax = std::max(fmax, std::abs(m.value(z)));
            double res = 0.0;
            double rk = 0.0;
            for (const auto* g : {&left, &right}) {
                const std::vector<double> ref = rk_mode_values(lambda, T, m.eval(g->front()), *g);
                for (std::size_t i = 0; i < g->size(); ++i) {
                    const double z = (*g)[i];
                    res = std::max(res, std::abs(mode_ode_residual_fd(m, z, 1e-3 * (std::abs(z) + 1.0 / T))));
                    rk = std::max(rk, std::abs(m.value(z) - ref[i]));
                }
            }
            const std::string where = tag("lambda", lambda);
            rows.push_back(below("mode_ode_residual", T, where, res / fmax, 1e-5));
            rows.push_back(below("mode_vs_rk", T, where, rk / fmax, 1e-6));
        }
}

void sign_monotonicity(const SuiteConfig&, std::vector<CheckRow>& rows)
{
    const std::vector<double> grid = linspace(-1.0, 0.5, 301);
    for (double T : {10.0, 50.0})
        for (double lambda : {2.5, 3.0, 4.5, 7.0, 12.0}) {
            const ModeSolution m = solve_mode(lambda, T, 1.0);
            const std::string where = tag("lambda", lambda);
            const double f0 = m.value(0.0);
            rows.push_back(row("f_at_zero_nonpositive", T, where, f0, 0.0, f0 <= 0.0));
            const MonotonicityReport rep = monotonicity_check(m, grid);
            rows.push_back(row("monotonicity", T, where, rep.max_violation, 0.0, rep.passed));
        }
}

void decay_exponent(const SuiteConfig&, std::vector<CheckRow>& rows)
{
    const double T = 100.0;
    for (double lambda : {1.0, 3.0}) {
        const double alpha = hypergeom_params_of(lambda).alpha;
        const DecayFit fit = decay_exponent_fit(solve_mode(lambda, T, 1.0), 10.0 / T, 50.0 / T);
        rows.push_back(below("decay_slope", T, tag("lambda", lambda), std::abs(fit.slope + alpha) / alpha, 0.05));
    }
}

void exact_family(const SuiteConfig&, std::vector<CheckRow>& rows)
{
    for (const auto& [a, c] : {std::pair{0.0, 0.01}, std::pair{1.0, 0.05}}) {
        const ExactFamily f{a, c};
        const std::string where = tag("a", a) + ";" + tag("c", c);
        std::vector<double> grid;
        for (double z : linspace(-0.95, 0.5, 581))
            if (std::abs(z) > 1e-12)
                grid.push_back(z);
        double res = 0.0;
        for (double z : grid)
            res = std::max(res, std::abs(maineqn1_residual(f.h_jet(z), f.chi(z), f.chi_z(), z)));
        rows.push_back(below("exact_family_equation", 0.0, where, res, 1e-12));
        const ErrReport e = einstein_error(exact_family_profile(f), grid, [](double) { return Zone::inner; }, 0.0);
        rows.push_back(below("exact_family_err", 0.0, where, e.sup_err, 1e-10));
    }
}

void einstein_order(const SuiteConfig& cfg, std::vector<CheckRow>& rows)
{
    const SpectrumData spec = default_neck_spectrum(cfg.torus_modes);
    std::vector<double> errs;
    for (double T : cfg.T_list) {
        const NeckData nd(spec, neck_config(cfg, T, true));
        const ErrReport e = einstein_error_zero_mode(nd, default_err_grid(T));
        errs.push_back(e.sup_err);
        rows.push_back(row("err_sup", T, to_string(e.worst_zone), e.sup_err, 0.0, std::isfinite(e.sup_err)));
    }
    const OrderFit f = fit_order(cfg.T_list, errs, -1.0);
    rows.push_back(row("err_order", 0.0, "fit", f.slope, -1.0, f.passed));
}

void degree_integrals(const SuiteConfig& cfg, std::vector<CheckRow>& rows)
{
    const double T = 50.0;
    const NeckData nd(default_neck_spectrum(cfg.torus_modes), neck_config(cfg, T, false));
    for (double z0 : {-0.5, 0.3}) {
        const double k = z0 < 0.0 ? cfg.k_minus : cfg.k_plus;
        const double v = degree_integral_D_slice(nd, z0);
        const double dev = k == 0.0 ? std::abs(v) : std::abs(v - k) / std::abs(k);
        rows.push_back(below("degree_slice", T, tag("z0", z0), dev, 0.02));
    }
    const double q = nd.charge();
    const double scale = q == 0.0 ? 1.0 : std::abs(q);
    const double coarse = std::abs(degree_integral_sphere(T, 0.05, q) - q) / scale;
    const double fine = std::abs(degree_integral_sphere(T, 0.025, q) - q) / scale;
    rows.push_back(below("degree_sphere", T, "eps=0.05", coarse, 0.01));
    rows.push_back(row("degree_sphere_refines", T, "eps=0.025", fine, coarse, fine <= coarse));
}

void limits(const SuiteConfig& cfg, std::vector<CheckRow>& rows)
{
    const SpectrumData spec = default_neck_spectrum(cfg.torus_modes);
    auto push = [&rows](const LimitReport& r, const std::string& suffix = {}) {
        rows.push_back(row("limit", r.T, "case" + std::to_string(r.case_id) + suffix, r.deviation, r.bound, r.passed));
    };
    std::vector<double> d3, d4;
    for (double T : cfg.T_list) {
        const NeckData nd(spec, neck_config(cfg, T, false));
        push(rescaled_limit_compare(nd, 1, {0.6 / T, 0.0, 0.8 / T}));
        const LimitReport r3 = rescaled_limit_compare(nd, 3, {0.6, 0.3, 1.0});
        const LimitReport r4 = rescaled_limit_compare(nd, 4, {0.0, 0.0, -0.8 * T});
        push(r3);
        push(r4);
        d3.push_back(r3.deviation);
        d4.push_back(r4.deviation);
    }
    for (double T : {100.0, 200.0, 400.0}) {
        const NeckData nd(spec, neck_config(cfg, T, false));
        push(rescaled_limit_compare(nd, 2, {0.06, 0.0, 0.08}));
        if (T == 100.0 && cfg.k_plus < 0)
            push(rescaled_limit_compare(nd, 4, {0.0, 0.0, 0.3 * T}), ":z=0.3");
    }
    const OrderFit f3 = fit_order(cfg.T_list, d3, -1.0);
    const OrderFit f4 = fit_order(cfg.T_list, d4, -1.0);
    rows.push_back(row("limit_order", 0.0, "case3", f3.slope, -1.0, f3.passed));
    rows.push_back(row("limit_order", 0.0, "case4", f4.slope, -1.0, f4.passed));
}

void taub_nut(const SuiteConfig&, std::vector<CheckRow>& rows)
{
    const std::vector<Eigen::Vector4d> pts = {
        {0.7, -0.3, 0.5, 0.9}, {1.1, 0.4, -0.6, 0.2}, {-0.5, 0.8, 0.3, -0.7}, {0.9, 0.9, -0.4, -0.3}, {0.3, -1.2, 0.8, 0.5}};
    const RicciReport r = taub_nut_ricci_check(1.0, pts, 0.02);
    rows.push_back(below("taub_nut_ricci", 0.0, "h=0.02", r.max_ric_h, 1e-4));
    rows.push_back(row("taub_nut_order", 0.0, "halving", r.observed_order, 2.0, r.observed_order >= 2.0));
}

void calabi(const SuiteConfig&, std::vector<CheckRow>& rows)
{
    for (double n : {1.0, 2.0}) {
        const CalabiDomain d = calabi_domain(n);
        double lo = INFINITY;
        double hi = -INFINITY;
        for (double t : linspace(0.05, 0.95, 19)) {
            const double v = calabi_ode_invariant(n, d.lo * t);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        rows.push_back(below("calabi_invariant", 0.0, tag("n", n), hi - lo, 1e-6));
    }
}

void spectral_pde(const SuiteConfig& cfg, std::vector<CheckRow>& rows)
{
    const double T = 10.0;
    const SpectrumData spec = default_neck_spectrum(cfg.torus_modes);
    const DeltaH dh = assemble_delta_h(spec, T, 8.0);
    const int m = 10;
    std::vector<std::pair<DPoint, double>> pts;
    double vmax = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (double z : {-0.8, -0.4, -0.1, -0.05, -0.025, 0.025, 0.05, 0.1, 0.25, 0.45}) {
                const DPoint q = spec.wrap({spec.base_point.t1 + (i + 0.5) * spec.side / m,
                                            spec.base_point.t2 + (j + 0.5) * spec.side / m});
                vmax = std::max(vmax, std::abs(dh.value(q, z)));
                const DPoint d = spec.displacement(q);
                if (std::sqrt(d.t1 * d.t1 + d.t2 * d.t2 + T * T * z * z) > 0.2)
                    pts.push_back({q, z});
            }
    double res = 0.0;
    for (const auto& [q, z] : pts)
        res = std::max(res, std::abs(deltah_eqn_residual_fd(dh, q, z)));
    rows.push_back(below("deltah_equation", T, "r_w>0.2", res / vmax, 1e-3));
}

void corrector(const SuiteConfig& cfg, std::vector<CheckRow>& rows)
{
    const SpectrumData spec = default_neck_spectrum(cfg.torus_modes);
    std::vector<double> norms;
    for (double T : cfg.T_list) {
        const NeckData nd(spec, neck_config(cfg, T, true));
        const CorrectorResult r = reduced_nonlinear_correct(nd);
        rows.push_back(row("corrector_converged", T, "linearized", r.final_residual, CorrectorOptions{}.tol, r.converged));
        rows.push_back(row("corrector_bound", T, "linearized", r.correction_norm, 2.0 * r.C_fit * r.initial_residual,
                           r.bound_holds));
        norms.push_back(r.correction_norm);
    }
    const OrderFit f = fit_order(cfg.T_list, norms, -1.0);
    rows.push_back(row("corrector_order", 0.0, "fit", f.slope, -1.0, f.passed));

    const double T = cfg.T_list.back();
    const ExactFamily lo{static_cast<double>(cfg.k_minus), 1.0 / (T * T)};
    const ExactFamily hi{static_cast<double>(cfg.k_plus), 1.0 / (T * T)};
    const CorrectorResult e =
        reduced_nonlinear_correct(T, cfg.k_minus, cfg.k_plus, [&](double z) { return z < 0.0 ? lo.h(z) : hi.h(z); });
    rows.push_back(row("corrector_exact_start", T, "exact", e.iterations, 0.0, e.iterations == 0 && e.converged));
}

struct Entry {
    const char* name;
    double budget;
    void (*run)(const SuiteConfig&, std::vector<CheckRow>&);
};

const std::array<Entry, criterion_count> entries = {{
    {"Gauss identity at x = 1/2", 1.0, gauss_identity},
    {"mode ODE residual and RK cross-check", 30.0, mode_ode},
    {"sign at z = 0 and monotonicity", 10.0, sign_monotonicity},
    {"decay exponent", 10.0, decay_exponent},
    {"exact-family oracle", 5.0, exact_family},
    {"Einstein-error order", 30.0, einstein_order},
    {"degree integrals", 30.0, degree_integrals},
    {"rescaled limit comparisons", 60.0, limits},
    {"Taub-NUT Ricci flatness", 60.0, taub_nut},
    {"Calabi ODE invariant", 5.0, calabi},
    {"spectral PDE residual", 120.0, spectral_pde},
    {"nonlinear corrector", 60.0, corrector},
}};

} // namespace

CriterionResult run_criterion(int id, const SuiteConfig& cfg)
{
    if (id < 1 || id > criterion_count)
        throw ParameterError("run_criterion: id must lie in 1..12");
    const Entry& e = entries[static_cast<std::size_t>(id - 1)];
    CriterionResult res;
    res.id = id;
    res.name = e.name;
    res.budget_seconds = e.budget;
    const auto t0 = std::chrono::steady_clock::now();
    e.run(cfg, res.rows);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.checks_pass = !res.rows.empty();
    for (const auto& r : res.rows)
        res.checks_pass = res.checks_pass && r.pass;
    return res;
}

std::vector<CriterionResult> run_suite(const SuiteConfig& cfg, const std::vector<int>& ids,
                                       const std::function<void(const CriterionResult&)>& on_done)
{
    std::vector<int> todo = ids;
    if (todo.empty())
        for (int i = 1; i <= criterion_count; ++i)
            todo.push_back(i);
    std::vector<CriterionResult> out;
    for (int id : todo) {
        out.push_back(run_criterion(id, cfg));
        if (on_done)
            on_done(out.back());
    }
    return out;
}

} // namespace kneck

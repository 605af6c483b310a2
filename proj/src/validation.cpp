#include "kneck/validation.hpp"

#include "kneck/errors.hpp"
#include "kneck/model_spaces.hpp"
#include "kneck/numerics.hpp"
#include "kneck/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace kneck {

void validate_weight_spec(const WeightSpec& s)
{
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    if (!(s.delta0 > 0.0 && s.delta0 < golden))
        throw ParameterError("weight spec: delta0 must lie in (0, (sqrt 5 - 1)/2)");
    if (!(s.delta > 0.0 && s.delta < s.delta0))
        throw ParameterError("weight spec: delta outside (0, delta0)");
    if (!(s.nu > -2.0 && s.nu < -1.5))
        throw ParameterError("weight spec: nu outside (-2, -3/2)");
    if (!(s.mu > std::max(s.delta, s.nu + 2.0) && s.mu < 1.0))
        throw ParameterError("weight spec: mu outside (max(delta, nu + 2), 1)");
    if (!(s.alpha >= 0.0 && s.alpha < 1.0))
        throw ParameterError("weight spec: alpha outside [0, 1)");
    if (s.k < 0 || s.k > 2)
        throw ParameterError("weight spec: k must be 0, 1 or 2");
}

double weight_W(const WeightPoint& q, double T, double C3)
{
    if (!(C3 > 0.0 && C3 <= 1.0))
        throw ParameterError("weight_W: C3 must lie in (0, 1]");
    if (!(T >= 4.0 / C3))
        throw ParameterError("weight_W: need T >= 4 / C3");
    if (!q.r_w)
        return 1.0;
    const double r = *q.r_w;
    const double t1 = 1.0 / T;
    if (r <= t1)
        return t1;
    if (r < 2.0 * t1)
        return t1 + smoothstep5((r - t1) / t1) * (r - t1);
    const double half = 0.5 * C3;
    if (r <= half)
        return r;
    if (r < C3)
        return r + smoothstep5((r - half) / half) * (1.0 - r);
    return 1.0;
}

double weight_rho_raw(double delta, double nu, double mu, double k_plus_alpha, const WeightPoint& q, double T,
                      double C3)
{
    const double W = weight_W(q, T, C3);
    return std::pow(1.0 + std::abs(q.w), -delta) * std::pow(W, nu + k_plus_alpha) * std::pow(T, mu);
}

double weight_rho(const WeightSpec& s, const WeightPoint& q)
{
    validate_weight_spec(s);
    return weight_rho_raw(s.delta, s.nu, s.mu, s.k + s.alpha, q, s.T, s.C3);
}

double rho_lower_bound(const WeightSpec& s)
{
    const double near = std::pow(2.0, -s.delta) * std::pow(s.T, s.mu - (s.nu + 2.0));
    const double far = std::pow(2.0 * s.T, -s.delta) * std::pow(s.T, s.mu);
    return std::min(near, far);
}

Jet ExactFamily::h_jet(double z) const
{
    const double N = a * z + 1.0;
    const double D = (2.0 / 3.0) * a * z * z * z + z * z + c;
    const double D1 = 2.0 * a * z * z + 2.0 * z;
    const double D2 = 4.0 * a * z + 2.0;
    const double q = a * D - N * D1;
    return {N / D, q / (D * D), (-N * D2) / (D * D) - 2.0 * D1 * q / (D * D * D)};
}

double maineqn1_residual(const Jet& h, double chi, double chi_z, double z)
{
    return h.df / h.f - chi_z / chi + 2.0 * h.f * z;
}

double linearized_residual(const NeckData& nd, const DPoint& q, double z)
{
    const double c = 1.0 / (nd.T() * nd.T());
    const Jet j = nd.delta_h_field().z_jet(q, z);
    const double d_ratio = j.df * (z * z + c) + 2.0 * z * j.f;
    return d_ratio - nd.dchi_dz(q, z) + 2.0 * z * j.f;
}

double deltah_eqn_residual_fd(const DeltaH& dh, const DPoint& q, double z, double hD)
{
    const double c = 1.0 / (dh.T() * dh.T());
    const Jet j = dh.z_jet(q, z);
    const double lap = diff2([&](double t) { return dh.value({t, q.t2}, z); }, q.t1, hD) +
                       diff2([&](double t) { return dh.value({q.t1, t}, z); }, q.t2, hD);
    return (z * z + c) * j.d2f + 6.0 * z * j.df + 4.0 * j.f + lap;
}

ReducedProfile zero_mode_profile(const NeckData& nd)
{
    ReducedProfile p;
    p.h = [nd](double z) { return nd.h_mean(z); };
    p.chi = [nd](double z) { return nd.chi_mean(z); };
    p.C_prime = -std::log(nd.T() * nd.T());
    const double a = 0.5 * nd.C2() / nd.T();
    p.breakpoints = {-2.0 * a, -a, 0.0, a, 2.0 * a};
    return p;
}

ReducedProfile exact_family_profile(const ExactFamily& f)
{
    ReducedProfile p;
    p.h = [f](double z) { return f.h(z); };
    p.chi = [f](double z) { return f.chi(z); };
    p.C_prime = std::log(f.c);
    p.breakpoints = {0.0};
    return p;
}

std::vector<double> kahler_potential(const ReducedProfile& p, std::span<const double> grid)
{
    auto integrand = [&](double u) { return 2.0 * p.h(u) * u; };
    const QuadratureOptions qo{1e-13, 1e-12, 40};
    std::vector<double> out(grid.size(), 0.0);
    std::vector<std::size_t> idx(grid.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return grid[i] < grid[j]; });
    // Accumulate outward from 0 on each side, splitting at breakpoints.
    auto sweep = [&](auto first, auto last) {
        double prev = 0.0;
        double acc = 0.0;
        for (auto it = first; it != last; ++it) {
            const double z = grid[*it];
            double a = prev;
            std::vector<double> cuts;
            for (double b : p.breakpoints)
                if ((b - a) * (z - b) > 0.0)
                    cuts.push_back(b);
            std::sort(cuts.begin(), cuts.end(), [&](double u, double v) { return std::abs(u) < std::abs(v); });
            for (double b : cuts) {
                acc += adaptive_simpson(integrand, a, b, qo);
                a = b;
            }
            acc += adaptive_simpson(integrand, a, z, qo);
            prev = z;
            out[*it] = acc + p.C_prime;
        }
    };
    const auto split = std::partition_point(idx.begin(), idx.end(), [&](std::size_t i) { return grid[i] < 0.0; });
    sweep(std::make_reverse_iterator(split), idx.rend());
    sweep(split, idx.end());
    return out;
}

std::function<double(double)> kahler_potential_zero_mode(const NeckData& nd)
{
    const ReducedProfile p = zero_mode_profile(nd);
    return [p](double z) {
        const double g[1] = {z};
        return kahler_potential(p, g)[0];
    };
}

std::vector<double> default_err_grid(double T, std::size_t n)
{
    const double s0 = -std::asinh(T);
    const double s1 = std::asinh(0.5 * T);
    std::vector<double> out;
    for (double s : linspace(s0, s1, n)) {
        const double z = std::sinh(s) / T;
        if (std::abs(z) > 1e-14)
            out.push_back(z);
    }
    return out;
}

ErrReport einstein_error(const ReducedProfile& p, std::span<const double> grid,
                         const std::function<Zone(double)>& zone_of, double T)
{
    const std::vector<double> phi = kahler_potential(p, grid);
    ErrReport rep;
    rep.T = T;
    rep.grid_size = grid.size();
    rep.zones = {{Zone::inner, 0.0, 0}, {Zone::blend, 0.0, 0}, {Zone::outer, 0.0, 0}};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double z = grid[i];
        const double err = std::abs(p.chi(z) / p.h(z) * std::exp(-phi[i]) - 1.0);
        ZoneErr& ze = rep.zones[static_cast<std::size_t>(zone_of(z))];
        ++ze.points;
        ze.sup_err = std::max(ze.sup_err, err);
        if (err > rep.sup_err) {
            rep.sup_err = err;
            rep.worst_zone = ze.zone;
        }
    }
    return rep;
}

ErrReport einstein_error_zero_mode(const NeckData& nd, std::span<const double> grid)
{
    return einstein_error(zero_mode_profile(nd), grid, [&nd](double z) { return nd.zone(z); }, nd.T());
}

namespace {

struct PatchPoint {
    DPoint q;
    double z;
    double r_w;
    double w;
};

// Base point and six axis offsets of relative size 5 percent in the chart.
std::vector<PatchPoint> chart_patch(const NeckData& nd, const SingularChart& base)
{
    const SpectrumData& s = nd.spectrum();
    const double r = base.r_w();
    const double d = 0.05 * r;
    std::vector<SingularChart> pts = {base};
    for (int axis = 0; axis < 3; ++axis)
        for (double sg : {-1.0, 1.0}) {
            SingularChart c = base;
            (axis == 0 ? c.a : axis == 1 ? c.b : c.w) += sg * d;
            pts.push_back(c);
        }
    std::vector<PatchPoint> out;
    for (const auto& c : pts) {
        const DPoint q = s.wrap({s.base_point.t1 + c.a, s.base_point.t2 + c.b});
        out.push_back({q, c.w / nd.T(), c.r_w(), c.w});
    }
    return out;
}

} // namespace

LimitReport rescaled_limit_compare(const NeckData& nd, int case_id, const SingularChart& base)
{
    const double T = nd.T();
    const double r = base.r_w();
    LimitReport rep;
    rep.case_id = case_id;
    rep.T = T;
    switch (case_id) {
    case 1: {
        if (!(r > 0.0 && T * r <= 5.0))
            throw RegimeError("case 1 needs 0 < T r_w <= 5");
        rep.model = to_string(ModelKind::taub_nut);
        for (const auto& p : chart_patch(nd, base)) {
            const double ref = T * T * (1.0 / (1.0 + p.w * p.w) + 1.0 / (2.0 * T * p.r_w));
            rep.deviation = std::max(rep.deviation, std::abs(nd.h(p.q, p.z) - ref) / ref);
        }
        rep.bound = 0.05;
        break;
    }
    case 2: {
        if (!(T * r >= 10.0 && r <= 0.1))
            throw RegimeError("case 2 needs T r_w >= 10 and r_w <= 0.1");
        rep.model = to_string(ModelKind::flat_product);
        double rmin = r;
        for (const auto& p : chart_patch(nd, base)) {
            const double dh = std::abs(nd.h(p.q, p.z) * (1.0 + p.w * p.w) / (T * T) - 1.0);
            const double dc = std::abs(nd.chi(p.q, p.z) - flat_product_reduced().chi);
            rep.deviation = std::max({rep.deviation, dh, dc});
            rmin = std::min(rmin, p.r_w);
        }
        rep.bound = 1.0 / (T * rmin);
        break;
    }
    case 3: {
        if (!(r >= 0.5 && r <= 2.0 && std::abs(base.w) <= 5.0))
            throw RegimeError("case 3 needs r_w in [0.5, 2] and |w| <= 5");
        rep.model = to_string(ModelKind::cylinder);
        for (const auto& p : chart_patch(nd, base)) {
            const CylinderReduced cyl = cylinder_reduced(p.w);
            const double dh = std::abs(nd.h(p.q, p.z) / (T * T) - cyl.h_over_T2);
            const double dc = std::abs(nd.chi(p.q, p.z) - cyl.chi);
            rep.deviation = std::max({rep.deviation, dh, dc});
        }
        rep.bound = 0.1;
        break;
    }
    case 4: {
        const double z = base.w / T;
        if (!(std::abs(base.w) >= 10.0) || z < -1.0 || z > 0.5 || nd.zone(z) != Zone::outer)
            throw RegimeError("case 4 needs |w| >= 10 with z in the outer zone of [-1, 1/2]");
        const double n = z < 0.0 ? nd.k_minus() : -nd.k_plus();
        const double zc = z < 0.0 ? z : -z;
        const CalabiDomain dom = calabi_domain(n);
        if (!(zc > dom.lo && zc < dom.hi))
            throw RegimeError("case 4: z outside the Calabi model domain");
        const CalabiProfile cal = calabi_profile(n, zc);
        rep.model = to_string(ModelKind::calabi);
        const SpectrumData& s = nd.spectrum();
        const int m = 6;
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                const DPoint q = s.wrap({s.base_point.t1 + (i + 0.5) * s.side / m, s.base_point.t2 + (j + 0.5) * s.side / m});
                const double dh = std::abs(nd.h(q, z) / cal.h - 1.0);
                const double dc = std::abs(nd.chi(q, z) - cal.chi);
                rep.deviation = std::max({rep.deviation, dh, dc});
            }
        rep.bound = 0.02;
        break;
    }
    default:
        throw ParameterError("rescaled_limit_compare: case must be 1, 2, 3 or 4");
    }
    rep.passed = rep.deviation <= rep.bound;
    return rep;
}

OrderFit fit_order(std::span<const double> T, std::span<const double> values, double expected, double tol)
{
    if (T.size() != values.size() || T.size() < 2)
        throw ParameterError("fit_order: need at least two matched samples");
    OrderFit f;
    f.T.assign(T.begin(), T.end());
    f.values.assign(values.begin(), values.end());
    f.expected = expected;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (!(values[i] > 0.0))
            throw ConvergenceError("fit_order: nonpositive sample, the order is undefined");
        lx.push_back(std::log(T[i]));
        ly.push_back(std::log(values[i]));
    }
    f.slope = fit_line(lx, ly).slope;
    f.passed = std::abs(f.slope - expected) <= tol;
    return f;
}

GrowthFit cylinder_mode_growth(double lambda, double w_lo, double w_hi)
{
    const double root = std::sqrt(5.0 + 4.0 * lambda * lambda);
    const HypergeomParams p{0.5 * (1.0 + root), 0.5 * (1.0 - root), 1.0, lambda};
    std::vector<double> lx, ly;
    for (double w : logspace(w_lo, w_hi, 24)) {
        const double u = std::abs(hyp2f1_path(p, cplx(0.5, 0.5 * w)).value);
        lx.push_back(std::log(w));
        ly.push_back(std::log(std::abs(u)));
    }
    GrowthFit g;
    g.lambda = lambda;
    g.minus_beta = -p.beta;
    g.slope = fit_line(lx, ly).slope;
    g.exceeds_threshold = g.minus_beta > 0.5 * (std::sqrt(5.0) - 1.0);
    return g;
}

} // namespace kneck

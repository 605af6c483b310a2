#include "kneck/neck_assembly.hpp"

#include "kneck/errors.hpp"
#include "kneck/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace kneck {

namespace {

double sgn(double z)
{
    return z < 0.0 ? -1.0 : 1.0;
}

// z-jet of P(d, T z) by fourth-order differences in w; P is smooth in w away from the source.
Jet potential_jet(double side, const DPoint& d, double T, double z)
{
    const double w = T * z;
    const double r = std::sqrt(d.t1 * d.t1 + d.t2 * d.t2 + w * w);
    const double hw = std::min(1e-3, 0.05 * r);
    auto P = [&](double x) { return periodic_potential(side, d.t1, d.t2, x); };
    return {P(w), T * diff1(P, w, hw), T * T * diff2(P, w, hw)};
}

} // namespace

DeltaH::DeltaH(const SpectrumData& spec, double T, double charge, const AssemblyOptions& opt)
    : spec_(spec), T_(T), charge_(charge), opt_(opt)
{
    if (!(T > 0.0))
        throw DomainError("DeltaH: T must be positive");
    if (opt.subtract_singularity && spec.provider != ProviderTag::torus)
        throw ParameterError("DeltaH: singularity subtraction needs the torus provider");
    const double kappa = spec_.kappa();
    const DPoint p = spec_.base_point;
    double partial = 0.0;
    double tail = 0.0;
    const double w = opt.tail_check_w;
    const double base = w + std::sqrt(1.0 + w * w);
    for (std::size_t i = 0; i < spec_.eigenpairs.size(); ++i) {
        const Eigenpair& e = spec_.eigenpairs[i];
        if (e.lambda == 0.0) {
            psi0_sq_ += e.psi_at_p * e.eval(p, kappa);
            continue;
        }
        const double env = std::abs(e.psi_at_p * e.amplitude) * pi * T / e.lambda * std::pow(base, -opt.tail_eps * e.lambda);
        if (e.lambda > opt.lambda_max) {
            tail += env;
            continue;
        }
        partial += env;
        if (levels_.empty() || std::abs(levels_.back().lambda - e.lambda) > 1e-12 * e.lambda) {
            if (!levels_.empty() && e.lambda < levels_.back().lambda)
                throw ParameterError("DeltaH: eigenpairs must be sorted by lambda");
            levels_.push_back({e.lambda, solve_mode(e.lambda, T, 1.0, opt.mode), {}});
        }
        levels_.back().pairs.push_back(i);
    }
    zero_ = zero_mode(T, 1.0);
    partial += std::abs(psi0_sq_ * zero_->value(w / T));
    tail_ratio_ = partial > 0.0 ? tail / partial : (tail > 0.0 ? 1.0 : 0.0);
}

double DeltaH::level_weight(const Level& l, const DPoint& q) const
{
    const double kappa = spec_.kappa();
    double acc = 0.0;
    for (std::size_t i : l.pairs)
        acc += spec_.eigenpairs[i].psi_at_p * spec_.eigenpairs[i].eval(q, kappa);
    return acc;
}

double DeltaH::level_laplacian(const Level& l, const DPoint& q) const
{
    const double kappa = spec_.kappa();
    double acc = 0.0;
    for (std::size_t i : l.pairs)
        acc += spec_.eigenpairs[i].psi_at_p * spec_.eigenpairs[i].laplacian(q, kappa);
    return acc;
}

Jet DeltaH::mean_jet(double z) const
{
    const Jet j = zero_->eval(z);
    const double c = charge_ * psi0_sq_;
    return {c * j.f, c * j.df, c * j.d2f};
}

Jet DeltaH::z_jet(const DPoint& q, double z) const
{
    Jet out = mean_jet(z);
    const bool sub = opt_.subtract_singularity;
    const double aw = T_ * std::abs(z);
    for (const Level& l : levels_) {
        const double wgt = charge_ * level_weight(l, q);
        Jet j = l.mode.eval(z);
        if (sub) {
            const double e = std::exp(-l.lambda * aw);
            j.f -= -pi * T_ * e / l.lambda;
            j.df -= pi * T_ * T_ * sgn(z) * e;
            j.d2f -= -pi * T_ * T_ * T_ * l.lambda * e;
        }
        out.f += wgt * j.f;
        out.df += wgt * j.df;
        out.d2f += wgt * j.d2f;
    }
    if (sub) {
        const Jet P = potential_jet(spec_.side, spec_.displacement(q), T_, z);
        const double c = -charge_ * pi * T_ / spec_.area;
        out.f += c * P.f;
        out.df += c * P.df;
        out.d2f += c * P.d2f;
    }
    return out;
}

double DeltaH::laplacian_D(const DPoint& q, double z) const
{
    const bool sub = opt_.subtract_singularity;
    const double aw = T_ * std::abs(z);
    double acc = 0.0;
    for (const Level& l : levels_) {
        double f = l.mode.value(z);
        if (sub)
            f += pi * T_ * std::exp(-l.lambda * aw) / l.lambda;
        acc += charge_ * level_laplacian(l, q) * f;
    }
    if (sub) {
        // P is harmonic in (d, w) away from the source.
        const Jet P = potential_jet(spec_.side, spec_.displacement(q), T_, z);
        acc += -charge_ * pi * T_ / spec_.area * (-P.d2f / (T_ * T_));
    }
    return acc;
}

double DeltaH::mean_moment(double z) const
{
    return charge_ * psi0_sq_ * zero_->moment_integral(z);
}

double DeltaH::moment(const DPoint& q, double z) const
{
    double acc = mean_moment(z);
    const bool sub = opt_.subtract_singularity;
    const double W = T_ * std::abs(z);
    for (const Level& l : levels_) {
        double m = l.mode.moment_integral(z);
        if (sub) {
            const double lw = l.lambda * W;
            m -= -pi / (T_ * l.lambda * l.lambda * l.lambda) * (1.0 - std::exp(-lw) * (1.0 + lw));
        }
        acc += charge_ * level_weight(l, q) * m;
    }
    if (sub && z != 0.0) {
        // Singular part integrated in closed form, smooth remainder by quadrature.
        const DPoint d = spec_.displacement(q);
        const double dd = std::sqrt(d.t1 * d.t1 + d.t2 * d.t2);
        const double sing = spec_.area / (2.0 * pi) * (std::sqrt(dd * dd + T_ * T_ * z * z) - dd) / (T_ * T_);
        auto integrand = [&](double s) { return s * periodic_potential_regular(spec_.side, d.t1, d.t2, T_ * s); };
        const double I = sing + adaptive_simpson(integrand, 0.0, z, {1e-12, 1e-10, 40});
        acc += -charge_ * pi * T_ / spec_.area * I;
    }
    return acc;
}

DeltaH assemble_delta_h(const SpectrumData& spec, double T, double lambda_max, double charge)
{
    AssemblyOptions opt;
    opt.lambda_max = lambda_max;
    return DeltaH(spec, T, charge, opt);
}

double DeltaChi::value(const DPoint& q, double z) const
{
    const double T = dh_->T();
    return dh_->value(q, z) * (z * z + 1.0 / (T * T)) + 2.0 * dh_->moment(q, z) + z * g_inf_;
}

double DeltaChi::dz(const DPoint& q, double z) const
{
    const double T = dh_->T();
    const Jet j = dh_->z_jet(q, z);
    return j.df * (z * z + 1.0 / (T * T)) + 4.0 * z * j.f + g_inf_;
}

double DeltaChi::mean(double z) const
{
    const double T = dh_->T();
    return dh_->mean_jet(z).f * (z * z + 1.0 / (T * T)) + 2.0 * dh_->mean_moment(z) + z * g_inf_;
}

double DeltaChi::mean_dz(double z) const
{
    const double T = dh_->T();
    const Jet j = dh_->mean_jet(z);
    return j.df * (z * z + 1.0 / (T * T)) + 4.0 * z * j.f + g_inf_;
}

DeltaChi delta_chi_from(const DeltaH& dh, double g_inf)
{
    return DeltaChi(std::make_shared<const DeltaH>(dh), g_inf);
}

std::string to_string(Zone z)
{
    switch (z) {
    case Zone::inner:
        return "inner";
    case Zone::blend:
        return "blend";
    default:
        return "outer";
    }
}

SpectrumData default_neck_spectrum(int N_max)
{
    return torus_spectrum(N_max, {0.0, 0.0}, std::sqrt(2.0 * pi));
}

namespace {

std::shared_ptr<const DeltaH> make_delta_h(const SpectrumData& spec, const NeckConfig& cfg)
{
    if (cfg.k_minus < 0 || cfg.k_plus > 0)
        throw ParameterError("NeckData: need k_minus >= 0 and k_plus <= 0");
    if (!(cfg.T > 0.0))
        throw DomainError("NeckData: T must be positive");
    if (!(cfg.C2 > 0.0))
        throw ParameterError("NeckData: C2 must be positive");
    if (cfg.C2 / cfg.T >= 0.5)
        throw ZoneError("NeckData: interpolation zone C2/T = " + std::to_string(cfg.C2 / cfg.T) +
                        " does not fit inside [-1, 1/2]");
    AssemblyOptions opt = cfg.assembly;
    if (cfg.zero_mode_only) {
        opt.lambda_max = 0.0;
        opt.subtract_singularity = false;
    }
    const double charge = (cfg.k_plus - cfg.k_minus) * spec.area / (2.0 * pi);
    return std::make_shared<const DeltaH>(spec, cfg.T, charge, opt);
}

} // namespace

NeckData::NeckData(const SpectrumData& spec, const NeckConfig& cfg)
    : cfg_(cfg),
      charge_((cfg.k_plus - cfg.k_minus) * spec.area / (2.0 * pi)),
      g_inf_(cfg.far_slope_gauge ? 0.5 * (cfg.k_plus + cfg.k_minus) : 0.0),
      dh_(make_delta_h(spec, cfg)),
      chi_(dh_, g_inf_)
{
}

Zone NeckData::zone(double z) const
{
    const double a = std::abs(z) * cfg_.T / cfg_.C2;
    if (a < 0.5)
        return Zone::inner;
    if (a < 1.0)
        return Zone::blend;
    return Zone::outer;
}

double NeckData::h0(double z) const
{
    return 1.0 / (z * z + 1.0 / (cfg_.T * cfg_.T));
}

Jet NeckData::h0_jet(double z) const
{
    const double h = h0(z);
    return {h, -2.0 * z * h * h, -2.0 * h * h + 8.0 * z * z * h * h * h};
}

Jet NeckData::h_outer_jet(double z) const
{
    const double k = z < 0.0 ? cfg_.k_minus : cfg_.k_plus;
    const double c = 1.0 / (cfg_.T * cfg_.T);
    const double N = k * z + 1.0;
    const double N1 = k;
    const double D = (2.0 / 3.0) * k * z * z * z + z * z + c;
    const double D1 = 2.0 * k * z * z + 2.0 * z;
    const double D2 = 4.0 * k * z + 2.0;
    const double q = N1 * D - N * D1;
    return {N / D, q / (D * D), (-N * D2) / (D * D) - 2.0 * D1 * q / (D * D * D)};
}

double NeckData::h_outer(double z) const
{
    return h_outer_jet(z).f;
}

Jet NeckData::blend_jet(double z) const
{
    const double a = 0.5 * cfg_.C2 / cfg_.T;
    const double t = (std::abs(z) - a) / a;
    if (t <= 0.0)
        return {0.0, 0.0, 0.0};
    if (t >= 1.0)
        return {1.0, 0.0, 0.0};
    const double s1 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
    const double s2 = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
    return {smoothstep5(t), sgn(z) * s1 / a, s2 / (a * a)};
}

double NeckData::blend(double z) const
{
    return blend_jet(z).f;
}

Jet NeckData::h_mean_jet(double z) const
{
    const Jet h0j = h0_jet(z);
    const Jet m = dh_->mean_jet(z);
    const Jet s = blend_jet(z);
    const Jet o = h_outer_jet(z);
    // h0 + m + s (o - h0 - m)
    const double gf = o.f - h0j.f - m.f;
    const double g1 = o.df - h0j.df - m.df;
    const double g2 = o.d2f - h0j.d2f - m.d2f;
    return {h0j.f + m.f + s.f * gf, h0j.df + m.df + s.df * gf + s.f * g1,
            h0j.d2f + m.d2f + s.d2f * gf + 2.0 * s.df * g1 + s.f * g2};
}

double NeckData::h_mean(double z) const
{
    return h_mean_jet(z).f;
}

Jet NeckData::h_z_jet(const DPoint& q, double z) const
{
    Jet j = h_mean_jet(z);
    const Jet full = dh_->z_jet(q, z);
    const Jet m = dh_->mean_jet(z);
    j.f += full.f - m.f;
    j.df += full.df - m.df;
    j.d2f += full.d2f - m.d2f;
    return j;
}

double NeckData::h(const DPoint& q, double z) const
{
    return h_mean(z) + (dh_->value(q, z) - dh_->mean_jet(z).f);
}

std::function<double(const DPoint&, double)> corrected_h(const NeckData& nd)
{
    return [nd](const DPoint& q, double z) { return nd.h(q, z); };
}

double SingularChart::r_w() const
{
    return std::sqrt(a * a + b * b + w * w);
}

SingularLeading singular_leading_terms(const SingularChart& chart, double T)
{
    const double r = chart.r_w();
    if (!(r > 0.0))
        throw DomainError("singular_leading_terms: r_w = 0 is the singular point");
    return {T / (2.0 * r), 1.0 / (2.0 * T * r)};
}

double degree_integral_D_slice(const NeckData& nd, double z0, int nodes)
{
    if (z0 == 0.0 || nd.zone(z0) == Zone::blend)
        throw DomainError("degree_integral_D_slice: z0 must avoid 0 and the blend zones");
    const SpectrumData& s = nd.spectrum();
    const double I = torus_integral(s, [&](const DPoint& q) { return nd.dchi_dz(q, z0); }, nodes);
    return I / s.area;
}

double degree_integral_sphere(double T, double eps, double charge, int nodes)
{
    if (!(T > 0.0) || !(eps > 0.0))
        throw DomainError("degree_integral_sphere: need T > 0 and eps > 0");
    // In (a, b, w) the leading forms are T-independent.
    const double s = -charge;
    const GaussRule g = gauss_legendre(nodes);
    const int nphi = 2 * nodes;
    double flux = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double ct = g.nodes[i];
        const double st = std::sqrt(1.0 - ct * ct);
        for (int j = 0; j < nphi; ++j) {
            const double ph = 2.0 * pi * j / nphi;
            const double a = eps * st * std::cos(ph);
            const double b = eps * st * std::sin(ph);
            const double w = eps * ct;
            const double r = eps;
            const double r3 = r * r * r;
            const double Fa = -s * a / (2.0 * r3);
            const double Fb = -s * b / (2.0 * r3);
            const double Fw = s * (2.0 * w / r - (1.0 + w * w) * w / (2.0 * r3));
            const double Fn = (Fa * a + Fb * b + Fw * w) / r;
            flux += g.weights[i] * (2.0 * pi / nphi) * Fn * eps * eps;
        }
    }
    return flux / (2.0 * pi);
}

} // namespace kneck

#include "kneck/model_spaces.hpp"

#include "kneck/errors.hpp"
#include "kneck/numerics.hpp"

#include <array>
#include <cmath>

namespace kneck {

std::string to_string(ModelKind k)
{
    switch (k) {
    case ModelKind::taub_nut:
        return "taub_nut";
    case ModelKind::calabi:
        return "calabi";
    case ModelKind::cylinder:
        return "cylinder";
    default:
        return "flat_product";
    }
}

HopfImage hopf_map(std::complex<double> u1, std::complex<double> u2)
{
    HopfImage im;
    im.y = u1 * u2;
    im.w = 0.5 * (std::norm(u1) - std::norm(u2));
    im.r = std::sqrt(std::norm(im.y) + im.w * im.w);
    return im;
}

TaubNutReduced taub_nut_reduced(double a, std::complex<double> y, double w)
{
    const double r = std::sqrt(std::norm(y) + w * w);
    if (!(r > 0.0))
        throw DomainError("taub_nut_reduced: r = 0 is the fixed point of the circle action");
    const double V = 0.5 / r + a;
    return {V, V, 1.0 / V};
}

Eigen::Matrix4d taub_nut_metric(double a, const Eigen::Vector4d& x)
{
    const double r = 0.5 * x.squaredNorm();
    if (!(r > 0.0))
        throw DomainError("taub_nut_metric: origin");
    const double V = 0.5 / r + a;
    Eigen::Matrix<double, 3, 4> D;
    D << x(2), -x(3), x(0), -x(1),
         x(3), x(2), x(1), x(0),
         x(0), x(1), -x(2), -x(3);
    // dw composed with the complex structure J(d/dx0) = d/dx1, J(d/dx2) = d/dx3.
    Eigen::Vector4d c(x(1), -x(0), -x(3), x(2));
    c /= 2.0 * r;
    return V * (D.transpose() * D) + (1.0 / V) * (c * c.transpose());
}

namespace {

using Christoffel = std::array<Eigen::Matrix4d, 4>; // G[k](i, j) = Gamma^k_ij

Christoffel christoffel_fd(const Metric4& g, const Eigen::Vector4d& x, double h)
{
    std::array<Eigen::Matrix4d, 4> dg; // dg[l] = d_l g
    for (int l = 0; l < 4; ++l) {
        auto shifted = [&](double s) {
            Eigen::Vector4d y = x;
            y(l) += s;
            return g(y);
        };
        dg[l] = (shifted(-2 * h) - 8 * shifted(-h) + 8 * shifted(h) - shifted(2 * h)) / (12 * h);
    }
    const Eigen::Matrix4d ginv = g(x).inverse();
    Christoffel G;
    for (int k = 0; k < 4; ++k) {
        G[k].setZero();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double acc = 0.0;
                for (int l = 0; l < 4; ++l)
                    acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                G[k](i, j) = 0.5 * acc;
            }
    }
    return G;
}

struct RicciSample {
    Eigen::Matrix4d ricci;
    double scale;
};

RicciSample ricci_sample(const Metric4& g, const Eigen::Vector4d& x, double h)
{
    const Christoffel G = christoffel_fd(g, x, h);
    std::array<Christoffel, 4> dG; // dG[l][k](i, j) = d_l Gamma^k_ij
    double scale = 0.0;
    for (int l = 0; l < 4; ++l) {
        std::array<Christoffel, 4> s;
        const double off[4] = {-2 * h, -h, h, 2 * h};
        for (int m = 0; m < 4; ++m) {
            Eigen::Vector4d y = x;
            y(l) += off[m];
            s[m] = christoffel_fd(g, y, h);
        }
        for (int k = 0; k < 4; ++k) {
            dG[l][k] = (s[0][k] - 8 * s[1][k] + 8 * s[2][k] - s[3][k]) / (12 * h);
            scale = std::max(scale, dG[l][k].cwiseAbs().maxCoeff());
        }
    }
    Eigen::Matrix4d R = Eigen::Matrix4d::Zero();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double acc = 0.0;
            for (int k = 0; k < 4; ++k) {
                acc += dG[k][k](i, j) - dG[j][k](i, k);
                for (int l = 0; l < 4; ++l)
                    acc += G[k](k, l) * G[l](i, j) - G[k](j, l) * G[l](i, k);
            }
            R(i, j) = acc;
        }
    return {R, scale};
}

} // namespace

Eigen::Matrix4d ricci_fd(const Metric4& g, const Eigen::Vector4d& x, double h)
{
    return ricci_sample(g, x, h).ricci;
}

RicciReport ricci_check(const Metric4& g, std::span<const Eigen::Vector4d> points, double h)
{
    RicciReport rep;
    for (const auto& x : points) {
        const RicciSample a = ricci_sample(g, x, h);
        const RicciSample b = ricci_sample(g, x, 0.5 * h);
        rep.max_ric_h = std::max(rep.max_ric_h, a.ricci.cwiseAbs().maxCoeff());
        rep.max_ric_half = std::max(rep.max_ric_half, b.ricci.cwiseAbs().maxCoeff());
        rep.curvature_scale = std::max(rep.curvature_scale, a.scale);
    }
    rep.observed_order = std::log2(rep.max_ric_h / rep.max_ric_half);
    return rep;
}

RicciReport taub_nut_ricci_check(double a, std::span<const Eigen::Vector4d> points, double h)
{
    for (const auto& x : points)
        if (x.squaredNorm() < 16.0 * h * h)
            throw DomainError("taub_nut_ricci_check: stencil reaches the fixed point");
    return ricci_check([a](const Eigen::Vector4d& x) { return taub_nut_metric(a, x); }, points, h);
}

Metric4 taub_nut_rescaled_metric(double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw ParameterError("taub_nut_rescaled_metric: need a, b > 0");
    const double c = std::sqrt(a / b);
    return [b, c](const Eigen::Vector4d& x) -> Eigen::Matrix4d {
        return c * c * taub_nut_metric(b, c * x);
    };
}

double taub_nut_rescale_defect(double a, double b, const Eigen::Vector4d& x)
{
    const Eigen::Matrix4d lhs = a * taub_nut_metric(a, x);
    const Eigen::Matrix4d rhs = b * taub_nut_rescaled_metric(a, b)(x);
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double taub_nut_potential_laplacian(double a, std::complex<double> y, double w, double h)
{
    auto V = [a](double p, double q, double s) { return 0.5 / std::sqrt(p * p + q * q + s * s) + a; };
    const double p = y.real();
    const double q = y.imag();
    return diff2([&](double t) { return V(t, q, w); }, p, h) + diff2([&](double t) { return V(p, t, w); }, q, h) +
           diff2([&](double t) { return V(p, q, t); }, w, h);
}

CalabiDomain calabi_domain(double n)
{
    if (n < 0.0)
        throw ParameterError("calabi_domain: n must be nonnegative");
    if (n == 0.0)
        return {-1.0, 0.0, -0.5};
    return {-0.5 / n, 0.0, -0.25 / n};
}

double calabi_mu(double n, double z)
{
    return n * z * z * z / 3.0 + 0.5 * z * z;
}

CalabiProfile calabi_profile(double n, double z)
{
    const CalabiDomain d = calabi_domain(n);
    if (!(z > d.lo && z < d.hi))
        throw DomainError("calabi_profile: z outside the open domain");
    // Antiderivative of (n s + 1) / (n s^3 / 3 + s^2 / 2) by partial fractions; 2 n s + 3 > 0 on the domain.
    auto G = [n](double s) { return (2.0 * n / 3.0) * std::log(-s / (2.0 * n * s + 3.0)) - 2.0 / s; };
    CalabiProfile p;
    p.h = (n * z + 1.0) / ((2.0 / 3.0) * n * z * z * z + z * z);
    p.chi = 1.0 + n * z;
    p.x = G(z) - G(d.anchor);
    return p;
}

double calabi_ode_invariant(double n, double z, double h)
{
    if (!(n > 0.0))
        throw ParameterError("calabi_ode_invariant: F involves x/n, need n > 0");
    if (h <= 0.0)
        h = 0.005 * std::abs(z);
    auto x_of = [n](double s) { return calabi_profile(n, s).x; };
    auto F_of = [n, &x_of](double s) { return std::log(calabi_mu(n, s)) + x_of(s) / n; };
    // d/dx = (dx/dz)^-1 d/dz.
    auto Fp = [&](double s) { return diff1(F_of, s, h) / diff1(x_of, s, h); };
    const double Fpp = diff1(Fp, z, h) / diff1(x_of, z, h);
    return std::log(Fp(z) * Fpp) + x_of(z) / n - F_of(z);
}

CylinderReduced cylinder_reduced(double w)
{
    return {1.0 / (w * w + 1.0), 1.0};
}

FlatProductReduced flat_product_reduced()
{
    return {};
}

} // namespace kneck

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <string>

namespace kneck {

enum class ModelKind { taub_nut, calabi, cylinder, flat_product };
std::string to_string(ModelKind k);

struct ModelGeometry {
    ModelKind kind = ModelKind::flat_product;
    double parameter = 0.0; // a for Taub-NUT, n for Calabi
};

struct HopfImage {
    std::complex<double> y;
    double w = 0.0;
    double r = 0.0;
};

// (u1, u2) -> (u1 u2, (|u1|^2 - |u2|^2)/2).
HopfImage hopf_map(std::complex<double> u1, std::complex<double> u2);

struct TaubNutReduced {
    double V = 0.0;           // 1/(2r) + a
    double base_factor = 0.0; // coefficient of the flat R^3 metric
    double fiber_factor = 0.0; // coefficient of the squared connection form
};

TaubNutReduced taub_nut_reduced(double a, std::complex<double> y, double w);

// Real coordinates x = (Re u1, Im u1, Re u2, Im u2); g = V pi^* g_R3 + V^-1 Theta^2 with Theta = J pi^* dw / (2r).
using Metric4 = std::function<Eigen::Matrix4d(const Eigen::Vector4d&)>;
Eigen::Matrix4d taub_nut_metric(double a, const Eigen::Vector4d& x);

// Ricci tensor from nested fourth-order central differences with step h.
Eigen::Matrix4d ricci_fd(const Metric4& g, const Eigen::Vector4d& x, double h);

struct RicciReport {
    double max_ric_h = 0.0;       // step h
    double max_ric_half = 0.0;    // step h/2
    double observed_order = 0.0;  // log2 of the ratio; meaningful above the rounding floor
    double curvature_scale = 0.0; // max |d^2 g| at the sample points
};

RicciReport ricci_check(const Metric4& g, std::span<const Eigen::Vector4d> points, double h);
RicciReport taub_nut_ricci_check(double a, std::span<const Eigen::Vector4d> points, double h = 0.02);

// a g_{TN,a}(x) - b (pullback of g_{TN,b} under y -> (a/b) y, w -> (a/b) w), max component.
double taub_nut_rescale_defect(double a, double b, const Eigen::Vector4d& x);
// The pulled-back metric c^2 g_{TN,b}(c x), c = sqrt(a/b).
Metric4 taub_nut_rescaled_metric(double a, double b);

// Finite-difference Laplacian of V on R^3 at (y, w).
double taub_nut_potential_laplacian(double a, std::complex<double> y, double w, double h = 1e-2);

struct CalabiProfile {
    double h = 0.0;
    double chi = 0.0;
    double x = 0.0;
};

struct CalabiDomain {
    double lo = 0.0;
    double hi = 0.0;
    double anchor = 0.0;
};

// (-1/(2n), 0) for n > 0 and (-1, 0) for n = 0.
CalabiDomain calabi_domain(double n);
double calabi_mu(double n, double z);
CalabiProfile calabi_profile(double n, double z);

// log(F'F'') + x/n - F with F' and F'' from finite differences of the quadrature x(z). Requires n > 0.
// h <= 0 selects the step 0.005 |z|; the stencil spans 4h on each side.
double calabi_ode_invariant(double n, double z, double h = -1.0);

struct CylinderReduced {
    double h_over_T2 = 0.0;
    double chi = 0.0;
};

CylinderReduced cylinder_reduced(double w);

struct FlatProductReduced {
    double h = 1.0;
    double chi = 1.0;
};

FlatProductReduced flat_product_reduced();

} // namespace kneck

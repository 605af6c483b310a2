#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace kneck {

inline constexpr double pi = 3.14159265358979323846;

// Quintic smoothstep on [0, 1] with vanishing first and second derivatives at both ends.
inline double smoothstep5(double t)
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-12;
    int max_depth = 40;
};

// Adaptive Simpson with Richardson correction on each accepted panel.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt = {});

// Fixed 1D Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double rms_residual = 0.0;
};

// Least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Chebyshev-Lobatto nodes on [-1, 1], ascending, and the matching differentiation matrix.
Eigen::VectorXd chebyshev_lobatto(int n);
Eigen::MatrixXd chebyshev_diff_matrix(const Eigen::VectorXd& nodes);

// Fourth-order central difference weights for first and second derivatives.
template <class F>
double diff1(F&& f, double x, double h)
{
    return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h);
}

template <class F>
double diff2(F&& f, double x, double h)
{
    return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h);
}

std::vector<double> linspace(double a, double b, std::size_t n);
std::vector<double> logspace(double a, double b, std::size_t n);

} // namespace kneck

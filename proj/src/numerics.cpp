#include "kneck/numerics.hpp"

#include "kneck/errors.hpp"

#include <algorithm>

namespace kneck {

namespace {

struct Panel {
    double a, b, fa, fm, fb, whole;
};

double simpson_recurse(const std::function<double(double)>& f, const Panel& p, double tol, int depth,
                       int max_depth)
{
    const double m = 0.5 * (p.a + p.b);
    const double lm = 0.5 * (p.a + m);
    const double rm = 0.5 * (m + p.b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
    const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
    const double delta = left + right - p.whole;
    if (std::abs(delta) <= 15.0 * tol || depth >= max_depth) {
        if (depth >= max_depth && std::abs(delta) > 15.0 * tol * 1e3)
            throw ConvergenceError("adaptive_simpson: depth limit reached");
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, {p.a, m, p.fa, flm, p.fm, left}, 0.5 * tol, depth + 1, max_depth) +
           simpson_recurse(f, {m, p.b, p.fm, frm, p.fb, right}, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const QuadratureOptions& opt)
{
    if (a == b)
        return 0.0;
    // A coarse pre-pass sets the relative scale and keeps the recursion from stopping on a lucky panel.
    constexpr int pre = 8;
    const double h = (b - a) / pre;
    double coarse = 0.0;
    std::vector<double> fx(2 * pre + 1);
    for (int i = 0; i <= 2 * pre; ++i)
        fx[i] = f(a + 0.5 * h * i);
    for (int i = 0; i < pre; ++i)
        coarse += h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(coarse)) / pre;
    double total = 0.0;
    for (int i = 0; i < pre; ++i) {
        const double pa = a + h * i;
        const double pb = pa + h;
        const double whole = h / 6.0 * (fx[2 * i] + 4.0 * fx[2 * i + 1] + fx[2 * i + 2]);
        total += simpson_recurse(f, {pa, pb, fx[2 * i], fx[2 * i + 1], fx[2 * i + 2], whole}, tol, 0,
                                 opt.max_depth);
    }
    return total;
}

GaussRule gauss_legendre(int n)
{
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        rule.nodes[n - 1 - i] = x;
        rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ParameterError("fit_line: need at least two matching samples");
    Eigen::MatrixXd A(x.size(), 2);
    Eigen::VectorXd b(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = x[i];
        b(i) = y[i];
    }
    const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
    LineFit fit;
    fit.intercept = c(0);
    fit.slope = c(1);
    fit.rms_residual = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(x.size()));
    return fit;
}

Eigen::VectorXd chebyshev_lobatto(int n)
{
    Eigen::VectorXd x(n + 1);
    for (int j = 0; j <= n; ++j)
        x(j) = -std::cos(pi * j / n);
    return x;
}

Eigen::MatrixXd chebyshev_diff_matrix(const Eigen::VectorXd& x)
{
    const Eigen::Index n = x.size() - 1;
    Eigen::VectorXd c(n + 1);
    for (Eigen::Index j = 0; j <= n; ++j)
        c(j) = ((j == 0 || j == n) ? 2.0 : 1.0) * ((j % 2) ? -1.0 : 1.0);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (Eigen::Index i = 0; i <= n; ++i)
        for (Eigen::Index j = 0; j <= n; ++j)
            if (i != j)
                D(i, j) = (c(i) / c(j)) / (x(i) - x(j));
    // Negative-sum trick for the diagonal keeps rows exact on constants.
    for (Eigen::Index i = 0; i <= n; ++i)
        D(i, i) = -D.row(i).sum();
    return D;
}

std::vector<double> linspace(double a, double b, std::size_t n)
{
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

std::vector<double> logspace(double a, double b, std::size_t n)
{
    auto v = linspace(std::log(a), std::log(b), n);
    for (auto& e : v)
        e = std::exp(e);
    return v;
}

} // namespace kneck

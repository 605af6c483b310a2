#include "kneck/validation.hpp"

#include "kneck/errors.hpp"
#include "kneck/numerics.hpp"

#include <cmath>
#include <string>

namespace kneck {

namespace {

struct Collocation {
    int n = 0;
    Eigen::VectorXd z;
    Eigen::VectorXd dzds;
    Eigen::VectorXd k;
    Eigen::MatrixXd D1; // zone 1 derivative in s
    Eigen::MatrixXd D2; // zone 2 derivative in s
    double y_pin = 0.0; // log h(0)
};

Collocation build(double T, int k_minus, int k_plus, int n)
{
    Collocation c;
    c.n = n;
    const Eigen::VectorXd x = chebyshev_lobatto(n - 1);
    const Eigen::MatrixXd D = chebyshev_diff_matrix(x);
    const double sa = -std::asinh(T);
    const double sb = std::asinh(0.5 * T);
    c.D1 = D * (2.0 / (0.0 - sa));
    c.D2 = D * (2.0 / (sb - 0.0));
    c.z.resize(2 * n);
    c.dzds.resize(2 * n);
    c.k.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        const double s1 = sa + 0.5 * (x(i) + 1.0) * (0.0 - sa);
        const double s2 = 0.5 * (x(i) + 1.0) * sb;
        c.z(i) = std::sinh(s1) / T;
        c.dzds(i) = std::cosh(s1) / T;
        c.k(i) = k_minus;
        c.z(n + i) = std::sinh(s2) / T;
        c.dzds(n + i) = std::cosh(s2) / T;
        c.k(n + i) = k_plus;
    }
    c.z(n - 1) = 0.0;
    c.z(n) = 0.0;
    c.y_pin = std::log(T * T);
    return c;
}

Eigen::VectorXd residual(const Collocation& c, const Eigen::VectorXd& y)
{
    const int n = c.n;
    Eigen::VectorXd F(2 * n);
    F.head(n) = c.D1 * y.head(n);
    F.tail(n) = c.D2 * y.tail(n);
    for (int i = 0; i < 2 * n; ++i) {
        const double z = c.z(i);
        F(i) -= c.dzds(i) * (c.k(i) / (1.0 + c.k(i) * z) - 2.0 * std::exp(y(i)) * z);
    }
    F(n - 1) = y(n - 1) - c.y_pin;
    F(n) = y(n) - y(n - 1);
    return F;
}

Eigen::MatrixXd jacobian(const Collocation& c, const Eigen::VectorXd& y)
{
    const int n = c.n;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    J.topLeftCorner(n, n) = c.D1;
    J.bottomRightCorner(n, n) = c.D2;
    for (int i = 0; i < 2 * n; ++i)
        J(i, i) += c.dzds(i) * 2.0 * std::exp(y(i)) * c.z(i);
    J.row(n - 1).setZero();
    J(n - 1, n - 1) = 1.0;
    J.row(n).setZero();
    J(n, n) = 1.0;
    J(n, n - 1) = -1.0;
    return J;
}

double inf_norm(const Eigen::VectorXd& v)
{
    return v.cwiseAbs().maxCoeff();
}

} // namespace

CorrectorResult reduced_nonlinear_correct(double T, int k_minus, int k_plus, const std::function<double(double)>& h0,
                                          const CorrectorOptions& opt)
{
    if (!(T > 2.0))
        throw DomainError("reduced_nonlinear_correct: T must exceed 2");
    if (opt.nodes < 8)
        throw ParameterError("reduced_nonlinear_correct: at least 8 nodes per zone");
    if (k_minus < 0 || k_plus > 0 || k_plus <= -2)
        throw ParameterError("reduced_nonlinear_correct: need k_minus >= 0 and k_plus in {-1, 0}");
    const Collocation c = build(T, k_minus, k_plus, opt.nodes);
    const int N = 2 * opt.nodes;
    Eigen::VectorXd y0(N);
    for (int i = 0; i < N; ++i) {
        const double h = h0(c.z(i));
        if (!(h > 0.0))
            throw DomainError("reduced_nonlinear_correct: initial h must be positive");
        y0(i) = std::log(h);
    }

    CorrectorResult res;
    Eigen::VectorXd F = residual(c, y0);
    res.initial_residual = inf_norm(F);
    const Eigen::MatrixXd Jinv = jacobian(c, y0).partialPivLu().inverse();
    res.C_fit = Jinv.cwiseAbs().rowwise().sum().maxCoeff();
    if (res.C_fit * res.initial_residual > opt.contraction_limit)
        throw RegimeError("reduced_nonlinear_correct: initial error above the contraction threshold, C_fit " + std::to_string(res.C_fit) + ", residual " + std::to_string(res.initial_residual));

    Eigen::VectorXd y = y0;
    double norm = res.initial_residual;
    res.residual_log.push_back(norm);
    while (norm > opt.tol && res.iterations < opt.max_iter) {
        const Eigen::VectorXd dy = jacobian(c, y).partialPivLu().solve(-F);
        double t = 1.0;
        Eigen::VectorXd trial = y + dy;
        Eigen::VectorXd Ft = residual(c, trial);
        while (inf_norm(Ft) >= norm && t > 1e-6) {
            t *= opt.damping;
            trial = y + t * dy;
            Ft = residual(c, trial);
        }
        y = trial;
        F = Ft;
        norm = inf_norm(F);
        ++res.iterations;
        res.residual_log.push_back(norm);
        if (t <= 1e-6)
            break;
    }
    res.final_residual = norm;
    res.converged = norm <= opt.tol;
    res.correction_norm = inf_norm(y - y0);
    res.bound_holds = res.correction_norm <= 2.0 * res.C_fit * res.initial_residual;
    res.z = c.z;
    res.h = y.array().exp();
    res.chi = (1.0 + c.k.array() * c.z.array()).matrix();
    return res;
}

CorrectorResult reduced_nonlinear_correct(const NeckData& nd, const CorrectorOptions& opt)
{
    if (!nd.config().zero_mode_only)
        throw ParameterError("reduced_nonlinear_correct: needs zero-mode neck data");
    return reduced_nonlinear_correct(nd.T(), nd.k_minus(), nd.k_plus(), [&nd](double z) { return nd.h_mean(z); }, opt);
}

} // namespace kneck

#include "kneck/specfun.hpp"

#include "kneck/errors.hpp"
#include "kneck/numerics.hpp"

#include <array>
#include <cmath>
#include <initializer_list>
#include <string>

namespace kneck {

namespace {

constexpr double lanczos_g = 7.0;
constexpr std::array<double, 9> lanczos_c = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// sin(pi x) with exact zeros at integers.
double sin_pi(double x)
{
    const double n = std::round(x);
    const double r = x - n;
    const double s = std::sin(pi * r);
    return (static_cast<long long>(n) % 2 == 0) ? s : -s;
}

double lanczos_sum(double xm1)
{
    double a = lanczos_c[0];
    for (std::size_t i = 1; i < lanczos_c.size(); ++i)
        a += lanczos_c[i] / (xm1 + static_cast<double>(i));
    return a;
}

} // namespace

double pochhammer(double n, unsigned k)
{
    double r = 1.0;
    for (unsigned j = 0; j < k; ++j)
        r *= n + j;
    return r;
}

bool is_gamma_pole(double x)
{
    return x <= 0.0 && x == std::round(x);
}

LogGamma log_gamma(double x)
{
    if (is_gamma_pole(x))
        throw PoleError("log_gamma: pole at " + std::to_string(x));
    if (x < 0.5) {
        const double s = sin_pi(x);
        const LogGamma g = log_gamma(1.0 - x);
        return {std::log(pi) - std::log(std::abs(s)) - g.log_abs, (s > 0 ? 1 : -1) * g.sign};
    }
    const double xm1 = x - 1.0;
    const double t = xm1 + lanczos_g + 0.5;
    return {0.5 * std::log(2.0 * pi) + (xm1 + 0.5) * std::log(t) - t + std::log(lanczos_sum(xm1)), 1};
}

double gamma_fn(double x)
{
    if (is_gamma_pole(x))
        throw PoleError("gamma_fn: pole at " + std::to_string(x));
    if (x < 0.5)
        return pi / (sin_pi(x) * gamma_fn(1.0 - x));
    if (x == std::round(x) && x <= 30.0) {
        double f = 1.0;
        for (double k = 2.0; k < x; k += 1.0)
            f *= k;
        return f;
    }
    const double xm1 = x - 1.0;
    const double t = xm1 + lanczos_g + 0.5;
    if (x <= 20.0)
        return std::sqrt(2.0 * pi) * std::pow(t, xm1 + 0.5) * std::exp(-t) * lanczos_sum(xm1);
    const LogGamma g = log_gamma(x);
    return std::exp(g.log_abs);
}

double gamma_ratio(std::initializer_list<double> num, std::initializer_list<double> den)
{
    for (double d : den)
        if (is_gamma_pole(d))
            return 0.0;
    double log_sum = 0.0;
    int sign = 1;
    for (double n : num) {
        const LogGamma g = log_gamma(n);
        log_sum += g.log_abs;
        sign *= g.sign;
    }
    for (double d : den) {
        const LogGamma g = log_gamma(d);
        log_sum -= g.log_abs;
        sign *= g.sign;
    }
    return sign * std::exp(log_sum);
}

SeriesValue hyp2f1_disk(const HypergeomParams& p, cplx x, const SeriesConfig& cfg)
{
    if (is_gamma_pole(p.gamma))
        throw PoleError("hyp2f1_disk: gamma is a nonpositive integer");
    if (std::abs(x) >= 1.0 - cfg.margin)
        throw DomainError("hyp2f1_disk: |x| outside the disk margin");
    cplx sum = 1.0;
    cplx term = 1.0;
    int small_run = 0;
    std::int64_t k = 0;
    while (true) {
        const double kd = static_cast<double>(k);
        term *= (p.alpha + kd) * (p.beta + kd) / ((kd + 1.0) * (p.gamma + kd)) * x;
        ++k;
        sum += term;
        if (term == 0.0) {
            // Terminating series.
            return {sum, k};
        }
        if (std::abs(term) < cfg.abs_tol * std::abs(sum)) {
            if (++small_run >= 2)
                return {sum, k};
        } else {
            small_run = 0;
        }
        if (k >= cfg.term_cap)
            throw ConvergenceError("hyp2f1_disk: term cap exceeded");
    }
}

cplx hyp2f1_continued(const HypergeomParams& p, cplx x, int half_plane, const SeriesConfig& cfg)
{
    const double d = p.alpha - p.beta;
    if (std::abs(d - std::round(d)) < 1e-12)
        throw SigmaError("hyp2f1_continued: alpha - beta is an integer");
    if (x.imag() == 0.0 && x.real() >= 0.0)
        throw DomainError("hyp2f1_continued: argument on the real half-line of the cut");
    if (x.imag() != 0.0 && (x.imag() > 0.0) != (half_plane > 0))
        throw DomainError("hyp2f1_continued: half_plane does not match Im x");
    const cplx inv = 1.0 / x;
    const double a = p.alpha;
    const double b = p.beta;
    const double c = p.gamma;
    const double k1 = gamma_ratio({c, b - a}, {b, c - a});
    const double k2 = gamma_ratio({c, a - b}, {a, c - b});
    const double arg_shift = std::arg(x) - pi;
    const cplx ph1 = std::polar(std::pow(std::abs(x), -a), -a * arg_shift);
    const cplx ph2 = std::polar(std::pow(std::abs(x), -b), -b * arg_shift);
    cplx f1 = 0.0;
    cplx f2 = 0.0;
    if (k1 != 0.0)
        f1 = k1 * ph1 * hyp2f1_disk({a, a + 1.0 - c, a + 1.0 - b, p.lambda}, inv, cfg).value;
    if (k2 != 0.0)
        f2 = k2 * ph2 * hyp2f1_disk({b, b + 1.0 - c, b + 1.0 - a, p.lambda}, inv, cfg).value;
    if (half_plane < 0 && x.imag() != 0.0) {
        f1 *= std::polar(1.0, -2.0 * pi * a);
        f2 *= std::polar(1.0, -2.0 * pi * b);
    }
    return f1 + f2;
}

PathValue hyp2f1_path(const HypergeomParams& p, cplx x)
{
    const double a = p.alpha;
    const double b = p.beta;
    const double c = p.gamma;
    const double target = std::abs(x);
    if (x.imag() == 0.0 && x.real() >= 1.0)
        throw DomainError("hyp2f1_path: argument on the cut");
    const cplx dir = (target == 0.0) ? cplx(1.0) : x / target;
    double r0 = std::min(target, 0.5);
    cplx x0 = dir * r0;
    cplx F = hyp2f1_disk(p, x0).value;
    cplx dF = a * b / c * hyp2f1_disk({a + 1.0, b + 1.0, c + 1.0, p.lambda}, x0).value;
    int steps = 0;
    while (std::abs(x - x0) > 1e-15 * std::max(1.0, target)) {
        const double radius = std::min(std::abs(x0), std::abs(1.0 - x0));
        double h = std::min(0.5 * radius, std::abs(x - x0));
        const cplx t = dir * h;
        const cplx q = x0 * (1.0 - x0);
        // Scaled coefficients d_n = c_n t^n.
        cplx dm = F;        // d_n
        cplx dn = dF * t;   // d_{n+1}
        cplx val = dm + dn;
        cplx der = dn / t;
        for (int n = 0; n < 400; ++n) {
            const double nd = n;
            const cplx d2 = -(((1.0 - 2.0 * x0) * nd + c - (a + b + 1.0) * x0) * (nd + 1.0) * dn * t -
                              (nd + a) * (nd + b) * dm * t * t) /
                            (q * (nd + 2.0) * (nd + 1.0));
            val += d2;
            der += (nd + 2.0) * d2 / t;
            dm = dn;
            dn = d2;
            if (std::abs(d2) < 1e-17 * std::abs(val) && std::abs(dm) < 1e-17 * std::abs(val))
                break;
        }
        F = val;
        dF = der;
        x0 += t;
        if (++steps > 100000)
            throw ConvergenceError("hyp2f1_path: too many steps");
    }
    return {F, dF};
}

double gauss_half_value(const HypergeomParams& p)
{
    if (std::abs(p.gamma - 0.5 * (1.0 + p.alpha + p.beta)) > 1e-12)
        throw DomainError("gauss_half_value: gamma must equal (1 + alpha + beta)/2");
    const double ga = 0.5 * (1.0 + p.alpha);
    const double gb = 0.5 * (1.0 + p.beta);
    if (is_gamma_pole(ga) || is_gamma_pole(gb))
        throw PoleError("gauss_half_value: pole in the denominator");
    return gamma_ratio({0.5, p.gamma}, {ga, gb});
}

} // namespace kneck

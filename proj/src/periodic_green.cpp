#include "kneck/neck_assembly.hpp"

#include "kneck/numerics.hpp"

#include <cmath>

namespace kneck {

namespace {

double direct_sum(double side, double d1, double d2, double w)
{
    const double kappa = 2.0 * pi / side;
    const double aw = std::abs(w);
    const int N = static_cast<int>(std::ceil(40.0 / (kappa * aw))) + 1;
    double acc = 0.0;
    for (int m = -N; m <= N; ++m)
        for (int n = -N; n <= N; ++n) {
            if (m == 0 && n == 0)
                continue;
            const double k = kappa * std::sqrt(static_cast<double>(m * m + n * n));
            const double e = std::exp(-k * aw);
            if (e < 1e-18)
                continue;
            acc += e * std::cos(kappa * (m * d1 + n * d2)) / k;
        }
    return acc;
}

// With regular set, the central image contributes -erf(eta r)/r, i.e. P minus its 1/r part.
double ewald_sum(double side, double d1, double d2, double w, bool regular)
{
    const double kappa = 2.0 * pi / side;
    const double aw = std::abs(w);
    const double eta = std::sqrt(pi) / side;
    const double area = side * side;
    double real = 0.0;
    const int R = 4;
    for (int i = -R; i <= R; ++i)
        for (int j = -R; j <= R; ++j) {
            const double x = d1 - side * i;
            const double y = d2 - side * j;
            const double r = std::sqrt(x * x + y * y + w * w);
            if (regular && i == 0 && j == 0)
                real -= r > 0.0 ? std::erf(eta * r) / r : 2.0 * eta / std::sqrt(pi);
            else
                real += std::erfc(eta * r) / r;
        }
    real *= area / (2.0 * pi);
    double recip = 0.0;
    const int K = 6;
    for (int m = -K; m <= K; ++m)
        for (int n = -K; n <= K; ++n) {
            if (m == 0 && n == 0)
                continue;
            const double k = kappa * std::sqrt(static_cast<double>(m * m + n * n));
            const double a = k / (2.0 * eta);
            const double t = std::exp(k * aw) * std::erfc(a + eta * aw) + std::exp(-k * aw) * std::erfc(a - eta * aw);
            recip += std::cos(kappa * (m * d1 + n * d2)) * t / (2.0 * k);
        }
    const double zero = aw * std::erfc(eta * aw) - std::exp(-eta * eta * w * w) / (eta * std::sqrt(pi));
    return real + recip + zero;
}

} // namespace

double periodic_potential(double side, double d1, double d2, double w)
{
    const double kappa = 2.0 * pi / side;
    if (kappa * std::abs(w) > 2.5)
        return direct_sum(side, d1, d2, w);
    return ewald_sum(side, d1, d2, w, false);
}

double periodic_potential_regular(double side, double d1, double d2, double w)
{
    const double kappa = 2.0 * pi / side;
    if (kappa * std::abs(w) > 2.5) {
        const double r = std::sqrt(d1 * d1 + d2 * d2 + w * w);
        return direct_sum(side, d1, d2, w) - side * side / (2.0 * pi * r);
    }
    return ewald_sum(side, d1, d2, w, true);
}

double periodic_potential_direct(double side, double d1, double d2, double w)
{
    return direct_sum(side, d1, d2, w);
}

} // namespace kneck

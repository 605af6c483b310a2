#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>

namespace kneck {

using cplx = std::complex<double>;

struct HypergeomParams {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double lambda = 0.0;
};

struct SeriesConfig {
    double abs_tol = 1e-14; // relative term threshold
    double margin = 0.05;   // keep |x| < 1 - margin
    std::int64_t term_cap = 1'000'000;
};

struct SeriesValue {
    cplx value;
    std::int64_t terms = 0;
};

double pochhammer(double n, unsigned k);

bool is_gamma_pole(double x);

// Throws PoleError at nonpositive integers.
double gamma_fn(double x);

// log|Gamma(x)| and the sign of Gamma(x).
struct LogGamma {
    double log_abs;
    int sign;
};
LogGamma log_gamma(double x);

// Product of Gamma(num[i]) / Gamma(den[j]); a pole in the denominator contributes a zero.
// Throws PoleError for a pole in the numerator.
double gamma_ratio(std::initializer_list<double> num, std::initializer_list<double> den);

SeriesValue hyp2f1_disk(const HypergeomParams& p, cplx x, const SeriesConfig& cfg = {});

// Continuation through the 1/x series, principal branch, cut along the negative real axis.
// half_plane = +1 for Im x > 0 and -1 for Im x < 0.
cplx hyp2f1_continued(const HypergeomParams& p, cplx x, int half_plane, const SeriesConfig& cfg = {});

// Continuation by Taylor stepping of the hypergeometric ODE along the ray from 0 to x.
// Independent of the 1/x series; valid wherever the ray avoids [1, inf).
struct PathValue {
    cplx value;
    cplx derivative;
};
PathValue hyp2f1_path(const HypergeomParams& p, cplx x);

double gauss_half_value(const HypergeomParams& p);

} // namespace kneck

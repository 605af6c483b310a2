#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace kneck {

// Point on the torus chart, coordinates in [0, side).
struct DPoint {
    double t1 = 0.0;
    double t2 = 0.0;
};

enum class ProviderTag { torus, synthetic };

std::string to_string(ProviderTag tag);
ProviderTag provider_from_string(const std::string& s);

// psi(theta) = amplitude * cos(kappa (m t1 + n t2) + phase).
// For the torus these are genuine eigenfunctions; synthetic entries are bounded surrogates.
struct Eigenpair {
    double lambda = 0.0;
    double psi_at_p = 0.0;
    int m = 0;
    int n = 0;
    double amplitude = 0.0;
    double phase = 0.0;

    double eval(const DPoint& q, double kappa) const;
    // Flat chart Laplacian; equals -lambda^2 psi for torus entries.
    double laplacian(const DPoint& q, double kappa) const;
};

struct SpectrumData {
    std::vector<Eigenpair> eigenpairs; // ascending lambda, then lattice order
    DPoint base_point;
    double side = 0.0; // torus period in both directions
    double area = 0.0;
    ProviderTag provider = ProviderTag::torus;

    double kappa() const;
    DPoint wrap(DPoint q) const;
    // Nearest-image displacement q - base_point.
    DPoint displacement(const DPoint& q) const;
    double psi(std::size_t i, const DPoint& q) const { return eigenpairs[i].eval(q, kappa()); }
};

inline constexpr double default_torus_side = 6.283185307179586;

// Eigenpairs with |m|, |n| <= N_max on the square torus of the given side.
SpectrumData torus_spectrum(int N_max, DPoint p_D = {}, double side = default_torus_side);

struct SyntheticOptions {
    double psi_slope = 0.5; // psi(p) = min(psi_slope sqrt(lambda), psi_cap)
    double psi_cap = 10.0;
    double side = default_torus_side;
};

SpectrumData synthetic_weyl_spectrum(int count, double C_weyl, std::uint64_t seed, const SyntheticOptions& opt = {});

struct WeylReport {
    std::vector<int> counts; // counts[k-1] = #{lambda in [k-1, k)}
    double fitted_C = 0.0;   // max counts[k-1] / k
    bool bound_holds = true; // against the claimed constant
};

// claimed_C <= 0 checks against the fitted constant.
WeylReport weyl_count_check(const SpectrumData& s, int k_max = -1, double claimed_C = -1.0);

// Integral over the torus by the tensor trapezoid rule with nodes^2 points.
double torus_integral(const SpectrumData& s, const std::function<double(const DPoint&)>& f, int nodes = 256);

std::string spectrum_to_csv(const SpectrumData& s, const std::string& header_comment = {});
SpectrumData spectrum_from_csv(const std::string& text);

} // namespace kneck

#pragma once

#include "kneck/mode_solver.hpp"
#include "kneck/spectrum.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace kneck {

// Sum over nonzero reciprocal vectors k of the square torus of exp(-|k||w|) cos(k.d) / |k|.
// Ewald splitting for small |w|, direct sum otherwise. Singular at d = 0, w = 0.
double periodic_potential(double side, double d1, double d2, double w);
double periodic_potential_direct(double side, double d1, double d2, double w);
// P - area / (2 pi r) with r = sqrt(d1^2 + d2^2 + w^2); smooth near the source, d1, d2 nearest image.
double periodic_potential_regular(double side, double d1, double d2, double w);

struct AssemblyOptions {
    double lambda_max = 8.0;
    // Resum the flat-space part of every nonzero mode through the periodic potential.
    bool subtract_singularity = false;
    double tail_eps = 0.9;
    double tail_tol = 1e-4;
    double tail_check_w = 1.0;
    ModeOptions mode;
};

// delta h = charge * sum_lambda f_lambda(z) psi_lambda(p) psi_lambda(theta), charge 1 being the literal source.
class DeltaH {
public:
    DeltaH(const SpectrumData& spec, double T, double charge, const AssemblyOptions& opt = {});

    double value(const DPoint& q, double z) const { return z_jet(q, z).f; }
    // z-derivatives at fixed q; one-sided (right) second derivative at z = 0.
    Jet z_jet(const DPoint& q, double z) const;
    // Flat chart Laplacian in D.
    double laplacian_D(const DPoint& q, double z) const;

    // D-average, carried entirely by the zero mode.
    Jet mean_jet(double z) const;

    // int_0^z s delta_h(q, s) ds.
    double moment(const DPoint& q, double z) const;
    double mean_moment(double z) const;

    double T() const { return T_; }
    double charge() const { return charge_; }
    const SpectrumData& spectrum() const { return spec_; }
    std::size_t level_count() const { return levels_.size(); }
    double tail_ratio() const { return tail_ratio_; }
    bool truncation_warning() const { return tail_ratio_ > opt_.tail_tol; }

private:
    struct Level {
        double lambda;
        ModeSolution mode; // unit psi_at_p
        std::vector<std::size_t> pairs;
    };
    double level_weight(const Level& l, const DPoint& q) const;
    double level_laplacian(const Level& l, const DPoint& q) const;

    SpectrumData spec_;
    double T_;
    double charge_;
    AssemblyOptions opt_;
    double psi0_sq_ = 0.0;
    std::optional<ModeSolution> zero_;
    std::vector<Level> levels_;
    double tail_ratio_ = 0.0;
};

DeltaH assemble_delta_h(const SpectrumData& spec, double T, double lambda_max, double charge = 1.0);

// delta chi = delta_h / h0 + 2 int_0^z s delta_h ds + z g_inf.
class DeltaChi {
public:
    DeltaChi(std::shared_ptr<const DeltaH> dh, double g_inf = 0.0) : dh_(std::move(dh)), g_inf_(g_inf) {}
    double value(const DPoint& q, double z) const;
    // Analytic z-derivative: (z^2 + T^-2) delta_h_z + 4 z delta_h + g_inf.
    double dz(const DPoint& q, double z) const;
    double mean(double z) const;
    double mean_dz(double z) const;

private:
    std::shared_ptr<const DeltaH> dh_;
    double g_inf_;
};

DeltaChi delta_chi_from(const DeltaH& dh, double g_inf = 0.0);

enum class Zone { inner, blend, outer };
std::string to_string(Zone z);

struct NeckConfig {
    double T = 50.0;
    int k_minus = 0;
    int k_plus = -1;
    double C2 = 1.0;
    bool zero_mode_only = false;
    // g_inf = (k_plus + k_minus)/2 makes the far-field slope of chi equal k_plus and k_minus.
    bool far_slope_gauge = true;
    AssemblyOptions assembly = [] {
        AssemblyOptions o;
        o.subtract_singularity = true;
        return o;
    }();
};

// Unit-degree torus: area 2 pi, so the source charge (k_plus - k_minus) area / (2 pi) is the integer jump.
SpectrumData default_neck_spectrum(int N_max = 6);

class NeckData {
public:
    NeckData(const SpectrumData& spec, const NeckConfig& cfg);

    double T() const { return cfg_.T; }
    int k_minus() const { return cfg_.k_minus; }
    int k_plus() const { return cfg_.k_plus; }
    double C2() const { return cfg_.C2; }
    double g_inf() const { return g_inf_; }
    double charge() const { return charge_; }
    const NeckConfig& config() const { return cfg_; }
    const DeltaH& delta_h_field() const { return *dh_; }
    const SpectrumData& spectrum() const { return dh_->spectrum(); }

    Zone zone(double z) const;
    double h0(double z) const;
    Jet h0_jet(double z) const;
    // Exact family with a = k_pm and c = T^-2.
    double h_outer(double z) const;
    Jet h_outer_jet(double z) const;
    double blend(double z) const;
    Jet blend_jet(double z) const;

    double delta_h(const DPoint& q, double z) const { return dh_->value(q, z); }
    double h_linear(const DPoint& q, double z) const { return h0(z) + dh_->value(q, z); }
    double delta_chi(const DPoint& q, double z) const { return chi_.value(q, z); }
    double chi(const DPoint& q, double z) const { return 1.0 + chi_.value(q, z); }
    double dchi_dz(const DPoint& q, double z) const { return chi_.dz(q, z); }

    // Corrected h with the quintic blend towards the outer closed form.
    double h(const DPoint& q, double z) const;
    Jet h_z_jet(const DPoint& q, double z) const;

    // D-invariant parts.
    double h_mean(double z) const;
    Jet h_mean_jet(double z) const;
    double chi_mean(double z) const { return 1.0 + chi_.mean(z); }
    double chi_mean_dz(double z) const { return chi_.mean_dz(z); }

private:
    NeckConfig cfg_;
    double charge_;
    double g_inf_;
    std::shared_ptr<const DeltaH> dh_;
    DeltaChi chi_;
};

std::function<double(const DPoint&, double)> corrected_h(const NeckData& nd);

struct SingularChart {
    double a = 0.0;
    double b = 0.0;
    double w = 0.0;
    double r_w() const;
};

struct SingularLeading {
    double delta_h;
    double delta_chi;
};

SingularLeading singular_leading_terms(const SingularChart& chart, double T);

// Mean of d chi / dz over D at z0, i.e. (1/2 pi) int_D d_z chi omega_D normalized by (1/2 pi) area.
double degree_integral_D_slice(const NeckData& nd, double z0, int nodes = 64);

// Flux of Gamma / (2 pi) through r_w = eps from the leading closed forms.
double degree_integral_sphere(double T, double eps, double charge = -1.0, int nodes = 48);

} // namespace kneck

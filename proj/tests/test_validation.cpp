#include "kneck/errors.hpp"
#include "kneck/numerics.hpp"
#include "kneck/validation.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kneck;

namespace {

const SpectrumData& neck_torus()
{
    static const SpectrumData s = default_neck_spectrum(6);
    return s;
}

NeckData zero_mode_neck(double T)
{
    NeckConfig c;
    c.T = T;
    c.zero_mode_only = true;
    return NeckData(neck_torus(), c);
}

NeckData full_neck(double T)
{
    NeckConfig c;
    c.T = T;
    return NeckData(neck_torus(), c);
}

} // namespace

TEST_SUITE("validation")
{
    TEST_CASE("weight parameter windows")
    {
        WeightSpec s;
        CHECK_NOTHROW(validate_weight_spec(s));
        auto bad = [](auto mutate) {
            WeightSpec w;
            mutate(w);
            return w;
        };
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.delta = 0.0; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.delta = 0.65; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.nu = -1.5; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.nu = -2.0; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.mu = 0.25; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.mu = 1.0; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.alpha = 1.0; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.k = 3; })), ParameterError);
        CHECK_THROWS_AS(validate_weight_spec(bad([](WeightSpec& w) { w.delta0 = 0.7; })), ParameterError);
        CHECK_THROWS_AS(weight_rho(bad([](WeightSpec& w) { w.nu = -1.2; }), {}), ParameterError);
    }

    TEST_CASE("W on its plateaus")
    {
        const double T = 50.0;
        const double C3 = 1.0;
        CHECK(weight_W({1.0 / (T * T), 0.0}, T, C3) == doctest::Approx(1.0 / T));
        CHECK(weight_W({C3 / 4.0, 0.0}, T, C3) == doctest::Approx(C3 / 4.0));
        CHECK(weight_W({3.0, 0.0}, T, C3) == 1.0);
        CHECK(weight_W({std::nullopt, 7.0}, T, C3) == 1.0);
        CHECK(weight_W({0.3, 0.0}, T, 0.8) == doctest::Approx(0.3));
        CHECK_THROWS_AS(weight_W({0.1, 0.0}, 3.0, 1.0), ParameterError);
        CHECK_THROWS_AS(weight_W({0.1, 0.0}, 50.0, 1.5), ParameterError);
    }

    TEST_CASE("W is monotone and bounded")
    {
        for (double T : {10.0, 50.0, 400.0}) {
            double prev = 0.0;
            for (double r : logspace(1e-5, 10.0, 4001)) {
                const double W = weight_W({r, 0.0}, T, 1.0);
                CHECK(W >= prev);
                CHECK(W >= 1.0 / T - 1e-15);
                CHECK(W <= 1.0);
                prev = W;
            }
            // Continuous across the blend edges.
            for (double edge : {1.0 / T, 2.0 / T, 0.5, 1.0}) {
                const double lo = weight_W({edge * (1.0 - 1e-9), 0.0}, T, 1.0);
                const double hi = weight_W({edge * (1.0 + 1e-9), 0.0}, T, 1.0);
                CHECK(std::abs(hi - lo) < 1e-8);
            }
        }
    }

    TEST_CASE("rho identity and plug-in values")
    {
        const WeightSpec s;
        std::mt19937_64 rng(23);
        std::uniform_real_distribution<double> U(-6.0, 1.0);
        for (int i = 0; i < 500; ++i) {
            const double r = std::pow(10.0, U(rng));
            const WeightPoint q{r, r * 0.5 * s.T};
            CHECK(weight_rho_raw(s.delta, s.nu + 2.0, s.mu, 0.0, q, s.T, s.C3) ==
                  weight_rho_raw(s.delta, s.nu, s.mu, 2.0, q, s.T, s.C3));
        }
        CHECK(weight_rho(s, {std::nullopt, 0.0}) == doctest::Approx(std::pow(s.T, s.mu)).epsilon(1e-14));
        WeightSpec s1 = s;
        s1.k = 1;
        const WeightPoint q{0.2, 3.0};
        CHECK(weight_rho(s1, q) == doctest::Approx(std::pow(4.0, -s.delta) * std::pow(0.2, s.nu + 1.0 + s.alpha) *
                                                   std::pow(s.T, s.mu))
                                       .epsilon(1e-13));
    }

    TEST_CASE("rho lower bound on a 10^4 grid")
    {
        const WeightSpec s; // (0.3, -1.8, 0.6), T = 50
        const double lb = rho_lower_bound(s);
        std::mt19937_64 rng(29);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        int violations = 0;
        for (int i = 0; i < 10000; ++i) {
            WeightPoint q;
            if (i % 5 == 4) {
                q.w = s.T * (2.0 * U(rng) - 1.0);
            } else {
                const double r = std::pow(10.0, -5.0 + 6.0 * U(rng));
                q.r_w = r;
                q.w = std::min(r, s.T) * (2.0 * U(rng) - 1.0);
            }
            if (weight_rho_raw(s.delta, s.nu + 2.0, s.mu, 0.0, q, s.T, s.C3) < lb * (1.0 - 1e-12))
                ++violations;
        }
        CHECK(violations == 0);
    }

    TEST_CASE("exact family solves the reduced equation")
    {
        for (auto [a, c] : {std::pair{0.0, 0.01}, std::pair{1.0, 0.05}, std::pair{-1.0, 1e-4}, std::pair{3.0, 0.2}}) {
            const ExactFamily f{a, c};
            for (double z : linspace(-0.95, 0.5, 146)) {
                const double D = (2.0 / 3.0) * a * z * z * z + z * z + c;
                if (std::abs(D) < 1e-3 || f.chi(z) <= 0.0)
                    continue;
                const Jet h = f.h_jet(z);
                CHECK(std::abs(maineqn1_residual(h, f.chi(z), f.chi_z(), z)) < 1e-12 * (1.0 + std::abs(h.f)));
                CHECK(h.df == doctest::Approx(diff1([&](double t) { return f.h(t); }, z, 1e-5)).epsilon(1e-6));
            }
        }
    }

    TEST_CASE("Kahler potential of the zero mode")
    {
        double prev_inner = 1.0;
        double prev_outer = 1.0;
        for (double T : {25.0, 50.0, 100.0}) {
            const NeckData nd = zero_mode_neck(T);
            const auto phi = kahler_potential_zero_mode(nd);
            CHECK(phi(0.0) == doctest::Approx(-std::log(T * T)).epsilon(1e-14));
            double inner = 0.0;
            for (double w : {-0.4, -0.2, 0.1, 0.3}) {
                const double z = w / T;
                inner = std::max(inner, std::abs(phi(z) - (std::log(1.0 + w * w) - std::log(T * T))));
            }
            double outer = 0.0;
            for (double z : {-0.9, -0.5, -0.1})
                outer = std::max(outer, std::abs(phi(z) - (-std::log(T * T) + std::log(T * T * z * z + 1.0))));
            CHECK(inner < 5.0 / T);
            CHECK(outer < 5.0 / T);
            CHECK(inner < 0.6 * prev_inner);
            CHECK(outer < 0.6 * prev_outer);
            prev_inner = inner;
            prev_outer = outer;
        }
    }

    TEST_CASE("Einstein error of the zero mode is O(1/T)")
    {
        std::vector<double> Ts{25.0, 50.0, 100.0};
        std::vector<double> errs;
        for (double T : Ts) {
            const NeckData nd = zero_mode_neck(T);
            const auto grid = default_err_grid(T);
            const ErrReport r = einstein_error_zero_mode(nd, grid);
            CHECK(r.sup_err >= 0.0);
            CHECK(r.grid_size == grid.size());
            std::size_t pts = 0;
            for (const auto& z : r.zones)
                pts += z.points;
            CHECK(pts == grid.size());
            errs.push_back(r.sup_err);
        }
        for (std::size_t i = 1; i < errs.size(); ++i) {
            const double ratio = errs[i] / errs[i - 1];
            CHECK(ratio >= 0.3);
            CHECK(ratio <= 0.7);
        }
        CHECK(fit_order(Ts, errs, -1.0).passed);
    }

    TEST_CASE("Einstein error of the exact family vanishes")
    {
        for (auto [a, c] : {std::pair{0.0, 0.01}, std::pair{1.0, 0.05}}) {
            const ExactFamily f{a, c};
            const std::vector<double> grid = linspace(-0.95, 0.5, 300);
            const ErrReport r = einstein_error(exact_family_profile(f), grid, [](double) { return Zone::outer; }, 1.0);
            CHECK(r.sup_err < 1e-10);
        }
    }

    TEST_CASE("Einstein error in the inner zone at Tz = 1")
    {
        const NeckData nd = zero_mode_neck(100.0);
        const double g[2] = {-0.01, 0.01};
        const ErrReport r = einstein_error_zero_mode(nd, g);
        CHECK(r.sup_err < 0.1);
    }

    TEST_CASE("limit case 1: Taub-NUT near the singular point")
    {
        for (double T : {25.0, 50.0, 100.0}) {
            const LimitReport r = rescaled_limit_compare(full_neck(T), 1, {0.6 / T, 0.0, 0.8 / T});
            CHECK(r.model == "taub_nut");
            CHECK(r.deviation < 0.05);
            CHECK(r.passed);
        }
    }

    TEST_CASE("limit case 2: flat product")
    {
        double prev = 1.0;
        for (double T : {100.0, 200.0, 400.0}) {
            const LimitReport r = rescaled_limit_compare(full_neck(T), 2, {0.06, 0.0, 0.08});
            CHECK(r.model == "flat_product");
            CHECK(r.passed);
            CHECK(r.deviation < 0.6 * prev);
            prev = r.deviation;
        }
    }

    TEST_CASE("limit cases 3 and 4 converge at order 1/T")
    {
        std::vector<double> Ts{25.0, 50.0, 100.0};
        std::vector<double> d3;
        std::vector<double> d4;
        for (double T : Ts) {
            const NeckData nd = full_neck(T);
            const LimitReport c3 = rescaled_limit_compare(nd, 3, {0.6, 0.3, 1.0});
            const LimitReport c4 = rescaled_limit_compare(nd, 4, {0.0, 0.0, -0.8 * T});
            CHECK(c3.model == "cylinder");
            CHECK(c4.model == "calabi");
            CHECK(c3.passed);
            CHECK(c4.passed);
            d3.push_back(c3.deviation);
            d4.push_back(c4.deviation);
        }
        CHECK(fit_order(Ts, d3, -1.0).passed);
        CHECK(fit_order(Ts, d4, -1.0).passed);
        const LimitReport plus = rescaled_limit_compare(full_neck(100.0), 4, {0.0, 0.0, 30.0});
        CHECK(plus.deviation < 0.02);
    }

    TEST_CASE("limit regimes are enforced")
    {
        const NeckData nd = full_neck(50.0);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 1, {0.5, 0.0, 0.0}), RegimeError);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 2, {0.01, 0.0, 0.0}), RegimeError);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 2, {0.3, 0.0, 0.0}), RegimeError);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 3, {0.1, 0.0, 0.0}), RegimeError);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 3, {0.0, 0.0, 2.5}), RegimeError);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 4, {0.0, 0.0, 5.0}), RegimeError);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 4, {0.0, 0.0, 60.0}), RegimeError);
        CHECK_THROWS_AS(rescaled_limit_compare(nd, 5, {0.0, 0.0, 20.0}), ParameterError);
    }

    TEST_CASE("nonlinear corrector from the linearized start")
    {
        std::vector<double> Ts{25.0, 50.0, 100.0};
        std::vector<double> corr;
        for (double T : Ts) {
            const CorrectorResult r = reduced_nonlinear_correct(zero_mode_neck(T));
            CHECK(r.converged);
            CHECK(r.final_residual <= 1e-10);
            CHECK(r.bound_holds);
            CHECK(r.C_fit > 0.0);
            CHECK(r.residual_log.size() == static_cast<std::size_t>(r.iterations) + 1);
            for (std::size_t i = 1; i < r.residual_log.size(); ++i)
                CHECK(r.residual_log[i] < r.residual_log[i - 1]);
            CHECK(r.z.size() == 130);
            CHECK(r.h.minCoeff() > 0.0);
            corr.push_back(r.correction_norm);
        }
        CHECK(fit_order(Ts, corr, -1.0).passed);
    }

    TEST_CASE("nonlinear corrector from the exact family")
    {
        const double T = 60.0;
        const ExactFamily lo{0.0, 1.0 / (T * T)};
        const ExactFamily hi{-1.0, 1.0 / (T * T)};
        const CorrectorResult r =
            reduced_nonlinear_correct(T, 0, -1, [&](double z) { return z < 0.0 ? lo.h(z) : hi.h(z); });
        CHECK(r.converged);
        CHECK(r.iterations == 0);
        CHECK(r.correction_norm == 0.0);
    }

    TEST_CASE("nonlinear corrector preconditions")
    {
        auto h0 = [](double z) { return 1.0 / (z * z + 1e-4); };
        CHECK_THROWS_AS(reduced_nonlinear_correct(2.0, 0, -1, h0), DomainError);
        CHECK_THROWS_AS(reduced_nonlinear_correct(50.0, -1, -1, h0), ParameterError);
        CorrectorOptions few;
        few.nodes = 4;
        CHECK_THROWS_AS(reduced_nonlinear_correct(50.0, 0, -1, h0, few), ParameterError);
        CHECK_THROWS_AS(reduced_nonlinear_correct(50.0, 0, -1, [](double) { return -1.0; }), DomainError);
        // A start far from any solution violates the contraction threshold.
        CHECK_THROWS_AS(reduced_nonlinear_correct(50.0, 0, -1, [](double) { return 1.0; }), RegimeError);
        CHECK_THROWS_AS(reduced_nonlinear_correct(full_neck(50.0)), ParameterError);
    }

    TEST_CASE("order fits")
    {
        const std::vector<double> T{10.0, 20.0, 40.0};
        const std::vector<double> v{3.0 / 10.0, 3.0 / 20.0, 3.0 / 40.0};
        const OrderFit f = fit_order(T, v, -1.0);
        CHECK(f.slope == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(f.passed);
        CHECK_FALSE(fit_order(T, v, -2.0).passed);
        const std::vector<double> zero{1.0, 0.0, 1.0};
        CHECK_THROWS_AS(fit_order(T, zero, -1.0), ConvergenceError);
        const std::vector<double> one{1.0};
        CHECK_THROWS_AS(fit_order(std::span<const double>(T).first(1), one, -1.0), ParameterError);
    }

    TEST_CASE("cylinder modes grow like |w|^-beta")
    {
        for (double lambda : {0.5, 1.0, 3.0}) {
            const GrowthFit g = cylinder_mode_growth(lambda);
            const double root = std::sqrt(5.0 + 4.0 * lambda * lambda);
            CHECK(g.minus_beta == doctest::Approx(0.5 * (root - 1.0)).epsilon(1e-14));
            CHECK(g.slope == doctest::Approx(g.minus_beta).epsilon(0.02));
            CHECK(g.exceeds_threshold);
        }
        // lambda = 0 sits exactly on the threshold.
        CHECK_FALSE(cylinder_mode_growth(0.0).exceeds_threshold);
    }

    TEST_CASE("linearized PDE residual on the torus")
    {
        const DeltaH dh = assemble_delta_h(default_neck_spectrum(6), 10.0, 8.0);
        double scale = 0.0;
        for (double z : linspace(-0.5, 0.4, 10))
            scale = std::max(scale, std::abs(dh.value({0.8, 1.2}, z)));
        for (double z : {-0.3, 0.05, 0.25})
            CHECK(std::abs(deltah_eqn_residual_fd(dh, {0.8, 1.2}, z)) < 1e-3 * scale);
    }
}

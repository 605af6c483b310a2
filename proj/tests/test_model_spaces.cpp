#include "kneck/errors.hpp"
#include "kneck/model_spaces.hpp"
#include "kneck/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace kneck;
using cplx = std::complex<double>;

namespace {

std::vector<Eigen::Vector4d> sample_points()
{
    return {{0.7, -0.3, 0.5, 0.9}, {1.2, 0.4, -0.6, 0.3}, {-0.5, 0.8, 0.9, -1.1}, {1.5, 1.0, 0.2, 0.1},
            {0.3, -1.3, -0.7, 0.6}};
}

// (y, w) of the real coordinates x.
HopfImage image_of(const Eigen::Vector4d& x)
{
    return hopf_map({x(0), x(1)}, {x(2), x(3)});
}

} // namespace

TEST_SUITE("model_spaces")
{
    TEST_CASE("Hopf map relations")
    {
        std::mt19937_64 rng(17);
        std::normal_distribution<double> N(0.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            const cplx u1(N(rng), N(rng));
            const cplx u2(N(rng), N(rng));
            const HopfImage im = hopf_map(u1, u2);
            const double s2 = std::norm(u1) + std::norm(u2);
            CHECK(std::abs(im.y - u1 * u2) == 0.0);
            CHECK(im.w == doctest::Approx(0.5 * (std::norm(u1) - std::norm(u2))).epsilon(1e-15));
            CHECK(std::abs(im.r - 0.5 * s2) < 4e-16 * s2);
            // Circle action u -> (e^it u1, e^-it u2) preserves the image.
            const cplx e = std::polar(1.0, 0.37 * i);
            const HopfImage rot = hopf_map(e * u1, std::conj(e) * u2);
            CHECK(std::abs(rot.y - im.y) < 1e-14 * (1.0 + std::abs(im.y)));
            CHECK(rot.w == doctest::Approx(im.w).epsilon(1e-14));
        }
    }

    TEST_CASE("Taub-NUT reduced data")
    {
        const TaubNutReduced t = taub_nut_reduced(0.8, {0.3, 0.4}, 1.2);
        const double r = std::sqrt(0.25 + 1.44);
        CHECK(t.V == doctest::Approx(0.5 / r + 0.8).epsilon(1e-15));
        CHECK(t.base_factor == t.V);
        CHECK(t.fiber_factor * t.V == doctest::Approx(1.0).epsilon(1e-15));
        double prev = 1e300;
        for (double R : {1e1, 1e3, 1e5, 1e7}) {
            const double dev = std::abs(taub_nut_reduced(0.8, {R, 0.0}, R).V - 0.8);
            CHECK(dev < prev);
            CHECK(dev <= 0.5 / R);
            prev = dev;
        }
        CHECK_THROWS_AS(taub_nut_reduced(1.0, {0.0, 0.0}, 0.0), DomainError);
    }

    TEST_CASE("a = 0 is the flat metric of C^2")
    {
        for (const auto& x : sample_points()) {
            const Eigen::Matrix4d g = taub_nut_metric(0.0, x);
            CHECK((g - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 1e-14);
        }
        const RicciReport r = taub_nut_ricci_check(0.0, sample_points(), 0.02);
        CHECK(r.max_ric_h < 1e-8);
    }

    TEST_CASE("Taub-NUT metric is symmetric positive definite")
    {
        for (double a : {0.0, 0.5, 2.0})
            for (const auto& x : sample_points()) {
                const Eigen::Matrix4d g = taub_nut_metric(a, x);
                CHECK((g - g.transpose()).cwiseAbs().maxCoeff() < 1e-15);
                CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(g).eigenvalues().minCoeff() > 0.0);
            }
        CHECK_THROWS_AS(taub_nut_metric(1.0, Eigen::Vector4d::Zero()), DomainError);
    }

    TEST_CASE("Taub-NUT metric matches the reduced form")
    {
        // g(e_i, e_i) = V |d pi e_i|^2 + V^-1 Theta(e_i)^2 with Theta(e_i) = dw(J e_i) / (2 r).
        const double a = 1.3;
        const double h = 1e-6;
        auto dpi = [&](const Eigen::Vector4d& x, const Eigen::Vector4d& v) {
            const HopfImage p = image_of(x + h * v);
            const HopfImage m = image_of(x - h * v);
            return Eigen::Vector3d((p.y.real() - m.y.real()) / (2 * h), (p.y.imag() - m.y.imag()) / (2 * h),
                                   (p.w - m.w) / (2 * h));
        };
        for (const auto& x : sample_points()) {
            const Eigen::Matrix4d g = taub_nut_metric(a, x);
            const HopfImage im = image_of(x);
            const TaubNutReduced red = taub_nut_reduced(a, im.y, im.w);
            for (int i = 0; i < 4; ++i) {
                Eigen::Vector4d e = Eigen::Vector4d::Zero();
                e(i) = 1.0;
                Eigen::Vector4d Je = Eigen::Vector4d::Zero();
                Je(i ^ 1) = (i % 2 == 0) ? 1.0 : -1.0;
                const double theta = dpi(x, Je)(2) / (2.0 * im.r);
                const double expect = red.base_factor * dpi(x, e).squaredNorm() + red.fiber_factor * theta * theta;
                CHECK(g(i, i) == doctest::Approx(expect).epsilon(1e-8));
            }
        }
    }

    TEST_CASE("rescaling identity at five points")
    {
        for (auto [a, b] : {std::pair{1.0, 3.0}, std::pair{2.5, 0.4}})
            for (const auto& x : sample_points()) {
                const double scale = (a * taub_nut_metric(a, x)).cwiseAbs().maxCoeff();
                CHECK(taub_nut_rescale_defect(a, b, x) < 1e-13 * scale);
            }
        CHECK_THROWS_AS(taub_nut_rescaled_metric(0.0, 1.0), ParameterError);
    }

    TEST_CASE("Taub-NUT is Ricci flat")
    {
        const auto pts = sample_points();
        const RicciReport r = taub_nut_ricci_check(1.0, pts, 1e-3);
        CHECK(r.curvature_scale > 0.1);
        CHECK(r.max_ric_h < 1e-4 * r.curvature_scale);
        // Above the rounding floor the stencil converges at fourth order.
        const RicciReport coarse = taub_nut_ricci_check(1.0, pts, 0.04);
        CHECK(coarse.observed_order > 3.5);
        CHECK(coarse.observed_order < 4.5);
        CHECK_THROWS_AS(taub_nut_ricci_check(1.0, std::vector<Eigen::Vector4d>{{0.01, 0.0, 0.0, 0.0}}, 0.02),
                        DomainError);
    }

    TEST_CASE("Ricci check is invariant under the rescaling")
    {
        const auto pts = sample_points();
        const RicciReport direct = ricci_check(taub_nut_rescaled_metric(1.0, 3.0), pts, 1e-3);
        CHECK(direct.max_ric_h < 1e-4 * direct.curvature_scale);
        const RicciReport coarse = ricci_check(taub_nut_rescaled_metric(1.0, 3.0), pts, 0.04);
        CHECK(coarse.observed_order > 3.5);
    }

    TEST_CASE("Ricci of a curved metric is detected")
    {
        // Round S^2 x R^2 in stereographic coordinates: Ric = g on the sphere factor.
        const Metric4 g = [](const Eigen::Vector4d& x) -> Eigen::Matrix4d {
            const double f = 4.0 / std::pow(1.0 + x(0) * x(0) + x(1) * x(1), 2);
            Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
            m(0, 0) = f;
            m(1, 1) = f;
            return m;
        };
        const Eigen::Vector4d x(0.3, -0.2, 0.0, 0.0);
        const Eigen::Matrix4d R = ricci_fd(g, x, 1e-3);
        const Eigen::Matrix4d G = g(x);
        CHECK(R(0, 0) == doctest::Approx(G(0, 0)).epsilon(1e-6));
        CHECK(R(1, 1) == doctest::Approx(G(1, 1)).epsilon(1e-6));
        CHECK(std::abs(R(2, 2)) < 1e-8);
        CHECK(std::abs(R(0, 1)) < 1e-8);
    }

    TEST_CASE("Taub-NUT potential is harmonic")
    {
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> U(-2.0, 2.0);
        for (int i = 0; i < 20; ++i) {
            const cplx y(U(rng), U(rng));
            const double w = U(rng);
            if (std::sqrt(std::norm(y) + w * w) < 0.5)
                continue;
            CHECK(std::abs(taub_nut_potential_laplacian(0.7, y, w)) < 1e-6);
        }
    }

    TEST_CASE("Calabi domain and profile")
    {
        CHECK(calabi_domain(0.0).lo == -1.0);
        CHECK(calabi_domain(2.0).lo == -0.25);
        CHECK(calabi_domain(2.0).hi == 0.0);
        CHECK_THROWS_AS(calabi_domain(-1.0), ParameterError);
        CHECK_THROWS_AS(calabi_profile(1.0, -0.5), DomainError);
        CHECK_THROWS_AS(calabi_profile(1.0, 0.0), DomainError);
        CHECK(calabi_profile(1.0, -0.25).x == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(calabi_profile(0.0, -0.5).x) < 1e-12);
        for (double z : linspace(-0.95, -0.01, 20)) {
            const CalabiProfile p = calabi_profile(0.0, z);
            CHECK(p.h == doctest::Approx(1.0 / (z * z)).epsilon(1e-14));
            CHECK(p.chi == 1.0);
        }
        // h^-1 = 2 z mu / mu'.
        for (double n : {0.5, 1.0, 3.0})
            for (double u : linspace(0.05, 0.95, 10)) {
                const double z = calabi_domain(n).lo * u;
                const double mu = calabi_mu(n, z);
                const double mup = n * z * z + z;
                CHECK(1.0 / calabi_profile(n, z).h == doctest::Approx(2.0 * z * mu / mup).epsilon(1e-13));
                CHECK(calabi_profile(n, z).h > 0.0);
            }
        CHECK(calabi_profile(1.0, -1e-9).chi == doctest::Approx(1.0).epsilon(1e-8));
    }

    TEST_CASE("Calabi x matches quadrature")
    {
        for (double n : {0.0, 0.5, 1.0, 3.0}) {
            const CalabiDomain d = calabi_domain(n);
            auto integrand = [n](double s) { return (n * s + 1.0) / (n * s * s * s / 3.0 + 0.5 * s * s); };
            for (double u : linspace(0.05, 0.95, 10)) {
                const double z = d.lo * u;
                const double q = adaptive_simpson(integrand, d.anchor, z, {1e-13, 1e-12, 40});
                CHECK(calabi_profile(n, z).x == doctest::Approx(q).epsilon(1e-10));
            }
        }
    }

    TEST_CASE("Calabi x increases towards the zero section")
    {
        for (double n : {0.0, 1.0, 2.0}) {
            const CalabiDomain d = calabi_domain(n);
            double prev = -1e300;
            for (double u : linspace(0.97, 0.02, 40)) {
                const double x = calabi_profile(n, d.lo * u).x;
                CHECK(x > prev);
                prev = x;
            }
        }
    }

    TEST_CASE("Calabi ODE invariant is constant")
    {
        for (double n : {1.0, 2.0}) {
            const CalabiDomain d = calabi_domain(n);
            double lo = 1e300;
            double hi = -1e300;
            for (double u : linspace(0.05, 0.95, 19)) {
                const double c = calabi_ode_invariant(n, d.lo * u);
                lo = std::min(lo, c);
                hi = std::max(hi, c);
            }
            CHECK(hi - lo < 1e-6);
        }
        CHECK_THROWS_AS(calabi_ode_invariant(0.0, -0.5), ParameterError);
    }

    TEST_CASE("cylinder and flat product data")
    {
        CHECK(cylinder_reduced(0.0).h_over_T2 == 1.0);
        CHECK(cylinder_reduced(0.0).chi == 1.0);
        for (double w : {0.3, 2.0, 17.0}) {
            CHECK(cylinder_reduced(w).h_over_T2 == cylinder_reduced(-w).h_over_T2);
            CHECK(cylinder_reduced(w).h_over_T2 == doctest::Approx(1.0 / (w * w + 1.0)));
        }
        // Large-T limit of h0 / T^2 at T z = w.
        for (double T : {1e3, 1e5}) {
            const double w = 1.7;
            const double z = w / T;
            CHECK(1.0 / (z * z + 1.0 / (T * T)) / (T * T) == doctest::Approx(cylinder_reduced(w).h_over_T2));
        }
        const FlatProductReduced f = flat_product_reduced();
        CHECK(f.h == 1.0);
        CHECK(f.chi == 1.0);
        CHECK(to_string(ModelKind::calabi) == "calabi");
    }
}

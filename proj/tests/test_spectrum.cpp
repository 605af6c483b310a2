#include "kneck/errors.hpp"
#include "kneck/numerics.hpp"
#include "kneck/spectrum.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace kneck;

TEST_SUITE("spectrum")
{
    TEST_CASE("torus constant mode")
    {
        const SpectrumData s = torus_spectrum(3, {1.0, 2.0});
        REQUIRE(!s.eigenpairs.empty());
        CHECK(s.eigenpairs[0].lambda == 0.0);
        CHECK(s.area == doctest::Approx(4.0 * pi * pi));
        CHECK(s.psi(0, {0.3, 4.1}) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-14));
        CHECK(s.eigenpairs[0].psi_at_p == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-14));
    }

    TEST_CASE("torus multiplicities and ordering")
    {
        const SpectrumData s = torus_spectrum(4, {0.7, 0.2});
        int ones = 0;
        int root_two = 0;
        for (std::size_t i = 1; i < s.eigenpairs.size(); ++i) {
            CHECK(s.eigenpairs[i - 1].lambda <= s.eigenpairs[i].lambda);
            if (std::abs(s.eigenpairs[i].lambda - 1.0) < 1e-12)
                ++ones;
            if (std::abs(s.eigenpairs[i].lambda - std::sqrt(2.0)) < 1e-12)
                ++root_two;
        }
        CHECK(ones == 4);
        CHECK(root_two == 4);
        // (2N+1)^2 lattice vectors, each realified once.
        CHECK(s.eigenpairs.size() == 81);
    }

    TEST_CASE("torus eigenfunctions by finite differences")
    {
        const SpectrumData s = torus_spectrum(3, {1.1, 5.0});
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> U(0.0, s.side);
        const double h = 1e-3;
        for (int trial = 0; trial < 10; ++trial) {
            const DPoint q{U(rng), U(rng)};
            for (std::size_t i = 1; i < s.eigenpairs.size(); i += 3) {
                auto f = [&](double a, double b) { return s.psi(i, {q.t1 + a, q.t2 + b}); };
                const double c0 = f(0, 0);
                auto second = [&](double a, double b) {
                    return (-f(2 * a, 2 * b) + 16 * f(a, b) - 30 * c0 + 16 * f(-a, -b) - f(-2 * a, -2 * b)) /
                           (12 * h * h);
                };
                const double lap = second(h, 0) + second(0, h);
                const double l2 = s.eigenpairs[i].lambda * s.eigenpairs[i].lambda;
                const double scale = l2 * std::abs(s.eigenpairs[i].amplitude);
                CHECK(std::abs(lap + l2 * c0) < 1e-6 * scale);
                CHECK(s.eigenpairs[i].laplacian(q, s.kappa()) == doctest::Approx(-l2 * c0).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("torus orthonormality on random pairs")
    {
        const SpectrumData s = torus_spectrum(4, {2.5, 0.4});
        std::mt19937_64 rng(5);
        std::uniform_int_distribution<std::size_t> pick(0, s.eigenpairs.size() - 1);
        for (int trial = 0; trial < 20; ++trial) {
            const std::size_t i = pick(rng);
            const std::size_t j = trial % 4 == 0 ? i : pick(rng);
            const double v = torus_integral(s, [&](const DPoint& q) { return s.psi(i, q) * s.psi(j, q); });
            CHECK(std::abs(v - (i == j ? 1.0 : 0.0)) < 1e-8);
        }
    }

    TEST_CASE("torus sign convention at the base point")
    {
        for (DPoint p : {DPoint{0.0, 0.0}, DPoint{1.3, 2.9}, DPoint{-0.5, 7.0}}) {
            const SpectrumData s = torus_spectrum(5, p);
            CHECK(s.base_point.t1 >= 0.0);
            CHECK(s.base_point.t1 < s.side);
            CHECK(s.base_point.t2 < s.side);
            for (std::size_t i = 0; i < s.eigenpairs.size(); ++i) {
                CHECK(s.eigenpairs[i].psi_at_p >= 0.0);
                CHECK(s.psi(i, s.base_point) == doctest::Approx(s.eigenpairs[i].psi_at_p).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("torus Weyl count")
    {
        const SpectrumData s = torus_spectrum(20);
        // Bins beyond the full disk of radius 20 are incomplete, so only check those inside.
        const WeylReport r = weyl_count_check(s, 20);
        CHECK(std::isfinite(r.fitted_C));
        CHECK(r.fitted_C > 0.0);
        CHECK(r.bound_holds);
        // Gauss circle: the annulus [k-1, k) holds about pi (2k - 1) lattice points.
        for (int k = 5; k <= 20; ++k) {
            const double expected = pi * (2.0 * k - 1.0);
            CHECK(std::abs(r.counts[k - 1] - expected) < 0.6 * expected);
        }
    }

    TEST_CASE("Weyl check on an empty range")
    {
        const SpectrumData s = torus_spectrum(1);
        const WeylReport r = weyl_count_check(s, 10);
        for (int k = 3; k <= 10; ++k)
            CHECK(r.counts[k - 1] == 0);
        CHECK(r.bound_holds);
    }

    TEST_CASE("synthetic spectrum obeys the Weyl bound")
    {
        for (std::uint64_t seed : {1u, 2u, 99u}) {
            const SpectrumData s = synthetic_weyl_spectrum(300, 4.0, seed);
            CHECK(s.provider == ProviderTag::synthetic);
            CHECK(s.eigenpairs.size() == 300);
            CHECK(weyl_count_check(s, -1, 4.0).bound_holds);
            for (std::size_t i = 1; i < s.eigenpairs.size(); ++i) {
                const auto& e = s.eigenpairs[i];
                CHECK(s.eigenpairs[i - 1].lambda <= e.lambda);
                CHECK(e.psi_at_p >= 0.0);
                CHECK(e.psi_at_p / std::sqrt(e.lambda) <= 0.5 + 1e-12);
                CHECK(std::abs(s.psi(i, {0.4, 1.7})) <= e.psi_at_p + 1e-12);
                CHECK(s.psi(i, s.base_point) == doctest::Approx(e.psi_at_p));
            }
        }
    }

    TEST_CASE("synthetic spectrum determinism")
    {
        const SpectrumData a = synthetic_weyl_spectrum(120, 3.0, 42);
        const SpectrumData b = synthetic_weyl_spectrum(120, 3.0, 42);
        const SpectrumData c = synthetic_weyl_spectrum(120, 3.0, 43);
        REQUIRE(a.eigenpairs.size() == b.eigenpairs.size());
        bool differs = false;
        for (std::size_t i = 0; i < a.eigenpairs.size(); ++i) {
            CHECK(a.eigenpairs[i].lambda == b.eigenpairs[i].lambda);
            CHECK(a.eigenpairs[i].psi_at_p == b.eigenpairs[i].psi_at_p);
            if (i < c.eigenpairs.size() && c.eigenpairs[i].lambda != a.eigenpairs[i].lambda)
                differs = true;
        }
        CHECK(differs);
    }

    TEST_CASE("parameter checks")
    {
        CHECK_THROWS_AS(torus_spectrum(0), ParameterError);
        CHECK_THROWS_AS(synthetic_weyl_spectrum(0, 2.0, 1), ParameterError);
        CHECK_THROWS_AS(provider_from_string("sphere"), ConfigError);
        CHECK(provider_from_string(to_string(ProviderTag::torus)) == ProviderTag::torus);
    }

    TEST_CASE("CSV round trip")
    {
        for (const SpectrumData& s : {torus_spectrum(3, {0.9, 3.3}), synthetic_weyl_spectrum(40, 4.0, 7)}) {
            const SpectrumData r = spectrum_from_csv(spectrum_to_csv(s, "round trip"));
            CHECK(r.provider == s.provider);
            CHECK(r.side == doctest::Approx(s.side).epsilon(1e-12));
            CHECK(r.area == doctest::Approx(s.area).epsilon(1e-12));
            REQUIRE(r.eigenpairs.size() == s.eigenpairs.size());
            const DPoint q{0.77, 2.21};
            for (std::size_t i = 0; i < s.eigenpairs.size(); ++i) {
                CHECK(r.eigenpairs[i].lambda == doctest::Approx(s.eigenpairs[i].lambda).epsilon(1e-12));
                CHECK(r.eigenpairs[i].m == s.eigenpairs[i].m);
                CHECK(r.eigenpairs[i].n == s.eigenpairs[i].n);
                CHECK(std::abs(r.psi(i, q) - s.psi(i, q)) < 1e-11);
            }
        }
        CHECK_THROWS_AS(spectrum_from_csv("index,lambda,psi_at_p,provider_tag,meta\n0,1.0\n"), ConfigError);
    }
}

#include "mmcomp/channel.hpp"
#include "mmcomp/errors.hpp"

#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

using namespace mmcomp;

TEST_CASE("f_upsilon integrates to one and is even")
{
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    // e = 2 s^4 flattens the logarithmic singularity at the origin.
    auto mapped = [](double s) { return f_upsilon(2.0 * s * s * s * s) * 8.0 * s * s * s; };
    const double left = GK::integrate([](double s) { return f_upsilon(-2.0 * s * s * s * s) * 8.0 * s * s * s; },
                                      0.0, 1.0, 8, 1e-10);
    const double right = GK::integrate(mapped, 0.0, 1.0, 8, 1e-10);
    CHECK(left + right == doctest::Approx(1.0).epsilon(1e-6));
    for (double e : {0.01, 0.3, 1.0, 1.7, 1.999}) CHECK(f_upsilon(e) == doctest::Approx(f_upsilon(-e)).epsilon(1e-12));
    CHECK(f_upsilon(2.0) == 0.0);
    CHECK(f_upsilon(-2.0) == 0.0);
    const UpsilonTable table = f_upsilon_table(512);
    CHECK(std::accumulate(table.masses().begin(), table.masses().end(), 0.0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK_THROWS_AS(f_upsilon(2.5), DomainError);
}

TEST_CASE("f_upsilon(1) matches a histogram of cos phi - cos theta")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    const double h = 0.01;
    long hits = 0;
    const long draws = 10000000;
    for (long i = 0; i < draws; ++i) {
        const double d = std::cos(angle(rng)) - std::cos(angle(rng));
        if (std::abs(d - 1.0) < 0.5 * h) ++hits;
    }
    CHECK(hits / (h * draws) == doctest::Approx(f_upsilon(1.0)).epsilon(0.02));
}

TEST_CASE("upsilon CDF matches the density")
{
    CHECK(upsilon_cdf(-3.0) == 0.0);
    CHECK(upsilon_cdf(3.0) == 1.0);
    CHECK(upsilon_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-10));
    for (double e : {-1.5, -0.4, 0.25, 1.2}) {
        const double h = 1e-5;
        const double fd = (upsilon_cdf(e + h) - upsilon_cdf(e - h)) / (2 * h);
        CHECK(fd == doctest::Approx(f_upsilon(e)).epsilon(1e-5));
        CHECK(upsilon_cdf(e) + upsilon_cdf(-e) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("tabulated density: unit mass, symmetric")
{
    const UpsilonTable t = f_upsilon_table(256);
    const auto& m = t.masses();
    CHECK(std::accumulate(m.begin(), m.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int i = 0; i < t.cells(); ++i) CHECK(t.mass(i) == doctest::Approx(t.mass(t.cells() - 1 - i)).epsilon(1e-10));
    CHECK_THROWS(f_upsilon_table(8));
}

TEST_CASE("array gain is bounded by one with unit grating lobes")
{
    for (int nt : {1, 8, 16, 64}) {
        ArrayConfig cfg{nt, 0.5};
        CHECK(std::abs(array_gain(0.0, cfg)) == doctest::Approx(1.0));
        // Grating lobes at y = k / spacing.
        CHECK(array_gain_sq(2.0, cfg) == doctest::Approx(1.0));
        CHECK(array_gain_sq(-2.0, cfg) == doctest::Approx(1.0));
        CHECK(array_gain_sq(2.0 + 1e-12, cfg) == doctest::Approx(1.0).epsilon(1e-6));
        for (int i = 0; i <= 4000; ++i) {
            const double y = -2.0 + i * 1e-3;
            const double g = array_gain_sq(y, cfg);
            CHECK(g <= 1.0 + 1e-12);
            CHECK(g == doctest::Approx(std::norm(array_gain(y, cfg))).epsilon(1e-9));
        }
    }
    ArrayConfig cfg{16, 0.5};
    // Nulls at y = k / (N_t d) between the lobes.
    CHECK(array_gain_sq(1.0 / cfg.length(), cfg) < 1e-20);
}

TEST_CASE("flat-top constant is the lobe mass")
{
    ArrayConfig cfg{16, 0.5};
    const double l = 1.0 / cfg.length();
    CHECK(flat_top_constant(cfg) == doctest::Approx(upsilon_cdf(l) - upsilon_cdf(-l)).epsilon(1e-10));
    CHECK(flat_top_constant(ArrayConfig{1, 0.25}) == doctest::Approx(1.0));
}

TEST_CASE("fading draws have unit mean power")
{
    Rng rng(7);
    for (auto model : {FadingModel::rayleigh(), FadingModel::nakagami(3), FadingModel::no_fading()}) {
        double sum = 0.0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) sum += std::norm(sample_fading(model, rng));
        CHECK(sum / n == doctest::Approx(1.0).epsilon(0.01));
    }
    CHECK_THROWS_AS(FadingModel::nakagami(0), ValidationError);
}

TEST_CASE("sampled upsilon follows the CDF")
{
    Rng rng(11);
    const int n = 100000;
    int below = 0;
    for (int i = 0; i < n; ++i) below += sample_upsilon(rng) < 0.7;
    CHECK(static_cast<double>(below) / n == doctest::Approx(upsilon_cdf(0.7)).epsilon(0.01));
}

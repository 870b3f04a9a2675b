#include "mmcomp/errors.hpp"
#include "mmcomp/geometry.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace mmcomp;

namespace {

Scenario two_tier_uniform()
{
    Scenario s;
    s.tiers = {{TierConfig::density_from_radius(150), 1.0, 0.0}, {TierConfig::density_from_radius(50), 0.25, 0.0}};
    s.pathloss = PathlossConfig::uniform(3);
    s.noise = {1e9, 10};
    return s;
}

Scenario blocked(double beta)
{
    Scenario s;
    s.tiers = {{TierConfig::density_from_radius(80), 1.0, beta}};
    s.pathloss = PathlossConfig::los_nlos(2, 4);
    s.noise = {1e9, 5};
    return s;
}

} // namespace

TEST_CASE("noise power from bandwidth and noise figure")
{
    // -174 + 90 + 10 = -74 dBm
    CHECK(noise_power({1e9, 10}) == doctest::Approx(std::pow(10.0, -7.4) * 1e-3).epsilon(1e-12));
}

TEST_CASE("density convention")
{
    CHECK(TierConfig::density_from_radius(150) == doctest::Approx(1.0 / (150.0 * 150.0 * std::numbers::pi)));
    CHECK(TierConfig{TierConfig::density_from_radius(80), 1, 0}.nominal_radius() == doctest::Approx(80.0));
}

TEST_CASE("intensity is the derivative of the measure")
{
    for (const Scenario& s : {two_tier_uniform(), blocked(0.006), blocked(0.02), blocked(0.0)}) {
        if (s.tiers[0].blockage == 0.0 && s.pathloss.mode == PathlossConfig::Mode::LosNlos) continue;
        for (double v : {1e-2, 1.0, 1e3, 1e6, 1e9}) {
            const double h = v * 1e-5;
            const double fd = (intensity_measure(v + h, s) - intensity_measure(v - h, s)) / (2 * h);
            CHECK(fd == doctest::Approx(intensity(v, s)).epsilon(1e-6));
        }
    }
}

TEST_CASE("uniform measure in closed form")
{
    const Scenario s = two_tier_uniform();
    const double v = 1e5;
    double expect = 0.0;
    for (const auto& t : s.tiers) expect += std::numbers::pi * t.density * std::pow(t.power * v, 2.0 / 3.0);
    CHECK(intensity_measure(v, s) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("blockage measure: small beta approaches the LOS-only measure")
{
    Scenario s = blocked(1e-9);
    s.pathloss = PathlossConfig::los_nlos(3, 3);
    Scenario u = s;
    u.pathloss = PathlossConfig::uniform(3);
    u.tiers[0].blockage = 0.0;
    for (double v : {1.0, 1e4, 1e7}) CHECK(intensity_measure(v, s) == doctest::Approx(intensity_measure(v, u)).epsilon(1e-6));
}

TEST_CASE("inverse measure round trip")
{
    for (const Scenario& s : {two_tier_uniform(), blocked(0.006)})
        for (double u : {1e-8, 1e-3, 0.5, 3.0, 40.0}) {
            const double v = inverse_intensity_measure(u, s);
            CHECK(intensity_measure(v, s) == doctest::Approx(u).epsilon(1e-10));
        }
}

TEST_CASE("joint density of the n strongest integrates to one")
{
    Scenario s = two_tier_uniform();
    // n = 1: f(v) = lambda(v) e^{-Lambda(v)}; in u = Lambda(v) the mass is int e^{-u} du.
    s.coop_n = 1;
    double sum = 0.0;
    const int steps = 4000;
    for (int i = 0; i < steps; ++i) {
        const double u0 = 40.0 * i / steps, u1 = 40.0 * (i + 1) / steps;
        const double v0 = inverse_intensity_measure(std::max(u0, 1e-12), s);
        const double v1 = inverse_intensity_measure(u1, s);
        const double vm = inverse_intensity_measure(0.5 * (u0 + u1), s);
        sum += joint_pathloss_pdf(OrderedPathloss({vm}), s) * (v1 - v0);
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("validation")
{
    Scenario s = blocked(0.006);
    CHECK_NOTHROW(s.validate());
    s.pathloss = PathlossConfig::los_nlos(4, 2);
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = blocked(0.0);
    CHECK_THROWS_AS(s.validate(), ValidationError); // alpha_1 = 2 with no blockage diverges
    s = two_tier_uniform();
    s.pathloss = PathlossConfig::uniform(2);
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = two_tier_uniform();
    s.tiers[1].density = -1;
    CHECK_THROWS_AS(s.validate(), ValidationError);
    s = two_tier_uniform();
    s.coop_n = 0;
    CHECK_THROWS_AS(s.validate(), ValidationError);
}

TEST_CASE("ordered pathloss helpers")
{
    OrderedPathloss g({1.0, 4.0});
    CHECK(g.inverse_sum() == doctest::Approx(1.25));
    CHECK(g.coherent_power() == doctest::Approx(2.25));
    CHECK(g.largest() == 4.0);
}

TEST_CASE("sampled point counts and LOS fraction")
{
    Scenario s = blocked(0.02);
    Rng rng(3);
    const double R = 400.0;
    double count = 0.0;
    long los = 0, total = 0;
    for (int i = 0; i < 2000; ++i) {
        const auto net = sample_network(s, R, rng);
        count += static_cast<double>(net.points.size());
        for (std::size_t k = 1; k < net.points.size(); ++k) CHECK(net.points[k - 1].pathloss <= net.points[k].pathloss);
        for (const auto& p : net.points) {
            const double r = p.los ? std::sqrt(p.pathloss) : std::pow(p.pathloss, 0.25);
            if (r > 49.0 && r < 51.0) {
                ++total;
                los += p.los;
            }
        }
    }
    CHECK(count / 2000 == doctest::Approx(s.tiers[0].density * std::numbers::pi * R * R).epsilon(0.02));
    CHECK(static_cast<double>(los) / total == doctest::Approx(std::exp(-1.0)).epsilon(0.1));
}

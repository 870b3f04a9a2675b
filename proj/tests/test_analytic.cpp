#include "mmcomp/analytic.hpp"
#include "mmcomp/errors.hpp"
#include "mmcomp/simulator.hpp"

#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>

using namespace mmcomp;

namespace {

Scenario one_tier(double radius, double beta, int nt, FadingModel fading, int n)
{
    Scenario s;
    s.tiers = {{TierConfig::density_from_radius(radius), 1.0, beta}};
    s.pathloss = PathlossConfig::los_nlos(2, 4);
    s.array.n_antennas = nt;
    s.noise = {1e9, 5};
    s.fading = fading;
    s.coop_n = n;
    return s;
}

Scenario uniform_tier(int n)
{
    Scenario s;
    s.tiers = {{TierConfig::density_from_radius(100), 1.0, 0.0}};
    s.pathloss = PathlossConfig::uniform(3.5);
    s.array.n_antennas = 16;
    s.noise = {1e9, 10};
    s.coop_n = n;
    return s;
}

} // namespace

TEST_CASE("residue route equals the regularized upper incomplete gamma")
{
    for (int k = 1; k <= 12; ++k)
        for (double m : {1.0, 2.0, 3.0, 4.0})
            for (double x : {0.0, 0.01, 0.1, 1.0, 3.0, 10.0}) {
                if (std::fmod(k, m) != 0.0) continue;
                const double q = boost::math::gamma_q(static_cast<double>(k), m * x + 1e-300);
                CHECK(std::abs(snr_tail_residue(k, m, x) - q) <= 1e-8);
                CHECK(snr_tail_gamma(k, m, x) == doctest::Approx(q).epsilon(1e-14));
            }
    CHECK(snr_tail_gamma(6, 3, 1.0) == doctest::Approx(0.916082).epsilon(1e-6));
}

TEST_CASE("corollary 1 with n = m = 1 is an exponential in the noise")
{
    Scenario s = one_tier(200, 0.025, 16, FadingModel::nakagami(1), 1);
    CoverageEngine e(s, Theorem::Cor1);
    const double noise = noise_power(s.noise) / s.array.n_antennas;
    for (double g : {1e6, 1e8, 1e10})
        for (double T : {0.1, 1.0, 10.0}) {
            const OrderedPathloss gamma({g});
            const double t_scaled = T / gamma.inverse_sum();
            CHECK(e.conditional(gamma, T) == doctest::Approx(std::exp(-t_scaled * noise)).epsilon(1e-12));
        }
}

TEST_CASE("theorem selection follows the fading model")
{
    CHECK(select_theorem(uniform_tier(1)) == Theorem::Th1);
    CHECK(select_theorem(one_tier(80, 0.006, 16, FadingModel::rayleigh(), 2)) == Theorem::Th2);
    CHECK(select_theorem(one_tier(80, 0.006, 16, FadingModel::nakagami(3), 2)) == Theorem::Th3);
    CHECK(select_theorem(one_tier(80, 0.006, 16, FadingModel::nakagami(3), 2), false) == Theorem::Cor1);
    CHECK(select_theorem(one_tier(80, 0.006, 16, FadingModel::no_fading(), 2)) == Theorem::Th4);
    CHECK_THROWS_AS(CoverageEngine(uniform_tier(1), Theorem::Th4), ValidationError);
    CHECK_THROWS_AS(CoverageEngine(one_tier(80, 0.006, 16, FadingModel::rayleigh(), 1), Theorem::Th1),
                    ValidationError);
    Scenario big = uniform_tier(kMaxCoopN + 1);
    CHECK_THROWS_AS(CoverageEngine(big, Theorem::Th1), UnsupportedError);
}

TEST_CASE("blockage theorem reduces to the uniform one without blockage")
{
    Scenario u = uniform_tier(2);
    Scenario b = u;
    b.pathloss = PathlossConfig::los_nlos(3.5, 3.5);
    b.tiers[0].blockage = 1e-9;
    const std::vector<double> th = {0.0, 10.0};
    const auto cu = analytic_curve(u, Theorem::Th1, th);
    const auto cb = analytic_curve(b, Theorem::Th2, th);
    for (std::size_t i = 0; i < th.size(); ++i) CHECK(std::abs(cu[i] - cb[i]) <= 2e-3);
}

TEST_CASE("coverage is monotone in the threshold and lies in [0, 1]")
{
    const auto c = analytic_curve(uniform_tier(2), Theorem::Th1, {-10, -5, 0, 5, 10, 15, 20});
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(c[i] >= 0.0);
        CHECK(c[i] <= 1.0);
        if (i) CHECK(c[i] <= c[i - 1]);
    }
    CHECK_THROWS_AS(CoverageEngine(uniform_tier(1), Theorem::Th1).coverage(0.0), DomainError);
}

TEST_CASE("parallel evaluation gives identical numbers")
{
    const std::vector<double> th = {-5, 5, 15};
    const auto a = analytic_curve(uniform_tier(1), Theorem::Th1, th, {}, 1);
    const auto b = analytic_curve(uniform_tier(1), Theorem::Th1, th, {}, 3);
    CHECK(a == b);
}

TEST_CASE("dropping interference raises coverage")
{
    CoverageOptions snr;
    snr.interference = false;
    const auto with = analytic_curve(uniform_tier(1), Theorem::Th1, {5.0});
    const auto without = analytic_curve(uniform_tier(1), Theorem::Th1, {5.0}, snr);
    CHECK(without[0] > with[0]);
}

TEST_CASE("Gil-Pelaez inversion of a Rayleigh signal without interference")
{
    // S ~ Exp(1): P(S > T' N) = e^{-T' N}.
    SignalTransform exp1 = [](std::complex<double> z) { return 1.0 / (1.0 + z); };
    for (double x : {0.1, 1.0, 3.0}) {
        const auto r = cf_inversion(exp1, nullptr, x, 1.0, QuadratureConfig{});
        CHECK(r.probability == doctest::Approx(std::exp(-x)).epsilon(1e-5));
        CHECK_FALSE(r.clamped);
    }
}

TEST_CASE("interference CDF is zero at the origin and increasing")
{
    const Scenario s = one_tier(80, 0.006, 16, FadingModel::no_fading(), 1);
    const InterferenceField f(s, LaplaceMode::Exact);
    const InterferenceTable t(f, 100.0, InterferenceTable::Ray::Imaginary);
    CHECK(interference_cdf(&t, 0.0, {}).probability == 0.0);
    CHECK(interference_cdf(nullptr, 1.0, {}).probability == 1.0);
    double prev = 0.0;
    for (double k : {0.3, 1.0, 3.0, 30.0}) {
        const double p = interference_cdf(&t, k * t.mean(), {}).probability;
        CHECK(p >= prev - 1e-6);
        prev = p;
    }
    CHECK(prev > 0.9);
}

TEST_CASE("Th3 with n = 1 is exact: agrees with Monte Carlo")
{
    const Scenario s = one_tier(200, 0.025, 16, FadingModel::nakagami(2), 1);
    const std::vector<double> th = {0.0, 10.0};
    const auto a = analytic_curve(s, Theorem::Th3, th);
    SimConfig sim;
    sim.realizations = 40000;
    sim.seed = 17;
    const auto mc = estimate_coverage(s, th, sim);
    for (std::size_t i = 0; i < th.size(); ++i)
        CHECK(std::abs(a[i] - mc.entries[i].coverage) <= std::max(0.02, 3.0 * *mc.entries[i].ci_halfwidth));
}

#include "mmcomp/laplace.hpp"

#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <complex>

using namespace mmcomp;
using cplx = std::complex<double>;

namespace {

Scenario example(double beta, int nt)
{
    Scenario s;
    s.tiers = {{TierConfig::density_from_radius(80), 1.0, beta}};
    s.pathloss = PathlossConfig::los_nlos(2, 4);
    s.array.n_antennas = nt;
    s.noise = {1e9, 5};
    return s;
}

// J(s) by direct quadrature over v in [gamma_n, inf).
double exponent_direct(const InterferenceField& f, double s, double gamma_n)
{
    boost::math::quadrature::exp_sinh<double> q;
    const auto& g = f.gains();
    return q.integrate([&](double t) {
        const double v = gamma_n + t;
        return g.psi(s / v) * intensity(v, f.scenario());
    }, 1e-11);
}

} // namespace

TEST_CASE("gain law: unit mass, moments, bounded gains")
{
    for (int nt : {8, 64}) {
        const auto g = GainDistribution::exact(ArrayConfig{nt, 0.5});
        double mass = 0.0, m1 = 0.0;
        for (std::size_t i = 0; i < g.gains().size(); ++i) {
            mass += g.weights()[i];
            m1 += g.weights()[i] * g.gains()[i];
            CHECK(g.gains()[i] <= 1.0 + 1e-12);
        }
        CHECK(mass <= 1.0 + 1e-12);
        CHECK(g.moment(1) == doctest::Approx(m1).epsilon(1e-3));
        Rng rng(5);
        double mc = 0.0;
        const int draws = 400000;
        for (int i = 0; i < draws; ++i) mc += array_gain_sq(sample_upsilon(rng), ArrayConfig{nt, 0.5});
        CHECK(g.moment(1) == doctest::Approx(mc / draws).epsilon(0.02));
        CHECK(g.moment(2) <= g.moment(1));
    }
}

TEST_CASE("psi matches its definition, including the small-argument branch")
{
    const auto g = GainDistribution::exact(ArrayConfig{16, 0.5});
    for (double z : {1e-6, 1e-2, 1.0, 1e3}) {
        double direct = 0.0;
        for (std::size_t i = 0; i < g.gains().size(); ++i) {
            const double zg = z * g.gains()[i];
            direct += g.weights()[i] * zg / (1.0 + zg);
        }
        CHECK(g.psi(z) == doctest::Approx(direct).epsilon(1e-10));
        const cplx zc(0.0, z);
        cplx dc = 0.0;
        for (std::size_t i = 0; i < g.gains().size(); ++i) {
            const cplx zg = zc * g.gains()[i];
            dc += g.weights()[i] * zg / (1.0 + zg);
        }
        CHECK(std::abs(g.psi(zc) - dc) <= 1e-10 * std::abs(dc) + 1e-300);
    }
}

TEST_CASE("flat-top law")
{
    const ArrayConfig cfg{16, 0.5};
    const auto g = GainDistribution::flat_top(cfg);
    const double c = flat_top_constant(cfg);
    CHECK(g.psi(3.0) == doctest::Approx(c * 3.0 / 4.0));
    CHECK(g.moment(1) == doctest::Approx(c));
}

TEST_CASE("interference exponent agrees with direct quadrature")
{
    for (auto mode : {LaplaceMode::Exact, LaplaceMode::FlatTop}) {
        const InterferenceField f(example(0.006, 16), mode);
        for (double gn : {10.0, 1e4}) {
            for (double s : {1e-2 * gn, gn, 1e3 * gn}) {
                const double j = f.exponent(s, gn);
                CHECK(j == doctest::Approx(exponent_direct(f, s, gn)).epsilon(1e-7));
            }
            CHECK(f.exponent(0.0, gn) == 0.0);
        }
    }
}

TEST_CASE("mean interference is the slope of L_I at the origin")
{
    const InterferenceField f(example(0.003, 16), LaplaceMode::Exact);
    const double gn = 1e3;
    const double h = 1e-4 * gn;
    CHECK(f.exponent(h, gn) / h == doctest::Approx(f.mean(gn)).epsilon(1e-3));
}

TEST_CASE("laplace transform: real ray is a decreasing map into (0, 1]")
{
    const Scenario s = example(0.006, 16);
    double prev = 1.0;
    for (double x : {0.0, 1.0, 1e2, 1e4, 1e6}) {
        const double l = laplace_interference(cplx(x, 0.0), 1e3, s, LaplaceMode::Exact).real();
        CHECK(l <= prev + 1e-15);
        CHECK(l > 0.0);
        prev = l;
    }
    CHECK(laplace_interference(cplx(0.0, 0.0), 1e3, s, LaplaceMode::Exact).real() == doctest::Approx(1.0));
    CHECK(std::abs(laplace_noise(cplx(0.0, 5.0), s)) == doctest::Approx(1.0));
}

TEST_CASE("interference tables reproduce the exact transform on both rays")
{
    const InterferenceField f(example(0.006, 16), LaplaceMode::Exact);
    const double gn = 500.0;
    const InterferenceTable re(f, gn, InterferenceTable::Ray::Real);
    const InterferenceTable im(f, gn, InterferenceTable::Ray::Imaginary);
    CHECK(re.mean() == doctest::Approx(f.mean(gn)).epsilon(1e-6));
    for (double y : {1e-2 / re.mean(), 1.0 / re.mean(), 30.0 / re.mean()}) {
        const cplx want_re = std::exp(-f.exponent(cplx(y, 0.0), gn));
        const cplx want_im = std::exp(-f.exponent(cplx(0.0, y), gn));
        CHECK(std::abs(re.laplace(y) - want_re) < 1e-7);
        CHECK(std::abs(im.laplace(y) - want_im) < 1e-7);
    }
    CHECK(re.laplace(0.0) == cplx(1.0, 0.0));
    CHECK(std::abs(re.laplace(10.0 * re.y_max())) < 1e-15);
}

#include "mmcomp/channel.hpp"

#include "mmcomp/errors.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <string>

namespace mmcomp {

namespace {

constexpr double pi = std::numbers::pi;

using GK = boost::math::quadrature::gauss_kronrod<double, 21>;

// Distribution function of a single directional cosine cos(phi).
double cosine_cdf(double w)
{
    if (w <= -1.0) return 0.0;
    if (w >= 1.0) return 1.0;
    return 1.0 - std::acos(w) / pi;
}

double upsilon_cdf_nonneg(double e)
{
    // P(cos phi - cos theta <= e) = E_theta[F(e + cos theta)], theta ~ U[0, pi].
    // The integrand saturates at 1 for cos theta >= 1 - e.
    const double kink = std::acos(1.0 - e);
    // theta = kink + span s^2 removes the square-root onset at the kink.
    const double span = pi - kink;
    auto integrand = [e, kink, span](double s) {
        return 2.0 * span * s * cosine_cdf(e + std::cos(kink + span * s * s));
    };
    double upper = 0.0;
    if (span > 0.0)
        upper = GK::integrate(integrand, 0.0, 1.0, 15, 1e-12);
    return (kink + upper) / pi;
}

} // namespace

void ArrayConfig::validate() const
{
    if (n_antennas < 1)
        throw ValidationError("array: n_antennas must be >= 1");
    if (!(spacing > 0.0))
        throw ValidationError("array: spacing must be > 0");
}

FadingModel FadingModel::nakagami(int m)
{
    if (m < 1)
        throw ValidationError("fading: Nakagami shape m must be a positive integer");
    return FadingModel(Kind::Nakagami, m);
}

const char* to_string(FadingModel::Kind kind)
{
    switch (kind) {
    case FadingModel::Kind::Rayleigh: return "rayleigh";
    case FadingModel::Kind::Nakagami: return "nakagami";
    case FadingModel::Kind::NoFading: return "none";
    }
    return "?";
}

std::complex<double> array_gain(double y, const ArrayConfig& cfg)
{
    const double n = cfg.n_antennas;
    const double phase = pi * cfg.spacing * (n - 1.0) * y;
    const double den = std::sin(pi * cfg.spacing * y);
    double ratio;
    if (std::abs(den) < 1e-9) {
        // y sits on a grating lobe y = k/spacing: the ratio tends to (-1)^{k(N-1)}.
        const long k = std::lround(cfg.spacing * y);
        ratio = ((k * (cfg.n_antennas - 1)) % 2 == 0) ? 1.0 : -1.0;
    } else {
        ratio = std::sin(pi * cfg.spacing * n * y) / (n * den);
    }
    return std::polar(1.0, phase) * ratio;
}

double array_gain_sq(double y, const ArrayConfig& cfg)
{
    const double den = std::sin(pi * cfg.spacing * y);
    if (std::abs(den) < 1e-9)
        return 1.0;
    const double r = std::sin(pi * cfg.spacing * cfg.n_antennas * y) / (cfg.n_antennas * den);
    return r * r;
}

double f_upsilon(double eps)
{
    if (!(std::abs(eps) <= 2.0))
        throw DomainError("f_upsilon: |eps| must be <= 2, got " + std::to_string(eps));
    const double e = std::abs(eps);
    if (e == 2.0)
        return 0.0;
    // The convolution of two arcsine laws reduces to a complete elliptic
    // integral: f(e) = 1 / (pi AGM(2, |e|)).
    double a = 2.0, b = e;
    while (a - b > 1e-15 * a) {
        const double m = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = m;
    }
    return 1.0 / (pi * a);
}

double upsilon_cdf(double eps)
{
    if (eps <= -2.0) return 0.0;
    if (eps >= 2.0) return 1.0;
    if (eps < 0.0) return 1.0 - upsilon_cdf_nonneg(-eps);
    return upsilon_cdf_nonneg(eps);
}

UpsilonTable::UpsilonTable(int grid_cells)
{
    if (grid_cells < 16)
        throw ValidationError("f_upsilon_table: grid_cells must be >= 16");
    mass_.resize(grid_cells);
    const int half = grid_cells / 2;
    auto edge = [grid_cells](int i) { return -2.0 + 4.0 * i / grid_cells; };
    double prev = 0.0;
    for (int i = 0; i < half; ++i) {
        const double next = upsilon_cdf(edge(i + 1));
        mass_[i] = next - prev;
        mass_[grid_cells - 1 - i] = mass_[i];
        prev = next;
    }
    if (grid_cells % 2 == 1)
        mass_[half] = 1.0 - 2.0 * prev;
}

UpsilonTable f_upsilon_table(int grid_cells)
{
    return UpsilonTable(grid_cells);
}

const UpsilonTable& default_upsilon_table()
{
    static const UpsilonTable table(512);
    return table;
}

double flat_top_constant(const ArrayConfig& cfg)
{
    const double w = 1.0 / cfg.length();
    if (w >= 2.0)
        return 1.0;
    return 2.0 * upsilon_cdf(w) - 1.0;
}

double sample_upsilon(Rng& rng)
{
    std::uniform_real_distribution<double> angle(-pi, pi);
    const double a = angle(rng);
    const double b = angle(rng);
    return std::cos(a) - std::cos(b);
}

std::complex<double> sample_fading(const FadingModel& model, Rng& rng)
{
    switch (model.kind()) {
    case FadingModel::Kind::Rayleigh: {
        std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
        const double re = normal(rng);
        const double im = normal(rng);
        return {re, im};
    }
    case FadingModel::Kind::Nakagami: {
        const double m = model.shape();
        std::gamma_distribution<double> power(m, 1.0 / m);
        std::uniform_real_distribution<double> phase(-pi, pi);
        const double g = power(rng);
        return std::polar(std::sqrt(g), phase(rng));
    }
    case FadingModel::Kind::NoFading:
        return {1.0, 0.0};
    }
    return {1.0, 0.0};
}

} // namespace mmcomp

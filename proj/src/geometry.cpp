#include "mmcomp/geometry.hpp"

#include "mmcomp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace mmcomp {

namespace {

// r^alpha with the common integer exponents done by multiplication.
double power_of(double r, double alpha)
{
    if (alpha == 2.0) return r * r;
    if (alpha == 3.0) return r * r * r;
    if (alpha == 4.0) return (r * r) * (r * r);
    return std::pow(r, alpha);
}

constexpr double pi = std::numbers::pi;

// (1 - e^{-x}(1 + x)) / x^2, stable as x -> 0 where it tends to 1/2.
double truncated_gamma2_ratio(double x)
{
    if (x < 0.05) {
        // sum_{k>=2} (-1)^k (k-1)/k! x^{k-2}
        double term = 0.5; // k = 2: 1/2!
        double sum = term;
        double fact = 2.0;
        double xp = 1.0;
        for (int k = 3; k < 14; ++k) {
            fact *= k;
            xp *= -x;
            sum += (k - 1) / fact * xp;
        }
        return sum;
    }
    return -std::expm1(-x) / (x * x) - std::exp(-x) / x;
}

// Expected number of tier points within radius r that are LOS / NLOS.
double los_count(const TierConfig& t, double r)
{
    return 2.0 * pi * t.density * r * r * truncated_gamma2_ratio(t.blockage * r);
}

double nlos_count(const TierConfig& t, double r)
{
    return pi * t.density * r * r - los_count(t, r);
}

bool all_blocked(const Scenario& s)
{
    return std::all_of(s.tiers.begin(), s.tiers.end(),
                       [](const TierConfig& t) { return t.blockage > 0.0; });
}

} // namespace

double TierConfig::density_from_radius(double r)
{
    return 1.0 / (r * r * pi);
}

double TierConfig::nominal_radius() const
{
    return 1.0 / std::sqrt(pi * density);
}

void Scenario::validate() const
{
    if (tiers.empty())
        throw ValidationError("scenario: at least one tier is required");
    for (std::size_t k = 0; k < tiers.size(); ++k) {
        const auto& t = tiers[k];
        const std::string where = "tier " + std::to_string(k + 1) + ": ";
        if (!(t.density > 0.0) || !std::isfinite(t.density))
            throw ValidationError(where + "density must be > 0");
        if (!(t.power > 0.0) || !std::isfinite(t.power))
            throw ValidationError(where + "power must be > 0");
        if (!(t.blockage >= 0.0) || !std::isfinite(t.blockage))
            throw ValidationError(where + "blockage must be >= 0");
    }
    if (coop_n < 1)
        throw ValidationError("scenario: coop_n must be >= 1");
    array.validate();
    if (!(noise.bandwidth_hz > 0.0))
        throw ValidationError("noise: bandwidth must be > 0");
    if (!std::isfinite(noise.noise_figure_db))
        throw ValidationError("noise: noise figure must be finite");

    if (pathloss.mode == PathlossConfig::Mode::Uniform) {
        if (!(pathloss.alpha_los > 2.0))
            throw ValidationError("pathloss: exponent must be > 2");
        for (const auto& t : tiers)
            if (t.blockage != 0.0)
                throw ValidationError("pathloss: uniform mode requires zero blockage on every tier");
    } else {
        if (!(pathloss.alpha_nlos > 2.0))
            throw ValidationError("pathloss: NLOS exponent must be > 2");
        if (!(pathloss.alpha_los <= pathloss.alpha_nlos))
            throw ValidationError("pathloss: LOS exponent must not exceed the NLOS exponent");
        // LOS links only reach to ~1/beta, so any positive LOS exponent keeps the
        // interference integrable once every tier is blocked.
        if (all_blocked(*this) ? !(pathloss.alpha_los > 0.0) : !(pathloss.alpha_los > 2.0))
            throw ValidationError(
                "pathloss: LOS exponent must be > 2 unless every tier has positive blockage");
    }
}

double noise_power(const NoiseConfig& cfg)
{
    const double dbm = -174.0 + 10.0 * std::log10(cfg.bandwidth_hz) + cfg.noise_figure_db;
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

double intensity(double v, const Scenario& s)
{
    if (!(v > 0.0))
        throw DomainError("intensity: v must be > 0");
    double total = 0.0;
    if (s.pathloss.mode == PathlossConfig::Mode::Uniform) {
        const double d = 2.0 / s.pathloss.alpha_los;
        for (const auto& t : s.tiers)
            total += t.density * pi * d * std::pow(t.power, d) * std::pow(v, d - 1.0);
        return total;
    }
    const double a1 = s.pathloss.alpha_los;
    const double a2 = s.pathloss.alpha_nlos;
    const double d1 = 2.0 / a1;
    const double d2 = 2.0 / a2;
    for (const auto& t : s.tiers) {
        const double big_a = pi * t.density * d1 * std::pow(t.power, d1);
        const double big_b = pi * t.density * d2 * std::pow(t.power, d2);
        const double r1 = std::pow(v * t.power, 1.0 / a1);
        const double r2 = std::pow(v * t.power, 1.0 / a2);
        total += big_a * std::pow(v, d1 - 1.0) * std::exp(-t.blockage * r1);
        total += big_b * std::pow(v, d2 - 1.0) * -std::expm1(-t.blockage * r2);
    }
    return total;
}

double intensity_measure(double v, const Scenario& s)
{
    if (!(v > 0.0))
        throw DomainError("intensity_measure: v must be > 0");
    double total = 0.0;
    if (s.pathloss.mode == PathlossConfig::Mode::Uniform) {
        const double d = 2.0 / s.pathloss.alpha_los;
        for (const auto& t : s.tiers)
            total += pi * t.density * std::pow(t.power * v, d);
        return total;
    }
    for (const auto& t : s.tiers) {
        total += los_count(t, std::pow(v * t.power, 1.0 / s.pathloss.alpha_los));
        total += nlos_count(t, std::pow(v * t.power, 1.0 / s.pathloss.alpha_nlos));
    }
    return total;
}

double inverse_intensity_measure(double u, const Scenario& s)
{
    if (!(u > 0.0))
        throw DomainError("inverse_intensity_measure: u must be > 0");
    if (s.pathloss.mode == PathlossConfig::Mode::Uniform) {
        const double d = 2.0 / s.pathloss.alpha_los;
        double c = 0.0;
        for (const auto& t : s.tiers)
            c += pi * t.density * std::pow(t.power, d);
        return std::pow(u / c, 1.0 / d);
    }
    // Safeguarded Newton on x = log v; the measure is increasing and unbounded.
    double lo = -1.0, hi = 1.0;
    while (intensity_measure(std::exp(lo), s) > u) lo -= 8.0;
    while (intensity_measure(std::exp(hi), s) < u) hi += 8.0;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double v = std::exp(x);
        const double f = intensity_measure(v, s) - u;
        if (f > 0.0) hi = x; else lo = x;
        const double df = intensity(v, s) * v;
        double next = x - f / df;
        if (!(next > lo && next < hi) || !std::isfinite(next))
            next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-14 * std::max(1.0, std::abs(x)) || hi - lo < 1e-14)
            return std::exp(next);
        x = next;
    }
    throw ConvergenceError("inverse_intensity_measure: no convergence");
}

OrderedPathloss::OrderedPathloss(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty())
        throw DomainError("OrderedPathloss: empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] > 0.0))
            throw DomainError("OrderedPathloss: values must be positive");
        if (i > 0 && !(values_[i] > values_[i - 1]))
            throw DomainError("OrderedPathloss: values must be strictly ascending");
    }
}

double OrderedPathloss::inverse_sum() const
{
    double s = 0.0;
    for (double v : values_) s += 1.0 / v;
    return s;
}

double OrderedPathloss::coherent_power() const
{
    double s = 0.0;
    for (double v : values_) s += 1.0 / std::sqrt(v);
    return s * s;
}

double joint_pathloss_pdf(const OrderedPathloss& g, const Scenario& s)
{
    double p = std::exp(-intensity_measure(g.largest(), s));
    for (double v : g.values()) p *= intensity(v, s);
    return p;
}

void sample_network_points(const Scenario& s, double window_radius, Rng& rng,
                           std::vector<NetworkPoint>& out)
{
    if (!(window_radius > 0.0))
        throw DomainError("sample_network: window radius must be > 0");
    out.clear();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const bool blocked_mode = s.pathloss.mode == PathlossConfig::Mode::LosNlos;
    for (std::size_t k = 0; k < s.tiers.size(); ++k) {
        const auto& t = s.tiers[k];
        std::poisson_distribution<long> count(t.density * pi * window_radius * window_radius);
        const long n = count(rng);
        const double inv_power = 1.0 / t.power;
        for (long i = 0; i < n; ++i) {
            const double r = window_radius * std::sqrt(unit(rng));
            bool los = true;
            if (blocked_mode && t.blockage > 0.0)
                los = unit(rng) < std::exp(-t.blockage * r);
            const double alpha = los ? s.pathloss.alpha_los : s.pathloss.alpha_nlos;
            out.push_back({power_of(r, alpha) * inv_power, static_cast<int>(k), los});
        }
    }
}

NetworkRealization sample_network(const Scenario& s, double window_radius, Rng& rng)
{
    NetworkRealization out;
    out.window_radius = window_radius;
    sample_network_points(s, window_radius, rng, out.points);
    std::sort(out.points.begin(), out.points.end(),
              [](const NetworkPoint& a, const NetworkPoint& b) { return a.pathloss < b.pathloss; });
    return out;
}

} // namespace mmcomp

#include "mmcomp/simulator.hpp"

#include "mmcomp/errors.hpp"
#include "mmcomp/laplace.hpp"
#include "mmcomp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <thread>

namespace mmcomp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxRetries = 3;

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

Rng substream(std::uint64_t seed, std::uint64_t index)
{
    return Rng(splitmix64(splitmix64(seed) ^ index));
}

// int_R^inf r^{1-a} e^{-beta r} dr
double radial_tail(double a, double beta, double R)
{
    if (beta <= 0.0) {
        if (a <= 2.0) throw DomainError("radial tail diverges");
        return std::pow(R, 2.0 - a) / (a - 2.0);
    }
    double t_max = std::log1p(60.0 / (beta * R));
    if (a > 2.0) t_max = std::min(t_max, 60.0 / (a - 2.0));
    auto f = [&](double t) {
        const double r = R * std::exp(t);
        return std::pow(r, 2.0 - a) * std::exp(-beta * r);
    };
    return integrate_adaptive(f, 0.0, t_max, 1e-10);
}

// sum_k 2 pi lambda_k P_k^q int_R^inf r E[l(r)^q] dr, l the pathloss gain r^-alpha.
double tier_tail(const Scenario& s, double R, int q)
{
    double total = 0.0;
    for (const auto& t : s.tiers) {
        const double scale = 2.0 * kPi * t.density * std::pow(t.power, q);
        double part;
        if (s.pathloss.mode == PathlossConfig::Mode::Uniform || t.blockage <= 0.0) {
            const double a = s.pathloss.mode == PathlossConfig::Mode::Uniform ? s.pathloss.alpha_los
                                                                               : s.pathloss.alpha_nlos;
            part = radial_tail(q * a, 0.0, R);
        } else {
            const double a1 = q * s.pathloss.alpha_los, a2 = q * s.pathloss.alpha_nlos;
            part = radial_tail(a1, t.blockage, R) + radial_tail(a2, 0.0, R)
                   - radial_tail(a2, t.blockage, R);
        }
        total += scale * part;
    }
    return total;
}

double far_field_sd(const Scenario& s, double R, const GainDistribution& gains)
{
    // Rayleigh interferers: E|h|^4 = 2.
    return std::sqrt(2.0 * gains.moment(2) * tier_tail(s, R, 2));
}

struct Worker {
    const Scenario& scenario;
    double noise;
    double far_field;
    bool interference;
    std::vector<NetworkPoint> points;

    double sinr(Rng& rng)
    {
        const auto n = static_cast<std::size_t>(scenario.coop_n);
        auto by_pathloss = [](const NetworkPoint& a, const NetworkPoint& b) {
            return a.pathloss < b.pathloss;
        };
        if (points.size() > n)
            std::nth_element(points.begin(), points.begin() + (n - 1), points.end(), by_pathloss);
        std::complex<double> amplitude = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            amplitude += sample_fading(scenario.fading, rng) / std::sqrt(points[i].pathloss);
        double interf = far_field;
        if (interference) {
            std::exponential_distribution<double> power(1.0);
            for (std::size_t i = n; i < points.size(); ++i) {
                const double g = array_gain_sq(sample_upsilon(rng), scenario.array);
                interf += power(rng) * g / points[i].pathloss;
            }
        }
        return std::norm(amplitude) / (noise + interf);
    }
};

} // namespace

void SimConfig::validate() const
{
    if (realizations < 1) throw ValidationError("sim: realizations must be >= 1");
    if (jobs < 0) throw ValidationError("sim: jobs must be >= 0");
}

int default_jobs()
{
    if (const char* env = std::getenv("MMCOMP_JOBS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

double far_field_interference(const Scenario& scenario, double radius)
{
    if (!(radius > 0.0)) throw DomainError("far_field_interference: radius must be > 0");
    const GainDistribution gains = GainDistribution::exact(scenario.array);
    return gains.moment(1) * tier_tail(scenario, radius, 1);
}

double auto_window_radius(const Scenario& scenario)
{
    scenario.validate();
    double r_nom = 0.0;
    for (const auto& t : scenario.tiers) r_nom = std::max(r_nom, t.nominal_radius());
    const GainDistribution gains = GainDistribution::exact(scenario.array);
    const double reference = gains.moment(1) * tier_tail(scenario, r_nom, 1);
    double R = 10.0 * r_nom;
    while (far_field_sd(scenario, R, gains) > 1e-2 * reference && R < 100.0 * r_nom) R *= 1.25;
    return R;
}

double sample_signal(const OrderedPathloss& gamma, const FadingModel& fading, Rng& rng)
{
    std::complex<double> amplitude = 0.0;
    for (double v : gamma.values()) amplitude += sample_fading(fading, rng) / std::sqrt(v);
    return std::norm(amplitude);
}

double sinr_from_realization(const NetworkRealization& net, const Scenario& scenario, Rng& rng,
                             double far_field, bool interference)
{
    if (net.points.size() < static_cast<std::size_t>(scenario.coop_n))
        throw DomainError("realization holds fewer than n base stations");
    Worker w{scenario, noise_power(scenario.noise) / scenario.array.n_antennas, far_field,
             interference, net.points};
    return w.sinr(rng);
}

double simulate_sinr(const Scenario& scenario, Rng& rng)
{
    double radius = auto_window_radius(scenario);
    for (int attempt = 0; attempt <= kMaxRetries; ++attempt, radius *= 1.5) {
        const NetworkRealization net = sample_network(scenario, radius, rng);
        if (net.points.size() >= static_cast<std::size_t>(scenario.coop_n))
            return sinr_from_realization(net, scenario, rng, far_field_interference(scenario, radius));
    }
    throw ConvergenceError("fewer than n base stations after enlarging the window");
}

std::vector<double> simulate_sinr_samples(const Scenario& scenario, const SimConfig& sim,
                                          long* resampled, double* window)
{
    scenario.validate();
    sim.validate();
    const double R = sim.window_radius > 0.0 ? sim.window_radius : auto_window_radius(scenario);
    if (window) *window = R;
    const double noise = noise_power(scenario.noise) / scenario.array.n_antennas;
    std::vector<double> far(kMaxRetries + 1, 0.0);
    if (sim.interference) {
        double radius = R;
        for (auto& f : far) {
            f = far_field_interference(scenario, radius);
            radius *= 1.5;
        }
    }
    const long total = sim.realizations;
    std::vector<double> out(static_cast<std::size_t>(total));
    const int jobs = std::max(1, std::min<int>(sim.jobs > 0 ? sim.jobs : default_jobs(),
                                               static_cast<int>(std::min<long>(total, 1 << 16))));
    std::vector<long> retries(jobs, 0);
    std::vector<std::exception_ptr> errors(jobs);
    auto run = [&](int worker) {
        try {
            Worker w{scenario, noise, 0.0, sim.interference, {}};
            const auto n = static_cast<std::size_t>(scenario.coop_n);
            for (long i = worker; i < total; i += jobs) {
                Rng rng = substream(sim.seed, static_cast<std::uint64_t>(i));
                double radius = R;
                int attempt = 0;
                for (;;) {
                    sample_network_points(scenario, radius, rng, w.points);
                    if (w.points.size() >= n) break;
                    if (++attempt > kMaxRetries)
                        throw ConvergenceError("fewer than n base stations after enlarging the window");
                    radius *= 1.5;
                }
                if (attempt > 0) ++retries[worker];
                w.far_field = far[attempt];
                out[static_cast<std::size_t>(i)] = w.sinr(rng);
            }
        } catch (...) {
            errors[worker] = std::current_exception();
        }
    };
    if (jobs == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < jobs; ++k) pool.emplace_back(run, k);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    if (resampled) {
        *resampled = 0;
        for (long r : retries) *resampled += r;
    }
    return out;
}

CoverageCurve estimate_coverage(const Scenario& scenario, const std::vector<double>& thresholds_db,
                                const SimConfig& sim)
{
    for (std::size_t i = 1; i < thresholds_db.size(); ++i)
        if (!(thresholds_db[i] > thresholds_db[i - 1]))
            throw ValidationError("thresholds must be strictly ascending");
    CoverageCurve curve;
    std::vector<double> samples = simulate_sinr_samples(scenario, sim, &curve.resampled, &curve.window_radius);
    curve.realizations = sim.realizations;
    std::sort(samples.begin(), samples.end());
    const double N = static_cast<double>(samples.size());
    for (double db : thresholds_db) {
        const double T = std::pow(10.0, db / 10.0);
        const auto above = samples.end() - std::upper_bound(samples.begin(), samples.end(), T);
        const double p = static_cast<double>(above) / N;
        curve.entries.push_back({db, p, 1.96 * std::sqrt(p * (1.0 - p) / N), "mc"});
    }
    return curve;
}

} // namespace mmcomp

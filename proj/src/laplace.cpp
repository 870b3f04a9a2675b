#include "mmcomp/laplace.hpp"

#include "mmcomp/errors.hpp"
#include "mmcomp/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace mmcomp {

namespace {

constexpr double kMinGain = 1e-12;
constexpr int kBinsPerDecade = 16;
// |z| g_max below which psi is replaced by its cubic Taylor polynomial.
constexpr double kLinearRegime = 1e-4;
// Stop tabulating once |L_I| < e^{-45}.
constexpr double kExponentCeiling = 45.0;

const UpsilonTable& cached_table(int cells)
{
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<UpsilonTable>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[cells];
    if (!slot) slot = std::make_unique<UpsilonTable>(cells);
    return *slot;
}

// Integrates f(t) over t in [0, inf) in Gauss-Legendre panels; f must decay
// at least geometrically once `settled(t)` holds.
template <class S, class F, class Settled>
S integrate_log_axis(F&& f, Settled&& settled)
{
    S total{};
    double t = 0.0;
    double width = 1.0;
    while (t < 700.0) {
        const S part = gauss_legendre12(f, t, t + width);
        total += part;
        t += width;
        if (settled(t)) {
            if (std::abs(part) <= 1e-14 * std::abs(total))
                return total;
            width = std::min(2.0 * width, 4.0);
        }
    }
    throw ConvergenceError("interference integral does not converge");
}

} // namespace

const char* to_string(LaplaceMode mode)
{
    return mode == LaplaceMode::Exact ? "exact" : "flat-top";
}

GainDistribution::GainDistribution(std::vector<double> w, std::vector<double> g)
{
    std::vector<std::size_t> order(g.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return g[a] < g[b]; });
    for (auto& p : partial_) p.assign(1, 0.0);
    for (std::size_t k : order) {
        weights_.push_back(w[k]);
        gains_.push_back(g[k]);
        double term = w[k];
        for (auto& p : partial_) {
            term *= g[k];
            p.push_back(p.back() + term);
        }
        max_gain_ = std::max(max_gain_, g[k]);
    }
}

GainDistribution GainDistribution::exact(const ArrayConfig& cfg)
{
    cfg.validate();
    // At least 64 cells per main-lobe half width 1/L_t.
    int cells = 8192;
    while (4.0 / cells > 1.0 / (64.0 * cfg.length()) && cells < (1 << 20))
        cells *= 2;
    const UpsilonTable& table = cached_table(cells);

    const int bins = 12 * kBinsPerDecade + 1;
    std::vector<double> bin_w(bins, 0.0), bin_wg(bins, 0.0);
    double raw_moments[4] = {0, 0, 0, 0};
    const double offset = 0.5 / std::sqrt(3.0); // two-point Gauss inside each cell
    for (int i = 0; i < table.cells(); ++i) {
        const double half_mass = 0.5 * table.mass(i);
        for (double u : {-offset, offset}) {
            const double g = array_gain_sq(table.cell_center(i) + u * table.cell_width(), cfg);
            double gp = 1.0;
            for (int p = 0; p < 4; ++p) {
                raw_moments[p] += half_mass * gp;
                gp *= g;
            }
            if (g < kMinGain) continue;
            const int b = std::min(bins - 1, static_cast<int>(-std::log10(g) * kBinsPerDecade));
            bin_w[b] += half_mass;
            bin_wg[b] += half_mass * g;
        }
    }
    std::vector<double> w, g;
    for (int b = 0; b < bins; ++b) {
        if (bin_w[b] <= 0.0) continue;
        w.push_back(bin_w[b]);
        g.push_back(bin_wg[b] / bin_w[b]);
    }
    GainDistribution out(std::move(w), std::move(g));
    for (int p = 0; p < 4; ++p) out.moments_[p] = raw_moments[p];
    return out;
}

GainDistribution GainDistribution::flat_top(const ArrayConfig& cfg)
{
    cfg.validate();
    const double c = flat_top_constant(cfg);
    GainDistribution out({c}, {1.0});
    out.moments_[0] = 1.0;
    for (int p = 1; p < 4; ++p) out.moments_[p] = c;
    return out;
}

GainDistribution GainDistribution::for_mode(LaplaceMode mode, const ArrayConfig& cfg)
{
    return mode == LaplaceMode::Exact ? exact(cfg) : flat_top(cfg);
}

InterferenceField::InterferenceField(const Scenario& scenario, LaplaceMode mode)
    : scenario_(scenario), gains_(GainDistribution::for_mode(mode, scenario.array))
{
    scenario_.validate();
}

template <class S>
S InterferenceField::exponent(S s, double gamma_n) const
{
    if (!(gamma_n > 0.0))
        throw DomainError("interference exponent: gamma_n must be > 0");
    if (std::real(s) < 0.0)
        throw DomainError("interference exponent: Re(s) must be >= 0");
    if (s == S{}) return S{};
    const double reach = std::abs(s) * gains_.max_gain();
    const double m1 = gains_.moment(1), m2 = gains_.moment(2), m3 = gains_.moment(3);
    auto integrand = [&](double t) -> S {
        const double v = gamma_n * std::exp(t);
        const S z = s / v;
        S p;
        if (reach / v < kLinearRegime)
            p = z * (m1 - z * (m2 - z * m3));
        else
            p = gains_.psi(z);
        return p * (intensity(v, scenario_) * v);
    };
    auto settled = [&](double t) { return reach / (gamma_n * std::exp(t)) < kLinearRegime; };
    return integrate_log_axis<S>(integrand, settled);
}

template double InterferenceField::exponent<double>(double, double) const;
template std::complex<double> InterferenceField::exponent<std::complex<double>>(
    std::complex<double>, double) const;

double InterferenceField::mean(double gamma_n) const
{
    if (!(gamma_n > 0.0))
        throw DomainError("interference mean: gamma_n must be > 0");
    auto integrand = [&](double t) { return intensity(gamma_n * std::exp(t), scenario_); };
    return gains_.moment(1) * integrate_log_axis<double>(integrand, [](double) { return true; });
}

std::complex<double> laplace_noise(std::complex<double> s, const Scenario& scenario)
{
    return std::exp(-s * noise_power(scenario.noise) / static_cast<double>(scenario.array.n_antennas));
}

std::complex<double> laplace_interference(std::complex<double> s, double gamma_n,
                                          const Scenario& scenario, LaplaceMode mode)
{
    const InterferenceField field(scenario, mode);
    return std::exp(-field.exponent(s, gamma_n));
}

InterferenceTable::InterferenceTable(const InterferenceField& field, double gamma_n, Ray ray)
    : ray_(ray), mean_(field.mean(gamma_n))
{
    const std::complex<double> dir = ray == Ray::Real ? 1.0 : std::complex<double>(0.0, 1.0);
    const double step = std::log(10.0) / 16.0;
    log_y_min_ = std::log(1e-6 / mean_);
    std::vector<std::complex<double>> samples;
    int extra = -1;
    for (int k = 0; k < 800; ++k) {
        const double x = log_y_min_ + k * step;
        const double y = std::exp(x);
        const std::complex<double> s = dir * y;
        const std::complex<double> j = field.exponent(s, gamma_n);
        std::complex<double> lr = std::log(j / s);
        if (!samples.empty()) {
            // keep the phase continuous so the spline sees a smooth curve
            const double turns = std::round((samples.back().imag() - lr.imag()) / (2.0 * std::numbers::pi));
            lr += std::complex<double>(0.0, 2.0 * std::numbers::pi * turns);
        }
        samples.push_back(lr);
        if (extra < 0 && j.real() > kExponentCeiling) {
            log_y_max_ = x;
            extra = 3;
        }
        if (extra >= 0 && extra-- == 0) break;
    }
    if (extra >= 0 || log_y_max_ == 0.0)
        throw ConvergenceError("interference table: transform never decays");
    log_ratio_ = UniformSpline<std::complex<double>>(log_y_min_, step, std::move(samples));
}

std::complex<double> InterferenceTable::laplace(double y) const
{
    if (y <= 0.0) return 1.0;
    const double x = std::log(y);
    if (x > log_y_max_) return 0.0;
    const std::complex<double> dir = ray_ == Ray::Real ? 1.0 : std::complex<double>(0.0, 1.0);
    const std::complex<double> ratio = std::exp(log_ratio_(std::max(x, log_y_min_)));
    return std::exp(-ratio * dir * y);
}

} // namespace mmcomp

#include "mmcomp/analytic.hpp"

#include "mmcomp/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <exception>
#include <map>
#include <numbers>
#include <string>
#include <thread>

namespace mmcomp {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;
constexpr double kClampSlack = 1e-3;
constexpr std::size_t kTableCacheLimit = 20000;

InversionResult finish(double raw, int panels)
{
    InversionResult out;
    out.raw = raw;
    out.panels = panels;
    out.probability = std::clamp(raw, 0.0, 1.0);
    out.clamped = raw < -kClampSlack || raw > 1.0 + kClampSlack;
    return out;
}

double radical_inverse(unsigned long i, unsigned base)
{
    double inv = 1.0 / base, f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

constexpr unsigned kPrimes[kMaxCoopN] = {2, 3, 5, 7, 11, 13, 17, 19};

} // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

const char* to_string(Theorem th)
{
    switch (th) {
    case Theorem::Th1: return "th1";
    case Theorem::Th2: return "th2";
    case Theorem::Th3: return "th3";
    case Theorem::Cor1: return "cor1";
    case Theorem::Th4: return "th4";
    }
    return "?";
}

Theorem select_theorem(const Scenario& scenario, bool interference)
{
    switch (scenario.fading.kind()) {
    case FadingModel::Kind::Rayleigh:
        return scenario.pathloss.mode == PathlossConfig::Mode::Uniform ? Theorem::Th1 : Theorem::Th2;
    case FadingModel::Kind::Nakagami:
        return interference ? Theorem::Th3 : Theorem::Cor1;
    case FadingModel::Kind::NoFading:
        break;
    }
    return Theorem::Th4;
}

// ---------------------------------------------------------------------------
// Inversion kernels

InversionResult cf_inversion(const SignalTransform& signal_transform,
                             const InterferenceTable* table, double noise_over_nt,
                             double T_scaled, const QuadratureConfig& quad)
{
    if (!(T_scaled > 0.0)) throw DomainError("cf_inversion: T' must be > 0");
    const cplx j(0.0, 1.0);
    // W = S - T'(I + N) has P(W = 0) = 0, so P(W > 0) = 1/2 + (1/pi) int_0^inf Im phi_W(t) / t dt.
    const double h = 1e-7;
    const double mean_s = std::max((1.0 - signal_transform(h).real()) / h, 0.0);
    const double mean_i = table ? table->mean() : 0.0;
    const double scale = std::max({mean_s, T_scaled * (mean_i + noise_over_nt), 1e-300});
    auto phi = [&](double t) {
        cplx v = signal_transform(-j * t) * std::exp(-j * (t * T_scaled * noise_over_nt));
        if (table) v *= table->laplace(t * T_scaled);
        return v;
    };
    auto f = [&](double t) { return phi(t).imag() / t; };
    auto envelope = [&](double t) {
        double e = std::abs(signal_transform(-j * t));
        if (table) e *= std::abs(table->laplace(t * T_scaled));
        return e;
    };
    const auto r = integrate_oscillatory(f, envelope, kPi / scale, quad.inversion_tail_tol,
                                         quad.max_subdivisions);
    if (!r.converged) throw ConvergenceError("cf_inversion: tail bound not reached");
    return finish(0.5 + r.value / kPi, r.panels);
}

InversionResult cf_inversion(const SignalTransform& signal_transform, const OrderedPathloss& gamma,
                             const Scenario& scenario, double T, double T_scaled,
                             const CoverageOptions& opt)
{
    if (!(T > 0.0)) throw DomainError("cf_inversion: T must be > 0");
    scenario.validate();
    const double noise = noise_power(scenario.noise) / scenario.array.n_antennas;
    if (!opt.interference) return cf_inversion(signal_transform, nullptr, noise, T_scaled, opt.quad);
    const InterferenceField field(scenario, opt.mode);
    const InterferenceTable table(field, gamma.largest(), InterferenceTable::Ray::Imaginary);
    return cf_inversion(signal_transform, &table, noise, T_scaled, opt.quad);
}

InversionResult interference_cdf(const InterferenceTable* table, double x,
                                 const QuadratureConfig& quad)
{
    if (x <= 0.0) return finish(0.0, 0);
    if (!table) return finish(1.0, 0);
    // P(I < x) = (2/pi) int_0^inf Re L_I(jt) sin(t x) / t dt for I >= 0 with a density.
    auto f = [&](double t) { return table->laplace(t).real() * std::sin(t * x) / t; };
    auto envelope = [&](double t) { return std::abs(table->laplace(t)); };
    const double panel = kPi / std::max(x, table->mean());
    const auto r = integrate_oscillatory(f, envelope, panel, quad.inversion_tail_tol,
                                         quad.max_subdivisions);
    if (!r.converged) throw ConvergenceError("interference_cdf: tail bound not reached");
    return finish(2.0 * r.value / kPi, r.panels);
}

// ---------------------------------------------------------------------------
// SNR tail for Nakagami signal: Q(k, m x)

double snr_tail_gamma(int k, double m, double x)
{
    if (k < 1 || !(m > 0.0) || x < 0.0) throw DomainError("snr_tail_gamma: bad arguments");
    if (x == 0.0) return 1.0;
    return boost::math::gamma_q(static_cast<double>(k), m * x);
}

double snr_tail_residue(int k, double m, double x)
{
    if (k < 1 || !(m > 0.0) || x < 0.0) throw DomainError("snr_tail_residue: bad arguments");
    const cplx two_pi_j(0.0, 2.0 * kPi);
    const cplx z_star = m / two_pi_j;
    const cplx lead = std::pow(-1.0, k) / (m * std::pow(two_pi_j / m, k));
    // g(z) = (-1)^k [1 - (1 - w)^k] / ((2 pi j / m)^k 2 pi j z) e^{-2 pi j z x}, w = z / z*;
    // the bracket is w sum_{i<k} (1 - w)^i, which cancels the pole at z = 0.
    auto g = [&](cplx z) {
        const cplx q = 1.0 - z / z_star;
        cplx sum = 0.0, p = 1.0;
        for (int i = 0; i < k; ++i) {
            sum += p;
            p *= q;
        }
        return lead * sum * std::exp(-two_pi_j * z * x);
    };
    const int order = k - 1;
    const double zabs = std::abs(z_star);
    const double radius =
        std::clamp(order / (2.0 * kPi * std::max(x, 1e-300)), 0.1 * zabs, 0.9 * zabs);
    constexpr int nodes = 64;
    cplx coeff = 0.0; // g^{(order)}(z*) / order!
    for (int i = 0; i < nodes; ++i) {
        const double theta = 2.0 * kPi * (i + 0.5) / nodes;
        const cplx d = std::polar(radius, theta);
        coeff += g(z_star + d) * std::pow(d, -order);
    }
    coeff /= static_cast<double>(nodes);
    return (-two_pi_j * coeff).real();
}

// ---------------------------------------------------------------------------
// Engine

struct CoverageEngine::Impl {
    Scenario scenario;
    Theorem theorem;
    CoverageOptions opt;
    int n;
    double noise; // sigma^2 / N_t
    double m = 1.0;
    std::unique_ptr<InterferenceField> field;
    std::map<double, std::unique_ptr<InterferenceTable>> real_tables, imag_tables;

    const InterferenceTable& table(double gamma_n, InterferenceTable::Ray ray)
    {
        auto& cache = ray == InterferenceTable::Ray::Real ? real_tables : imag_tables;
        if (cache.size() > kTableCacheLimit) cache.clear();
        auto& slot = cache[gamma_n];
        if (!slot) slot = std::make_unique<InterferenceTable>(*field, gamma_n, ray);
        return *slot;
    }

    double inverse_measure(double u) const { return inverse_intensity_measure(u, scenario); }

    template <class K>
    double integrate_simplex(K&& k) const
    {
        const double cut = opt.quad.outer_tail_cut;
        const double u_max = boost::math::gamma_q_inv(static_cast<double>(n), cut);
        const double tol = opt.quad.rel_tol;
        const double abs_tol = opt.quad.abs_tol;
        constexpr int kDepth = 15;
        if (n == 1) {
            return integrate_adaptive(
                [&](double u) { return std::exp(-u) * k(OrderedPathloss({inverse_measure(u)})); },
                0.0, u_max, tol, kDepth, abs_tol);
        }
        if (n == 2) {
            return integrate_adaptive(
                [&](double u) {
                    const double g2 = inverse_measure(u);
                    const double inner = integrate_adaptive(
                        [&](double x) { return k(OrderedPathloss({inverse_measure(u * x), g2})); },
                        0.0, 1.0, tol, kDepth, abs_tol);
                    return u * std::exp(-u) * inner;
                },
                0.0, u_max, tol, kDepth, abs_tol);
        }
        // Quasi-Monte Carlo: u_n ~ Gamma(n), the rest are u_n times sorted uniforms.
        const int points = opt.quad.qmc_points;
        double sum = 0.0;
        std::vector<double> u(n), v(n);
        for (int i = 1; i <= points; ++i) {
            const double q = radical_inverse(static_cast<unsigned long>(i), kPrimes[0]);
            const double un = boost::math::gamma_p_inv(static_cast<double>(n), q);
            for (int d = 1; d < n; ++d)
                u[d - 1] = un * radical_inverse(static_cast<unsigned long>(i), kPrimes[d]);
            std::sort(u.begin(), u.end() - 1);
            u[n - 1] = un;
            for (int d = 0; d < n; ++d) v[d] = inverse_measure(u[d]);
            sum += k(OrderedPathloss(v));
        }
        return sum / points;
    }
};

CoverageEngine::CoverageEngine(const Scenario& scenario, Theorem theorem, const CoverageOptions& opt)
    : impl_(std::make_unique<Impl>())
{
    scenario.validate();
    opt.quad.validate();
    if (scenario.coop_n > kMaxCoopN)
        throw UnsupportedError("cooperating set size " + std::to_string(scenario.coop_n)
                               + " exceeds the integrator limit of " + std::to_string(kMaxCoopN));
    const auto kind = scenario.fading.kind();
    const bool ok = (theorem == Theorem::Th1 && kind == FadingModel::Kind::Rayleigh
                     && scenario.pathloss.mode == PathlossConfig::Mode::Uniform)
                    || (theorem == Theorem::Th2 && kind == FadingModel::Kind::Rayleigh)
                    || ((theorem == Theorem::Th3 || theorem == Theorem::Cor1)
                        && kind == FadingModel::Kind::Nakagami)
                    || (theorem == Theorem::Th4 && kind == FadingModel::Kind::NoFading);
    if (!ok)
        throw ValidationError(std::string("theorem ") + to_string(theorem)
                              + " does not apply to fading model "
                              + to_string(kind));
    impl_->scenario = scenario;
    impl_->theorem = theorem;
    impl_->opt = opt;
    if (theorem == Theorem::Cor1) impl_->opt.interference = false;
    impl_->n = scenario.coop_n;
    impl_->noise = noise_power(scenario.noise) / scenario.array.n_antennas;
    if (kind == FadingModel::Kind::Nakagami) impl_->m = scenario.fading.shape();
    if (impl_->opt.interference)
        impl_->field = std::make_unique<InterferenceField>(scenario, opt.mode);
}

CoverageEngine::~CoverageEngine() = default;

double CoverageEngine::conditional(const OrderedPathloss& gamma, double T)
{
    Impl& s = *impl_;
    const double t_scaled = T / gamma.inverse_sum();
    const bool interf = s.opt.interference;
    auto track = [&](const InversionResult& r) {
        ++diag_.inversions;
        if (r.clamped) ++diag_.clamped;
        diag_.max_excursion = std::max(diag_.max_excursion, std::max(-r.raw, r.raw - 1.0));
        return r.probability;
    };
    switch (s.theorem) {
    case Theorem::Th1:
    case Theorem::Th2: {
        const double li = interf ? std::exp(-s.field->exponent(t_scaled, gamma.largest())) : 1.0;
        return li * std::exp(-t_scaled * s.noise);
    }
    case Theorem::Th3: {
        const double kk = s.n * s.m;
        const double m = s.m;
        SignalTransform ls = [kk, m](cplx z) { return std::pow(1.0 + z / m, -kk); };
        const InterferenceTable* table =
            interf ? &s.table(gamma.largest(), InterferenceTable::Ray::Imaginary) : nullptr;
        return track(cf_inversion(ls, table, s.noise, t_scaled, s.opt.quad));
    }
    case Theorem::Cor1: {
        const double x = t_scaled * s.noise;
        const double kd = s.n * s.m;
        const int k = static_cast<int>(std::lround(kd));
        if (std::abs(kd - k) > 1e-12)
            throw UnsupportedError("corollary 1 needs an integer n*m");
        const double q = snr_tail_gamma(k, s.m, x);
        const double check = snr_tail_residue(k, s.m, x);
        if (std::abs(q - check) > 1e-6)
            throw ConvergenceError("residue and incomplete-gamma routes disagree: "
                                   + std::to_string(check) + " vs " + std::to_string(q));
        return q;
    }
    case Theorem::Th4: {
        const double x = gamma.coherent_power() / T - s.noise;
        const InterferenceTable* table =
            interf && x > 0.0 ? &s.table(gamma.largest(), InterferenceTable::Ray::Imaginary) : nullptr;
        return track(interference_cdf(table, x, s.opt.quad));
    }
    }
    return 0.0;
}

double CoverageEngine::coverage(double T)
{
    if (!(T > 0.0)) throw DomainError("coverage: threshold must be > 0");
    const double p = impl_->integrate_simplex([&](const OrderedPathloss& g) { return conditional(g, T); });
    return std::clamp(p, 0.0, 1.0);
}

std::vector<double> CoverageEngine::curve(const std::vector<double>& thresholds_db)
{
    std::vector<double> out;
    out.reserve(thresholds_db.size());
    for (double db : thresholds_db) out.push_back(coverage(db_to_linear(db)));
    return out;
}

std::vector<double> analytic_curve(const Scenario& scenario, Theorem theorem,
                                   const std::vector<double>& thresholds_db,
                                   const CoverageOptions& opt)
{
    return analytic_curve(scenario, theorem, thresholds_db, opt, 1, nullptr);
}

std::vector<double> analytic_curve(const Scenario& scenario, Theorem theorem,
                                   const std::vector<double>& thresholds_db,
                                   const CoverageOptions& opt, int jobs,
                                   AnalyticDiagnostics* diagnostics)
{
    const std::size_t count = thresholds_db.size();
    const int workers = std::max(1, std::min(jobs, static_cast<int>(count)));
    std::vector<double> out(count);
    std::vector<AnalyticDiagnostics> diag(workers);
    std::vector<std::exception_ptr> errors(workers);
    auto run = [&](int w) {
        try {
            CoverageEngine engine(scenario, theorem, opt);
            for (std::size_t i = w; i < count; i += workers)
                out[i] = engine.coverage(db_to_linear(thresholds_db[i]));
            diag[w] = engine.diagnostics();
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    if (diagnostics) {
        *diagnostics = {};
        for (const auto& d : diag) {
            diagnostics->inversions += d.inversions;
            diagnostics->clamped += d.clamped;
            diagnostics->max_excursion = std::max(diagnostics->max_excursion, d.max_excursion);
        }
    }
    return out;
}

double coverage_rayleigh(const Scenario& scenario, double T, const CoverageOptions& opt)
{
    const Theorem th = scenario.pathloss.mode == PathlossConfig::Mode::Uniform ? Theorem::Th1 : Theorem::Th2;
    return CoverageEngine(scenario, th, opt).coverage(T);
}

double coverage_nakagami_ub(const Scenario& scenario, double T, const CoverageOptions& opt)
{
    return CoverageEngine(scenario, Theorem::Th3, opt).coverage(T);
}

double coverage_snr_nakagami(const Scenario& scenario, double T, const CoverageOptions& opt)
{
    return CoverageEngine(scenario, Theorem::Cor1, opt).coverage(T);
}

double coverage_nofading(const Scenario& scenario, double T, const CoverageOptions& opt)
{
    return CoverageEngine(scenario, Theorem::Th4, opt).coverage(T);
}

} // namespace mmcomp

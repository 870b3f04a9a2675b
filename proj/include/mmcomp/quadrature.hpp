#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace mmcomp {

// Knobs shared by the analytic engines.
struct QuadratureConfig {
    double rel_tol = 1e-5;
    double abs_tol = 1e-5;             // floor for the outer integrals, in probability
    double outer_tail_cut = 1e-10;     // drop outer mass where e^{-Lambda} falls below this
    double inversion_tail_tol = 1e-6;  // stop the inversion integral below this envelope
    int max_subdivisions = 20000;      // panels per inversion integral
    int qmc_points = 4096;             // ordered-simplex points when n >= 3

    void validate() const;
};

/// Globally adaptive Gauss-Kronrod (21-point) on a finite interval; stops when
/// the summed error estimate is below max(abs_tol, rel_tol |I|). Pieces at
/// max_depth are frozen; at most 400 pieces are formed.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth = 15, double abs_tol = 0.0);

/// Fixed 12-point Gauss-Legendre rule mapped to [a, b]; the integrand may be complex.
template <class F>
auto gauss_legendre12(F&& f, double a, double b) -> decltype(f(a));

/// Natural cubic spline through equally spaced samples, any field-valued type.
template <class T>
class UniformSpline {
public:
    UniformSpline() = default;
    UniformSpline(double x0, double step, std::vector<T> values);

    double x_begin() const { return x0_; }
    double x_end() const { return x0_ + step_ * (values_.size() - 1); }
    std::size_t size() const { return values_.size(); }
    // Clamped to the end samples outside [x_begin, x_end].
    T operator()(double x) const;

private:
    double x0_ = 0.0;
    double step_ = 1.0;
    std::vector<T> values_;
    std::vector<T> second_; // second derivatives at the knots
};

/// Wynn epsilon extrapolation of a sequence of partial sums.
class EpsilonExtrapolator {
public:
    // Adds the next partial sum and returns the current extrapolated limit.
    double push(double partial_sum);
    std::size_t count() const { return sums_.size(); }

private:
    std::vector<double> sums_;
};

struct OscillatoryIntegral {
    double value = 0.0;
    int panels = 0;
    bool converged = false;
};

/// Integrates f over [0, inf) as a sum of panels of width `panel`, each by
/// adaptive Gauss-Kronrod, accelerating the partial sums with Wynn epsilon.
/// Stops when `envelope(t)` drops below `tail_tol` at a panel edge or two
/// consecutive extrapolations agree within `tail_tol`.
OscillatoryIntegral integrate_oscillatory(const std::function<double(double)>& f,
                                          const std::function<double(double)>& envelope,
                                          double panel, double tail_tol, int max_panels);

// ---------------------------------------------------------------------------

namespace detail {
extern const double gl12_nodes[6];
extern const double gl12_weights[6];
void solve_natural_spline(double step, const std::vector<double>& y, std::vector<double>& m);
} // namespace detail

template <class F>
auto gauss_legendre12(F&& f, double a, double b) -> decltype(f(a))
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    decltype(f(a)) sum{};
    for (int i = 0; i < 6; ++i) {
        const double dx = half * detail::gl12_nodes[i];
        sum += detail::gl12_weights[i] * (f(mid - dx) + f(mid + dx));
    }
    return sum * half;
}

template <class T>
UniformSpline<T>::UniformSpline(double x0, double step, std::vector<T> values)
    : x0_(x0), step_(step), values_(std::move(values))
{
    const std::size_t n = values_.size();
    second_.assign(n, T{});
    if constexpr (std::is_same_v<T, double>) {
        detail::solve_natural_spline(step_, values_, second_);
    } else {
        std::vector<double> re(n), im(n), mre, mim;
        for (std::size_t i = 0; i < n; ++i) {
            re[i] = values_[i].real();
            im[i] = values_[i].imag();
        }
        detail::solve_natural_spline(step_, re, mre);
        detail::solve_natural_spline(step_, im, mim);
        for (std::size_t i = 0; i < n; ++i) second_[i] = T(mre[i], mim[i]);
    }
}

template <class T>
T UniformSpline<T>::operator()(double x) const
{
    const std::size_t n = values_.size();
    double u = (x - x0_) / step_;
    if (u <= 0.0) return values_.front();
    if (u >= static_cast<double>(n - 1)) return values_.back();
    std::size_t i = static_cast<std::size_t>(u);
    const double b = u - static_cast<double>(i);
    const double a = 1.0 - b;
    const double h2 = step_ * step_ / 6.0;
    return a * values_[i] + b * values_[i + 1]
           + ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * h2;
}

} // namespace mmcomp

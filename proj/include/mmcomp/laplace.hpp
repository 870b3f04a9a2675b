#pragma once

#include "mmcomp/channel.hpp"
#include "mmcomp/geometry.hpp"
#include "mmcomp/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <type_traits>
#include <vector>

namespace mmcomp {

enum class LaplaceMode { Exact, FlatTop };

const char* to_string(LaplaceMode mode);

/// Discrete law of the interferer beamforming gain g = |G_t(Upsilon)|^2.
/// Nodes are merged in narrow log-gain bins; zero-gain mass is dropped.
class GainDistribution {
public:
    static GainDistribution exact(const ArrayConfig& cfg);
    // Unit gain on the main lobe with mass c = flat_top_constant, zero elsewhere.
    static GainDistribution flat_top(const ArrayConfig& cfg);
    static GainDistribution for_mode(LaplaceMode mode, const ArrayConfig& cfg);

    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& gains() const { return gains_; }
    double moment(int p) const { return moments_[p]; } // p in 0..3
    double max_gain() const { return max_gain_; }

    // E[z g / (1 + z g)] over the gain law, for real or complex z.
    template <class S>
    S psi(S z) const;

private:
    GainDistribution(std::vector<double> w, std::vector<double> g);

    std::vector<double> weights_; // ascending gains
    std::vector<double> gains_;
    std::vector<double> partial_[3]; // partial_[p][k] = sum_{i<k} w_i g_i^{p+1}
    double moments_[4] = {0, 0, 0, 0};
    double max_gain_ = 0.0;
};

/// Shot-noise interference seen by the typical user beyond the n-th strongest
/// base station: exponent J of L_I(s) = exp(-J(s, gamma_n)).
class InterferenceField {
public:
    InterferenceField(const Scenario& scenario, LaplaceMode mode);

    const Scenario& scenario() const { return scenario_; }
    const GainDistribution& gains() const { return gains_; }

    /// J(s) = int_{gamma_n}^inf psi(s / v) lambda(v) dv, Re(s) >= 0.
    template <class S>
    S exponent(S s, double gamma_n) const;

    /// E[I | gamma_n].
    double mean(double gamma_n) const;

private:
    Scenario scenario_;
    GainDistribution gains_;
};

/// L_N(s) = exp(-s sigma^2 / N_t).
std::complex<double> laplace_noise(std::complex<double> s, const Scenario& scenario);

/// L_I(s) for interferers beyond gamma_n.
std::complex<double> laplace_interference(std::complex<double> s, double gamma_n,
                                          const Scenario& scenario, LaplaceMode mode);

/// L_I restricted to the positive real axis (Ray::Real) or to the positive
/// imaginary axis (Ray::Imaginary) for a fixed gamma_n, interpolated in log-log
/// space from exact samples.
class InterferenceTable {
public:
    enum class Ray { Real, Imaginary };

    InterferenceTable(const InterferenceField& field, double gamma_n, Ray ray);

    /// L_I(y) on the real ray, L_I(j y) on the imaginary ray; y >= 0.
    std::complex<double> laplace(double y) const;
    double mean() const { return mean_; }
    Ray ray() const { return ray_; }
    double y_max() const { return std::exp(log_y_max_); }

private:
    Ray ray_;
    double mean_ = 0.0;
    double log_y_min_ = 0.0;
    double log_y_max_ = 0.0;
    UniformSpline<std::complex<double>> log_ratio_; // log(J(r y) / (r y)) vs log y
};

// ---------------------------------------------------------------------------

template <class S>
S GainDistribution::psi(S z) const
{
    // Nodes with |z g| < 1e-3 enter through a cubic Taylor polynomial.
    const double az = std::abs(z);
    const std::size_t split = static_cast<std::size_t>(
        std::lower_bound(gains_.begin(), gains_.end(), 1e-3 / az) - gains_.begin());
    S sum = z * (partial_[0][split] - z * (partial_[1][split] - z * partial_[2][split]));
    for (std::size_t k = split; k < gains_.size(); ++k) {
        const S zg = z * gains_[k];
        sum += weights_[k] * zg / (1.0 + zg);
    }
    return sum;
}

} // namespace mmcomp

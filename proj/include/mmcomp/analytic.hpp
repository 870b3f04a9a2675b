#pragma once

#include "mmcomp/geometry.hpp"
#include "mmcomp/laplace.hpp"
#include "mmcomp/quadrature.hpp"

#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace mmcomp {

struct CoverageOptions {
    LaplaceMode mode = LaplaceMode::Exact;
    bool interference = true; // false drops L_I (SNR coverage)
    QuadratureConfig quad;
};

// Largest cooperating-set size the ordered-simplex integrator accepts.
inline constexpr int kMaxCoopN = 8;

enum class Theorem { Th1, Th2, Th3, Cor1, Th4 };

const char* to_string(Theorem th);

/// Theorem matching the scenario's fading model and pathloss mode.
Theorem select_theorem(const Scenario& scenario, bool interference = true);

struct InversionResult {
    double probability = 0.0; // clamped to [0, 1]
    double raw = 0.0;
    bool clamped = false;     // raw left [0, 1] by more than 1e-3
    int panels = 0;
};

using SignalTransform = std::function<std::complex<double>(std::complex<double>)>;

/// P(S > T'(I + sigma^2/N_t)) given the cooperating pathlosses, for a signal
/// with Laplace transform `signal_transform`. T is the SINR threshold and
/// T_scaled the multiplier T' applied to interference and noise.
InversionResult cf_inversion(const SignalTransform& signal_transform, const OrderedPathloss& gamma,
                             const Scenario& scenario, double T, double T_scaled,
                             const CoverageOptions& opt = {});

/// Same, against a prepared interference table on the imaginary ray; a null
/// table means no interference.
InversionResult cf_inversion(const SignalTransform& signal_transform,
                             const InterferenceTable* table, double noise_over_nt,
                             double T_scaled, const QuadratureConfig& quad);

/// P(I < x) from the imaginary-ray table (null table: I = 0).
InversionResult interference_cdf(const InterferenceTable* table, double x,
                                 const QuadratureConfig& quad);

/// Q(k, m x) via the Cauchy-integral derivative of the contour integrand at
/// z* = m / (2 pi j), k = n m.
double snr_tail_residue(int k, double m, double x);

/// Regularized upper incomplete gamma Q(k, m x).
double snr_tail_gamma(int k, double m, double x);

// Each coverage function takes a linear threshold T > 0.
double coverage_rayleigh(const Scenario& scenario, double T, const CoverageOptions& opt = {});
double coverage_nakagami_ub(const Scenario& scenario, double T, const CoverageOptions& opt = {});
double coverage_snr_nakagami(const Scenario& scenario, double T, const CoverageOptions& opt = {});
double coverage_nofading(const Scenario& scenario, double T, const CoverageOptions& opt = {});

struct AnalyticDiagnostics {
    long inversions = 0;
    long clamped = 0;
    double max_excursion = 0.0; // largest distance of a raw inversion from [0, 1]
};

/// Evaluates one theorem over a threshold grid, sharing interference tables
/// across thresholds.
class CoverageEngine {
public:
    CoverageEngine(const Scenario& scenario, Theorem theorem, const CoverageOptions& opt = {});
    ~CoverageEngine();
    CoverageEngine(const CoverageEngine&) = delete;
    CoverageEngine& operator=(const CoverageEngine&) = delete;

    double coverage(double T);
    std::vector<double> curve(const std::vector<double>& thresholds_db);

    /// Coverage conditioned on the cooperating pathlosses.
    double conditional(const OrderedPathloss& gamma, double T);

    const AnalyticDiagnostics& diagnostics() const { return diag_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    AnalyticDiagnostics diag_;
};

std::vector<double> analytic_curve(const Scenario& scenario, Theorem theorem,
                                   const std::vector<double>& thresholds_db,
                                   const CoverageOptions& opt = {});

/// Same, spreading thresholds over `jobs` threads (one engine each); the
/// result does not depend on `jobs`.
std::vector<double> analytic_curve(const Scenario& scenario, Theorem theorem,
                                   const std::vector<double>& thresholds_db,
                                   const CoverageOptions& opt, int jobs,
                                   AnalyticDiagnostics* diagnostics = nullptr);

double db_to_linear(double db);

} // namespace mmcomp

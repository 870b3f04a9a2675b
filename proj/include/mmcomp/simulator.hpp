#pragma once

#include "mmcomp/channel.hpp"
#include "mmcomp/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mmcomp {

struct SimConfig {
    long realizations = 100000;
    std::uint64_t seed = 1;
    double window_radius = 0.0; // meters; <= 0 picks auto_window_radius
    int jobs = 0;               // worker threads; 0 uses default_jobs()
    bool interference = true;

    void validate() const;
    bool operator==(const SimConfig&) const = default;
};

struct CurveEntry {
    double threshold_db = 0.0;
    double coverage = 0.0;
    std::optional<double> ci_halfwidth; // present for simulated entries
    std::string method;
};

struct CoverageCurve {
    std::vector<CurveEntry> entries; // ascending thresholds
    long realizations = 0;
    long resampled = 0;       // realizations that needed a larger window
    double window_radius = 0.0;
};

/// MMCOMP_JOBS if set and positive, else the hardware concurrency (at least 1).
int default_jobs();

/// Mean interference from base stations beyond `radius` meters, averaged over
/// Rayleigh fading and the beamforming gain law.
double far_field_interference(const Scenario& scenario, double radius);

/// Smallest window (>= 10 nominal cell radii of the sparsest tier) whose
/// truncated far field fluctuates by less than 1% of the interference
/// beyond one nominal radius.
double auto_window_radius(const Scenario& scenario);

/// |sum_i gamma_i^{-1/2} h_i|^2 with h drawn from `fading`.
double sample_signal(const OrderedPathloss& gamma, const FadingModel& fading, Rng& rng);

/// SINR of one realization: the n smallest pathlosses cooperate, every other
/// point interferes; `far_field` is added to the interference as a constant.
/// Throws DomainError if the realization holds fewer than n points.
double sinr_from_realization(const NetworkRealization& net, const Scenario& scenario, Rng& rng,
                             double far_field = 0.0, bool interference = true);

/// One SINR draw in an automatically sized window.
double simulate_sinr(const Scenario& scenario, Rng& rng);

/// Empirical coverage over an ascending threshold list (dB), all thresholds
/// scored on the same SINR samples.
CoverageCurve estimate_coverage(const Scenario& scenario, const std::vector<double>& thresholds_db,
                                const SimConfig& sim);

/// Raw SINR samples of estimate_coverage, in realization order.
std::vector<double> simulate_sinr_samples(const Scenario& scenario, const SimConfig& sim,
                                          long* resampled = nullptr, double* window = nullptr);

} // namespace mmcomp

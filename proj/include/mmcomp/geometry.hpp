#pragma once

#include "mmcomp/channel.hpp"

#include <string>
#include <vector>

namespace mmcomp {

// One homogeneous PPP tier.
struct TierConfig {
    double density = 0.0;  // base stations per m^2
    double power = 1.0;    // transmit power, W
    double blockage = 0.0; // per meter; 0 disables blockage

    // Density of a tier whose average cell radius is r meters: (r^2 pi)^-1.
    static double density_from_radius(double r);
    // Inverse of density_from_radius.
    double nominal_radius() const;

    bool operator==(const TierConfig&) const = default;
};

struct PathlossConfig {
    enum class Mode { Uniform, LosNlos };

    Mode mode = Mode::Uniform;
    double alpha_los = 3.0;  // the single exponent in Uniform mode
    double alpha_nlos = 3.0; // ignored in Uniform mode

    static PathlossConfig uniform(double alpha) { return {Mode::Uniform, alpha, alpha}; }
    static PathlossConfig los_nlos(double alpha_los, double alpha_nlos)
    {
        return {Mode::LosNlos, alpha_los, alpha_nlos};
    }

    bool operator==(const PathlossConfig&) const = default;
};

struct NoiseConfig {
    double bandwidth_hz = 1e9;
    double noise_figure_db = 0.0;

    bool operator==(const NoiseConfig&) const = default;
};

struct Scenario {
    std::string id = "scenario";
    std::vector<TierConfig> tiers;
    PathlossConfig pathloss;
    ArrayConfig array;
    NoiseConfig noise;
    FadingModel fading = FadingModel::rayleigh(); // cooperating links; interferers are Rayleigh
    int coop_n = 1;

    // Throws ValidationError describing the first violated invariant.
    void validate() const;

    bool operator==(const Scenario&) const = default;
};

/// Thermal noise power in watts: -174 dBm/Hz + 10 log10(BW) + NF.
double noise_power(const NoiseConfig& cfg);

/// Intensity of the mapped process of normalized pathlosses v = r^alpha / P.
double intensity(double v, const Scenario& scenario);

/// Expected number of mapped points with normalized pathloss in [0, v].
double intensity_measure(double v, const Scenario& scenario);

/// Solves intensity_measure(v) = u for v; u must be > 0.
double inverse_intensity_measure(double u, const Scenario& scenario);

// Ascending normalized pathlosses of the cooperating set.
class OrderedPathloss {
public:
    explicit OrderedPathloss(std::vector<double> values);

    const std::vector<double>& values() const { return values_; }
    std::size_t size() const { return values_.size(); }
    double largest() const { return values_.back(); }
    // Sum of inverse pathlosses, i.e. the mean Rayleigh signal power.
    double inverse_sum() const;
    // (sum_i v_i^{-1/2})^2, the coherent no-fading signal power.
    double coherent_power() const;

private:
    std::vector<double> values_;
};

/// Joint density of the n smallest normalized pathlosses.
double joint_pathloss_pdf(const OrderedPathloss& g, const Scenario& scenario);

struct NetworkPoint {
    double pathloss; // normalized pathloss r^alpha / P
    int tier;
    bool los;
};

struct NetworkRealization {
    std::vector<NetworkPoint> points; // ascending pathloss
    double window_radius = 0.0;
};

/// Unsorted variant of sample_network writing into a reusable buffer.
void sample_network_points(const Scenario& scenario, double window_radius, Rng& rng,
                           std::vector<NetworkPoint>& out);

/// Samples every tier inside a disk of the given radius centred on the user.
NetworkRealization sample_network(const Scenario& scenario, double window_radius, Rng& rng);

} // namespace mmcomp

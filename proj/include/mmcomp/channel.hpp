#pragma once

#include <complex>
#include <random>
#include <vector>

namespace mmcomp {

using Rng = std::mt19937_64;

// Uniform linear array at the base stations.
struct ArrayConfig {
    int n_antennas = 16;
    double spacing = 0.5; // in carrier wavelengths

    // Normalized array length L_t = N_t * spacing.
    double length() const { return n_antennas * spacing; }
    void validate() const;

    bool operator==(const ArrayConfig&) const = default;
};

class FadingModel {
public:
    enum class Kind { Rayleigh, Nakagami, NoFading };

    static FadingModel rayleigh() { return FadingModel(Kind::Rayleigh, 1); }
    static FadingModel nakagami(int m);
    static FadingModel no_fading() { return FadingModel(Kind::NoFading, 1); }

    Kind kind() const { return kind_; }
    // Nakagami shape m; 1 for the other variants.
    int shape() const { return shape_; }

    bool operator==(const FadingModel&) const = default;

private:
    FadingModel(Kind k, int m) : kind_(k), shape_(m) {}
    Kind kind_;
    int shape_;
};

const char* to_string(FadingModel::Kind kind);

/// Beamforming gain of the ULA for a directional-cosine difference y.
/// Removable singularities at y = k/spacing return the unit-magnitude limit.
std::complex<double> array_gain(double y, const ArrayConfig& cfg);

/// |array_gain(y)|^2 without forming the phase.
double array_gain_sq(double y, const ArrayConfig& cfg);

/// Density of cos(phi) - cos(theta) for independent uniform angles.
/// Throws DomainError for |eps| > 2. Diverges (logarithmically) at eps = 0.
double f_upsilon(double eps);

/// Distribution function of cos(phi) - cos(theta); 0 below -2, 1 above 2.
double upsilon_cdf(double eps);

/// Piecewise-constant density of the directional-cosine difference on [-2, 2].
/// Cell values are exact cell masses divided by the cell width.
class UpsilonTable {
public:
    explicit UpsilonTable(int grid_cells);

    int cells() const { return static_cast<int>(mass_.size()); }
    double cell_width() const { return 4.0 / cells(); }
    double cell_lower(int i) const { return -2.0 + i * cell_width(); }
    double cell_center(int i) const { return cell_lower(i) + 0.5 * cell_width(); }
    double mass(int i) const { return mass_[i]; }
    double density(int i) const { return mass_[i] / cell_width(); }
    const std::vector<double>& masses() const { return mass_; }

private:
    std::vector<double> mass_;
};

/// Tabulated density with `grid_cells` cells (>= 16).
UpsilonTable f_upsilon_table(int grid_cells);

/// Process-wide table with the default resolution (512 cells), built once.
const UpsilonTable& default_upsilon_table();

/// Mass of the directional-cosine difference inside the flat-top main lobe
/// [-1/L_t, 1/L_t]; equals 1 when the lobe covers the whole support.
double flat_top_constant(const ArrayConfig& cfg);

double sample_upsilon(Rng& rng);

/// Unit-mean-power small-scale fading coefficient.
std::complex<double> sample_fading(const FadingModel& model, Rng& rng);

} // namespace mmcomp

#pragma once

#include <vector>

#include "chbsim/spectrum.hpp"

namespace chbsim {

struct MaterialSpec {
    double youngs_modulus = 200e9;  // Pa
    double density = 7700.0;        // kg/m^3
    double poisson = 0.3;
};

void validate(const MaterialSpec& mat);

struct StatorGeometry {
    double core_diameter = 0.176;  // D_c, m
    double yoke_thickness = 0.01;  // h_c, m
    double core_length = 0.25;     // m
    int stator_slots = 36;         // s1
    int rotor_slots = 26;          // s2
    int pole_pairs = 2;            // p
    double tooth_height = 0.008;   // m, reported only
    double tooth_width = 0.0087;   // m, reported only
    // Optional mass-addition correction: resonance frequencies are scaled by
    // 1/sqrt(1 + delta). Zero keeps the bare-ring model.
    double mass_addition_delta = 0.0;
};

void validate(const StatorGeometry& geom);

struct HousingGeometry {
    double mean_diameter = 0.21;   // D_f, m
    double wall_thickness = 0.012; // h_f, m
    double length = 0.26;          // L_f, m
    MaterialSpec material;

    double mean_radius() const { return 0.5 * mean_diameter; }
};

void validate(const HousingGeometry& geom);

/// Dimensionless thickness parameter kappa^2 = h_c^2 / (3 D_c^2).
double thickness_parameter(const StatorGeometry& geom);

/// Both dimensionless roots of the ring characteristic quadratic in P^2,
///   (P^2)^2 - (1 + m^2 + k2 m^4) P^2 + k2 m^6 = 0,
/// for circumferential mode m. The lower (flexural) branch is the one that
/// sets the deflection resonance; m = 0 returns P = 1 on the upper branch.
struct CylinderRoots {
    double lower = 0.0;
    double upper = 0.0;
};

CylinderRoots cylinder_root(int m, double kappa_sq);

/// Infinite-cylinder resonance f_m = P_m / (pi D_c) * sqrt(E / (rho (1 - nu^2))),
/// with the optional mass-addition scaling from the geometry.
double stator_resonance(int m, const StatorGeometry& geom, const MaterialSpec& mat);

/// Coefficients of the finite-cylinder characteristic cubic in y = P^2:
///   y^3 - c2 y^2 + c1 y - c0 = 0.
struct HousingCubic {
    double c2 = 0.0;
    double c1 = 0.0;
    double c0 = 0.0;
};

HousingCubic housing_cubic_coefficients(int m, double lambda, double kappa_sq, double poisson);

/// All real roots of y^3 - c2 y^2 + c1 y - c0 = 0, ascending, Newton-polished.
std::vector<double> solve_cubic_real(double c2, double c1, double c0);

struct HousingModeResult {
    std::vector<double> roots;   // P values (sqrt of admissible y), ascending
    double frequency_hz = 0.0;   // from the smallest positive root
    double lambda = 0.0;
    double kappa_sq = 0.0;
};

/// Natural frequency of the casing for circumferential mode m and axial mode n,
/// simply-supported finite cylinder. The smallest positive real root of the
/// characteristic cubic sets the deflection frequency.
HousingModeResult housing_resonances(int m, int n, const HousingGeometry& geom);

/// Tooth (slot) harmonic orders nu = k s1/p +- 1, k = 1..k_max. When s1 is not
/// divisible by p the orders are rational and `integral` is cleared.
struct ToothHarmonics {
    std::vector<double> orders;
    bool integral = true;
};

ToothHarmonics tooth_harmonic_orders(int s1, int p, int k_max);

/// Radial force frequencies from stator harmonics: 2f (2k m1 +- 1), k = 1..k_max.
std::vector<double> stator_force_frequencies(double f, int m1, int k_max);

/// Rotor-current force frequencies: 2f (2k m1 +- 1)(s2/p +- 1), all sign pairs.
std::vector<double> rotor_force_frequencies(double f, int m1, int s2, int p, int k_max);

/// Carrier-interaction force frequencies |+-(n f_c +- n' f) - f| with opposite
/// parity of n and n' (n' = 0 allowed for odd n); deduplicated and sorted.
std::vector<double> carrier_sideband_frequencies(double f_carrier, double f, int n_max,
                                                 int nprime_max);

struct ResonanceMode {
    double frequency_hz = 0.0;
    int m = 0;
    int n = 0;  // 0 for stator ring modes
};

struct RiskEntry {
    double force_frequency = 0.0;
    double nearest_resonance = 0.0;
    int mode_m = 0;
    int mode_n = 0;
    double separation = 0.0;
    int harmonic_order = 0;
    double contribution = 0.0;
};

struct RiskReport {
    std::vector<RiskEntry> entries;
    double score = 0.0;
};

/// Proximity-weighted coincidence of predicted force frequencies with natural
/// frequencies. Each spectral line at or above percent_threshold maps to force
/// frequencies n f +- f; the nearest resonance scores
/// percent^2 * max(0, 1 - separation / window).
RiskReport resonance_risk(const HarmonicTable& table, const std::vector<ResonanceMode>& resonances,
                          double window_hz, double f_fund, double percent_threshold = 0.5);

}  // namespace chbsim

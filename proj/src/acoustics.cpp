#include "chbsim/acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "chbsim/errors.hpp"

namespace chbsim {

void validate(const MaterialSpec& mat) {
    if (!(mat.youngs_modulus > 0.0)) throw config_error("material.E must be > 0");
    if (!(mat.density > 0.0)) throw config_error("material.rho must be > 0");
    if (mat.poisson < 0.0 || mat.poisson >= 0.5)
        throw config_error("material.nu must be in [0, 0.5)");
}

void validate(const StatorGeometry& geom) {
    if (!(geom.core_diameter > 0.0) || !(geom.yoke_thickness > 0.0) ||
        !(geom.core_length > 0.0) || !(geom.tooth_height > 0.0) || !(geom.tooth_width > 0.0))
        throw config_error("stator geometry lengths must be > 0");
    if (geom.stator_slots < 1 || geom.rotor_slots < 1 || geom.pole_pairs < 1)
        throw config_error("stator slots, rotor slots and pole pairs must be >= 1");
    if (geom.mass_addition_delta < 0.0)
        throw config_error("stator.mass_addition_delta must be >= 0");
}

void validate(const HousingGeometry& geom) {
    if (!(geom.mean_diameter > 0.0) || !(geom.wall_thickness > 0.0) || !(geom.length > 0.0))
        throw config_error("housing geometry lengths must be > 0");
    validate(geom.material);
}

double thickness_parameter(const StatorGeometry& geom) {
    const double ratio = geom.yoke_thickness / geom.core_diameter;
    return ratio * ratio / 3.0;
}

CylinderRoots cylinder_root(int m, double kappa_sq) {
    if (m < 0) throw config_error("circumferential mode m must be >= 0");
    if (m == 0) return {1.0, 1.0};
    const double m2 = double(m) * m;
    const double a = 1.0 + m2 + kappa_sq * m2 * m2;
    const double b = kappa_sq * m2 * m2 * m2;
    const double disc = a * a - 4.0 * b;
    if (disc < 0.0) throw numeric_error("ring quadratic has complex roots");
    const double root = std::sqrt(disc);
    return {std::sqrt(0.5 * (a - root)), std::sqrt(0.5 * (a + root))};
}

namespace {

double ring_frequency(double p_root, double diameter, const MaterialSpec& mat) {
    return p_root / (pi * diameter) *
           std::sqrt(mat.youngs_modulus / (mat.density * (1.0 - mat.poisson * mat.poisson)));
}

}  // namespace

double stator_resonance(int m, const StatorGeometry& geom, const MaterialSpec& mat) {
    validate(geom);
    validate(mat);
    const double p = cylinder_root(m, thickness_parameter(geom)).lower;
    const double bare = ring_frequency(p, geom.core_diameter, mat);
    return bare / std::sqrt(1.0 + geom.mass_addition_delta);
}

HousingCubic housing_cubic_coefficients(int m, double lambda, double kappa_sq, double poisson) {
    const double nu = poisson;
    const double m2 = double(m) * m;
    const double l2 = lambda * lambda;
    const double s = m2 + l2;
    HousingCubic c;
    c.c2 = 1.0 + 0.5 * (3.0 - nu) * s + kappa_sq * s * s;
    c.c1 = 0.5 * (1.0 - nu) * ((3.0 + 2.0 * nu) * l2 + m2 + s * s) +
           (3.0 - nu) / (1.0 - nu) * kappa_sq * s * s;
    c.c0 = 0.5 * (1.0 - nu) * ((1.0 - nu * nu) * l2 * l2 + kappa_sq * s * s * s * s);
    return c;
}

std::vector<double> solve_cubic_real(double c2, double c1, double c0) {
    // y^3 - c2 y^2 + c1 y - c0 = 0. Depressed form via y = u + c2/3, then the
    // trigonometric method for three real roots, Cardano otherwise.
    const double shift = c2 / 3.0;
    const double p = c1 - c2 * c2 / 3.0;
    const double q = -c0 + c1 * shift - 2.0 * c2 * c2 * c2 / 27.0;
    // u^3 + p u + q = 0
    const double half_q = 0.5 * q;
    const double third_p = p / 3.0;
    const double disc = half_q * half_q + third_p * third_p * third_p;

    std::vector<double> roots;
    if (disc <= 0.0) {
        // Three real roots (disc == 0 gives repeated ones).
        const double r = std::sqrt(std::max(-third_p, 0.0));
        double cos_arg = r > 0.0 ? -half_q / (r * r * r) : 0.0;
        cos_arg = std::clamp(cos_arg, -1.0, 1.0);
        const double phi = std::acos(cos_arg) / 3.0;
        for (int k = 0; k < 3; ++k)
            roots.push_back(2.0 * r * std::cos(phi - 2.0 * pi * k / 3.0) + shift);
    } else {
        const double s = std::sqrt(disc);
        const double u = std::cbrt(-half_q + s);
        const double v = std::cbrt(-half_q - s);
        roots.push_back(u + v + shift);
    }

    // Newton polish against the monic cubic.
    for (double& y : roots) {
        for (int i = 0; i < 4; ++i) {
            const double f = ((y - c2) * y + c1) * y - c0;
            const double df = (3.0 * y - 2.0 * c2) * y + c1;
            if (df == 0.0) break;
            const double step = f / df;
            y -= step;
            if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(y))) break;
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

HousingModeResult housing_resonances(int m, int n, const HousingGeometry& geom) {
    validate(geom);
    if (m < 0) throw config_error("housing mode m must be >= 0");
    if (n < 1) throw config_error("housing axial mode n must be >= 1");

    HousingModeResult result;
    const double l0 = geom.length * 0.3 / (n + 0.3);
    result.lambda = 0.5 * n * pi * (geom.mean_diameter - geom.wall_thickness) /
                    (geom.length - l0);
    const double hr = geom.wall_thickness / geom.mean_radius();
    result.kappa_sq = hr * hr / 12.0;

    const HousingCubic cubic =
        housing_cubic_coefficients(m, result.lambda, result.kappa_sq, geom.material.poisson);
    const auto ys = solve_cubic_real(cubic.c2, cubic.c1, cubic.c0);
    for (double y : ys)
        if (y >= -1e-15) result.roots.push_back(std::sqrt(std::max(y, 0.0)));
    std::sort(result.roots.begin(), result.roots.end());

    double smallest_positive = 0.0;
    for (double p : result.roots) {
        if (p > 1e-12) {
            smallest_positive = p;
            break;
        }
    }
    if (smallest_positive == 0.0) {
        std::ostringstream msg;
        msg << "no positive real root for housing mode (m=" << m << ", n=" << n
            << "); cubic coefficients c2=" << cubic.c2 << " c1=" << cubic.c1
            << " c0=" << cubic.c0;
        throw numeric_error(msg.str());
    }
    result.frequency_hz = ring_frequency(smallest_positive, geom.mean_diameter, geom.material);
    return result;
}

ToothHarmonics tooth_harmonic_orders(int s1, int p, int k_max) {
    if (s1 < 1 || p < 1) throw config_error("s1 and p must be >= 1");
    if (k_max < 1) throw config_error("k_max must be >= 1");
    ToothHarmonics result;
    result.integral = s1 % p == 0;
    for (int k = 1; k <= k_max; ++k) {
        const double base = double(k) * s1 / p;
        result.orders.push_back(base - 1.0);
        result.orders.push_back(base + 1.0);
    }
    return result;
}

std::vector<double> stator_force_frequencies(double f, int m1, int k_max) {
    std::set<double> out;
    for (int k = 1; k <= k_max; ++k) {
        out.insert(2.0 * f * (2.0 * k * m1 - 1.0));
        out.insert(2.0 * f * (2.0 * k * m1 + 1.0));
    }
    return {out.begin(), out.end()};
}

std::vector<double> rotor_force_frequencies(double f, int m1, int s2, int p, int k_max) {
    const double slot_ratio = double(s2) / p;
    std::set<double> out;
    for (int k = 1; k <= k_max; ++k) {
        for (double a : {2.0 * k * m1 - 1.0, 2.0 * k * m1 + 1.0})
            for (double b : {slot_ratio - 1.0, slot_ratio + 1.0}) out.insert(2.0 * f * a * b);
    }
    return {out.begin(), out.end()};
}

std::vector<double> carrier_sideband_frequencies(double f_carrier, double f, int n_max,
                                                 int nprime_max) {
    if (!(f_carrier > 0.0) || !(f > 0.0)) throw config_error("f_carrier and f must be > 0");
    std::set<double> out;
    for (int n = 1; n <= n_max; ++n) {
        for (int np = (n % 2 == 0) ? 1 : 0; np <= nprime_max; np += 2) {
            for (int s_outer : {+1, -1}) {
                for (int s_inner : {+1, -1}) {
                    const double value =
                        std::abs(s_outer * (n * f_carrier + s_inner * np * f) - f);
                    out.insert(value);
                }
            }
        }
    }
    return {out.begin(), out.end()};
}

RiskReport resonance_risk(const HarmonicTable& table, const std::vector<ResonanceMode>& resonances,
                          double window_hz, double f_fund, double percent_threshold) {
    if (!(window_hz > 0.0)) throw config_error("risk window must be > 0");
    RiskReport report;
    if (resonances.empty()) return report;

    for (const auto& line : table.entries) {
        if (line.percent < percent_threshold) continue;
        const double electrical = line.order * f_fund;
        // A line at n f excites radial force waves at n f +- f.
        for (double force : {electrical - f_fund, electrical + f_fund}) {
            const ResonanceMode* nearest = nullptr;
            double best = 0.0;
            for (const auto& mode : resonances) {
                const double sep = std::abs(force - mode.frequency_hz);
                if (!nearest || sep < best) {
                    nearest = &mode;
                    best = sep;
                }
            }
            RiskEntry entry;
            entry.force_frequency = force;
            entry.nearest_resonance = nearest->frequency_hz;
            entry.mode_m = nearest->m;
            entry.mode_n = nearest->n;
            entry.separation = best;
            entry.harmonic_order = line.order;
            entry.contribution =
                line.percent * line.percent * std::max(0.0, 1.0 - best / window_hz);
            report.entries.push_back(entry);
            report.score += entry.contribution;
        }
    }
    std::sort(report.entries.begin(), report.entries.end(),
              [](const RiskEntry& a, const RiskEntry& b) {
                  if (a.contribution != b.contribution) return a.contribution > b.contribution;
                  if (a.force_frequency != b.force_frequency)
                      return a.force_frequency < b.force_frequency;
                  return a.harmonic_order < b.harmonic_order;
              });
    return report;
}

}  // namespace chbsim

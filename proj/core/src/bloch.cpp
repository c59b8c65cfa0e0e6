#include "dhc/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "dhc/csv.hpp"
#include "dhc/error.hpp"
#include "dhc/linalg.hpp"

namespace dhc::bloch {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = std::numbers::sqrt3;
constexpr double kApothem = 2.0 * kPi / 3.0;  // Γ to M
constexpr cd kI{0.0, 1.0};
constexpr int kRaySamples = 256;

cd principal(cd z) {
    // value with Re ≥ 0, or Im ≥ 0 on the imaginary axis
    cd s = std::sqrt(z);
    if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0)) s = -s;
    return s;
}

double level(double J, double gamma, double r, double theta) {
    return std::abs(J) * std::abs(structure_factor(r * std::cos(theta), r * std::sin(theta))) - 4.0 * gamma;
}

}  // namespace

cd structure_factor(double kx, double ky) {
    return std::exp(-kI * kx) * (1.0 + 2.0 * std::exp(1.5 * kI * kx) * std::cos(0.5 * kSqrt3 * ky));
}

BlochMatrix bloch_h(double kx, double ky, double J, double gamma) {
    const cd d = structure_factor(kx, ky);
    const cd hop = kI * J * d;
    const cd hop_c = kI * J * std::conj(d);
    const double g4 = 4.0 * gamma;
    BlochMatrix h;
    h.kx = kx;
    h.ky = ky;
    h.J = J;
    h.gamma = gamma;
    h.entries << 0.0, hop, g4, 0.0,
                 -hop_c, 0.0, 0.0, g4,
                 -g4, 0.0, 0.0, -hop,
                 0.0, -g4, hop_c, 0.0;
    h.entries *= 0.5;
    return h;
}

BandPair bands(double kx, double ky, double J, double gamma) {
    const double d = std::abs(structure_factor(kx, ky));
    const cd e = 0.5 * principal(cd{J * J * d * d - 16.0 * gamma * gamma, 0.0});
    return {e, -e, 2};
}

double zone_radius(double theta) {
    double phi = std::fmod(theta, kPi / 3.0);
    if (phi < 0.0) phi += kPi / 3.0;
    return kApothem / std::cos(std::min(phi, kPi / 3.0 - phi));
}

bool in_first_zone(double kx, double ky) {
    const double slack = 1e-12;
    for (int m = 0; m < 3; ++m) {
        const double a = m * kPi / 3.0;
        if (std::abs(kx * std::cos(a) + ky * std::sin(a)) > kApothem + slack) return false;
    }
    return true;
}

EPRing ep_locus(double J, double gamma, int resolution) {
    if (resolution < 3) throw ConfigError("ep_locus needs at least 3 rays");
    if (!(gamma > 0.0) || !std::isfinite(gamma) || !std::isfinite(J))
        throw NumericalError("exceptional ring is empty for gamma <= 0");
    if (4.0 * gamma >= 3.0 * std::abs(J))
        throw NumericalError("exceptional ring is empty: 4*gamma >= 3|J| breaks every momentum");
    if (4.0 * gamma <= std::abs(J))
        throw NumericalError("exceptional locus does not enclose Gamma for 4*gamma <= |J|");

    EPRing ring;
    ring.J = J;
    ring.gamma = gamma;
    ring.points.reserve(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i) {
        const double theta = 2.0 * kPi * i / resolution;
        const double rmax = zone_radius(theta);
        // one sign change from + (at Γ) to − (at the zone edge) along the ray
        int changes = 0;
        double lo = 0.0, hi = 0.0;
        double prev = level(J, gamma, 0.0, theta);
        for (int s = 1; s <= kRaySamples; ++s) {
            const double r = rmax * s / kRaySamples;
            const double f = level(J, gamma, r, theta);
            if ((f < 0.0) != (prev < 0.0)) {
                if (++changes == 1) {
                    lo = rmax * (s - 1) / kRaySamples;
                    hi = r;
                }
            }
            prev = f;
        }
        if (changes != 1)
            throw NumericalError("exceptional locus is not star-shaped around Gamma at theta=" + format_double(theta));
        for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (level(J, gamma, mid, theta) > 0.0)
                lo = mid;
            else
                hi = mid;
        }
        const double r = 0.5 * (lo + hi);
        RingPoint p;
        p.theta = theta;
        p.kx = r * std::cos(theta);
        p.ky = r * std::sin(theta);
        p.residual = std::abs(level(J, gamma, r, theta));
        const auto h = bloch_h(p.kx, p.ky, J, gamma);
        const auto dec = linalg::eig(Eigen::MatrixXcd(h.entries), true);
        p.sigma_min = linalg::min_singular_value_normalized(dec.vectors);
        ring.points.push_back(p);
    }
    return ring;
}

double ring_radius(const EPRing& ring, double theta) {
    const auto n = ring.points.size();
    if (n == 0) throw ConfigError("ring_radius: empty ring");
    double t = std::fmod(theta, 2.0 * kPi);
    if (t < 0.0) t += 2.0 * kPi;
    const double step = 2.0 * kPi / static_cast<double>(n);
    const auto i = static_cast<std::size_t>(t / step) % n;
    const auto j = (i + 1) % n;
    const double w = (t - static_cast<double>(i) * step) / step;
    auto radius = [&](std::size_t k) { return std::hypot(ring.points[k].kx, ring.points[k].ky); };
    return (1.0 - w) * radius(i) + w * radius(j);
}

int winding_number(const EPRing& ring, double kx, double ky) {
    double total = 0.0;
    const auto n = ring.points.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = ring.points[i];
        const auto& b = ring.points[(i + 1) % n];
        const double a1 = std::atan2(a.ky - ky, a.kx - kx);
        const double a2 = std::atan2(b.ky - ky, b.kx - kx);
        double d = a2 - a1;
        while (d > kPi) d -= 2.0 * kPi;
        while (d < -kPi) d += 2.0 * kPi;
        total += d;
    }
    return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

BrokenCount broken_count(const LatticeSpec& spec, double J, double gamma) {
    const auto grid = momentum_grid(spec);
    BrokenCount c;
    c.total = 4 * grid.points.size();
    for (const auto& k : grid.points)
        if (std::abs(J) * std::abs(structure_factor(k.kx, k.ky)) < 4.0 * gamma) c.broken += 4;
    return c;
}

double broken_fraction(const LatticeSpec& spec, double J, double gamma) {
    return broken_count(spec, J, gamma).fraction();
}

std::size_t zero_mode_count(const LatticeSpec& spec, double tol) {
    std::size_t n = 0;
    for (const auto& k : momentum_grid(spec).points)
        if (std::abs(structure_factor(k.kx, k.ky)) <= tol) n += 4;
    return n;
}

MeshThresholds mesh_thresholds(const LatticeSpec& spec, double J) {
    MeshThresholds t;
    double dmin = 0.0, dmax = 0.0;
    bool any = false;
    for (const auto& k : momentum_grid(spec).points) {
        const double d = std::abs(structure_factor(k.kx, k.ky));
        dmax = std::max(dmax, d);
        if (d <= 1e-12) continue;
        dmin = any ? std::min(dmin, d) : d;
        any = true;
    }
    if (any) t.gamma_pt = std::abs(J) * dmin / 4.0;
    t.gamma_star = std::abs(J) * dmax / 4.0;
    return t;
}

ThresholdScan scan_thresholds(const LatticeSpec& spec, double J, std::span<const double> grid,
                              const ThresholdOptions& options) {
    const std::size_t baseline = zero_mode_count(spec);
    return scan_thresholds(grid, [&](double g) { return broken_count(spec, J, g); }, baseline, options);
}

GammaModeDynamics gamma_mode_dynamics(double J, double gamma, std::span<const double> t_grid, std::size_t num_sites,
                                      Envelope envelope) {
    GammaModeDynamics d;
    d.envelope = envelope;
    d.c_L_per_site = 2.0 * gamma;
    d.c_L_total = 2.0 * gamma * static_cast<double>(num_sites);
    const double c = envelope == Envelope::per_site ? d.c_L_per_site : d.c_L_total;
    const double disc = 9.0 * J * J - 16.0 * gamma * gamma;
    d.at_ep = std::abs(disc) <= 1e-12 * std::max(9.0 * J * J, 1.0);
    if (!d.at_ep) {
        d.oscillating = disc > 0.0;
        if (d.oscillating)
            d.frequency = std::sqrt(disc);
        else
            d.decay_rate = std::sqrt(-disc);
    }
    d.samples.reserve(t_grid.size());
    for (double t : t_grid) {
        if (!(t >= 0.0)) throw ConfigError("gamma_mode_dynamics needs t >= 0");
        double factor = 1.0;
        if (d.oscillating)
            factor = std::cos(d.frequency * t);
        else if (!d.at_ep)
            factor = std::exp(-d.decay_rate * t);
        d.samples.push_back({t, std::exp(-c * t) * factor});
    }
    return d;
}

std::vector<ScanRow> bz_scan(int resolution, double J, double gamma) {
    if (resolution < 2) throw ConfigError("bz_scan needs resolution >= 2");
    const double xmax = kApothem;
    const double ymax = 4.0 * kPi / (3.0 * kSqrt3);
    std::vector<ScanRow> rows;
    for (int iy = 0; iy < resolution; ++iy) {
        const double ky = -ymax + 2.0 * ymax * iy / (resolution - 1);
        for (int ix = 0; ix < resolution; ++ix) {
            const double kx = -xmax + 2.0 * xmax * ix / (resolution - 1);
            if (!in_first_zone(kx, ky)) continue;
            const auto b = bands(kx, ky, J, gamma);
            const bool broken = std::abs(J) * std::abs(structure_factor(kx, ky)) < 4.0 * gamma;
            rows.push_back({kx, ky, b.E_plus - b.E_minus, broken});
        }
    }
    return rows;
}

void write_scan_csv(std::ostream& os, std::span<const ScanRow> rows) {
    os << "kx,ky,re_gap,im_gap,is_broken\n";
    for (const auto& r : rows)
        os << format_double(r.kx) << ',' << format_double(r.ky) << ',' << format_double(r.gap.real()) << ','
           << format_double(r.gap.imag()) << ',' << (r.broken ? 1 : 0) << '\n';
}

void write_ring_csv(std::ostream& os, const EPRing& ring) {
    os << "theta,kx,ky,residual\n";
    for (const auto& p : ring.points)
        os << format_double(p.theta) << ',' << format_double(p.kx) << ',' << format_double(p.ky) << ','
           << format_double(p.residual) << '\n';
}

}  // namespace dhc::bloch

// bloch.hpp — translation-invariant sector: h(k), bands, exceptional ring, mesh statistics

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dhc/lattice.hpp"
#include "dhc/thresholds.hpp"

namespace dhc::bloch {

using cd = std::complex<double>;

/// Δ(k) = e^{−ikx}[1 + 2 e^{3ikx/2} cos(√3 ky/2)], the sum of e^{ik·δ} over the three A→B vectors.
cd structure_factor(double kx, double ky);

/// Basis (a, b, ã, b̃).
struct BlochMatrix {
    double kx = 0.0;
    double ky = 0.0;
    Eigen::Matrix4cd entries;
    double J = 0.0;
    double gamma = 0.0;
};

BlochMatrix bloch_h(double kx, double ky, double J, double gamma);

/// Each band is doubly degenerate. E_plus has non-negative real part, or
/// non-negative imaginary part when purely imaginary.
struct BandPair {
    cd E_plus;
    cd E_minus;
    int degeneracy = 2;
};

BandPair bands(double kx, double ky, double J, double gamma);

struct RingPoint {
    double theta = 0.0;
    double kx = 0.0;
    double ky = 0.0;
    double residual = 0.0;   // |J|Δ(k)| − 4γ|
    double sigma_min = 0.0;  // smallest singular value of the normalized eigenvectors of h(k)
};

struct EPRing {
    std::vector<RingPoint> points;  // ordered by theta in [0, 2π)
    double J = 0.0;
    double gamma = 0.0;
};

/// Polar root finding of J|Δ(k)| = 4γ along `resolution` rays from Γ, each
/// bounded by the first Brillouin zone. Requires J/4 < γ < 3J/4 (|J| in place
/// of J): below that the level set breaks into pockets around the zone
/// corners and no longer encloses Γ. Throws NumericalError for an empty or
/// non-star-shaped locus.
EPRing ep_locus(double J, double gamma, int resolution = 720);

/// Distance from Γ to the hexagonal zone boundary along direction theta.
double zone_radius(double theta);
bool in_first_zone(double kx, double ky);

/// Radius of the ring along theta, linearly interpolated between rays.
double ring_radius(const EPRing& ring, double theta);
/// Winding number of the ring polygon around (kx, ky).
int winding_number(const EPRing& ring, double kx, double ky);

/// Mode counts over the lattice mesh; every momentum carries four modes.
/// A momentum is broken when J|Δ(k)| < 4γ strictly.
BrokenCount broken_count(const LatticeSpec& spec, double J, double gamma);
double broken_fraction(const LatticeSpec& spec, double J, double gamma);

/// Modes sitting at Δ(k) = 0 (four per Dirac momentum on the mesh).
std::size_t zero_mode_count(const LatticeSpec& spec, double tol = 1e-12);

/// Closed-form thresholds on a mesh: γ_PT = (J/4)·min_{Δ≠0}|Δ|, γ* = (J/4)·max|Δ|.
struct MeshThresholds {
    std::optional<double> gamma_pt;  // empty when every mesh point has Δ = 0
    double gamma_star = 0.0;
};
MeshThresholds mesh_thresholds(const LatticeSpec& spec, double J);

/// γ scan using momentum-space counts, with the Dirac modes as baseline.
ThresholdScan scan_thresholds(const LatticeSpec& spec, double J, std::span<const double> grid,
                              const ThresholdOptions& options = {});

enum class Envelope { per_site, total };

struct GammaModeSample {
    double t = 0.0;
    double M = 0.0;
};

struct GammaModeDynamics {
    std::vector<GammaModeSample> samples;
    bool oscillating = false;  // γ < 3|J|/4
    bool at_ep = false;        // γ = 3|J|/4 within 1e-12; envelope only
    double frequency = 0.0;    // √(9J² − 16γ²) when oscillating
    double decay_rate = 0.0;   // √(16γ² − 9J²) when decaying
    double c_L_per_site = 0.0;
    double c_L_total = 0.0;
    Envelope envelope = Envelope::per_site;
};

/// Functional form of the uniform-mode magnetization: e^{−c_L t} times the Γ-point factor.
/// Amplitude and phase are not modeled.
GammaModeDynamics gamma_mode_dynamics(double J, double gamma, std::span<const double> t_grid,
                                      std::size_t num_sites = 1, Envelope envelope = Envelope::per_site);

struct ScanRow {
    double kx = 0.0;
    double ky = 0.0;
    cd gap;  // E_plus − E_minus
    bool broken = false;
};

/// Square grid of resolution × resolution over the bounding box of the zone, clipped to the zone.
std::vector<ScanRow> bz_scan(int resolution, double J, double gamma);

/// kx,ky,re_gap,im_gap,is_broken
void write_scan_csv(std::ostream& os, std::span<const ScanRow> rows);
/// theta,kx,ky,residual
void write_ring_csv(std::ostream& os, const EPRing& ring);

}  // namespace dhc::bloch

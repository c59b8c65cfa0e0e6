#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "dhc/bloch.hpp"
#include "dhc/error.hpp"
#include "dhc/linalg.hpp"
#include "dhc/quadratic.hpp"
#include "support.hpp"

using namespace dhc;
using namespace dhc::bloch;
using test::multiset_distance;

namespace {

constexpr double kPi = std::numbers::pi;
const double kS3 = std::sqrt(3.0);

// Plane-wave projection of the real-space generator onto (a, b, ã, b̃) at momentum k.
Eigen::Matrix4cd project_to_momentum(const Lattice& lat, const Eigen::MatrixXcd& M, double kx, double ky) {
    const auto N = static_cast<Eigen::Index>(lat.num_sites());
    const double norm = 1.0 / std::sqrt(static_cast<double>(lat.num_cells()));
    Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(2 * N, 4);
    for (Eigen::Index s = 0; s < N; ++s) {
        const Vec2 r = lat.position(static_cast<std::size_t>(s));
        const cd phase = norm * std::exp(cd(0, kx * r.x + ky * r.y));
        const int sub = static_cast<int>(s % 2);
        psi(s, sub) = phase;
        psi(N + s, 2 + sub) = phase;
    }
    return psi.adjoint() * M * psi;
}

}  // namespace

TEST(Bloch, StructureFactorValues) {
    EXPECT_NEAR(std::abs(structure_factor(0, 0) - 3.0), 0.0, 1e-15);
    // zone corner K
    EXPECT_NEAR(std::abs(structure_factor(2 * kPi / 3, 2 * kPi / (3 * kS3))), 0.0, 1e-14);
    // M point: |Δ| = 1
    EXPECT_NEAR(std::abs(structure_factor(2 * kPi / 3, 0)), 1.0, 1e-14);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> k(-5, 5);
    for (int i = 0; i < 1000; ++i) {
        const double kx = k(rng), ky = k(rng);
        const cd d = structure_factor(kx, ky);
        EXPECT_LE(std::abs(d), 3.0 + 1e-12);
        const cd direct = std::exp(cd(0, -kx)) + std::exp(cd(0, kx / 2 + kS3 * ky / 2)) +
                          std::exp(cd(0, kx / 2 - kS3 * ky / 2));
        EXPECT_NEAR(std::abs(d - direct), 0.0, 1e-12);
        // periodic in the reciprocal lattice
        const Vec2 b1 = reciprocal_vector_b1();
        EXPECT_NEAR(std::abs(std::abs(d) - std::abs(structure_factor(kx + b1.x, ky + b1.y))), 0.0, 1e-12);
    }
}

TEST(Bloch, MatrixAtGamma) {
    const double J = 1.0, gamma = 0.4;
    BlochMatrix h = bloch_h(0, 0, J, gamma);
    Eigen::Matrix4cd want;
    const cd i3(0, 1.5);
    want << 0, i3, 2 * gamma, 0,
            -i3, 0, 0, 2 * gamma,
            -2 * gamma, 0, 0, -i3,
            0, -2 * gamma, i3, 0;
    EXPECT_LT((h.entries - want).norm(), 1e-15);
}

TEST(Bloch, HermitianWithoutDissipation) {
    std::mt19937 rng(2);
    std::uniform_real_distribution<double> k(-3, 3);
    for (int i = 0; i < 50; ++i) {
        BlochMatrix h = bloch_h(k(rng), k(rng), 1.0, 0.0);
        EXPECT_LT((h.entries - h.entries.adjoint()).norm(), 1e-15);
        BlochMatrix d = bloch_h(k(rng), k(rng), 0.0, 0.7);
        EXPECT_LT((d.entries + d.entries.adjoint()).norm(), 1e-15);
    }
}

TEST(Bloch, MatchesProjectedRealSpaceGenerator) {
    Lattice lat({4, 4, Boundary::periodic});
    SingleParticleMatrix m = build_matrix(lat, GaugeConfig::uniform(lat), 1.2, 0.33);
    for (const Momentum& k : momentum_grid(lat.spec()).points) {
        const Eigen::Matrix4cd projected = project_to_momentum(lat, m.entries, k.kx, k.ky);
        EXPECT_LT((projected - bloch_h(k.kx, k.ky, 1.2, 0.33).entries).norm(), 1e-12);
    }
}

TEST(Bloch, BandsMatchNumericalDiagonalization) {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> k(-kPi, kPi), g(0.0, 1.2);
    for (int i = 0; i < 10000; ++i) {
        const double kx = k(rng), ky = k(rng), gamma = g(rng);
        const BandPair b = bands(kx, ky, 1.0, gamma);
        EXPECT_EQ(b.degeneracy, 2);
        const double d = std::abs(structure_factor(kx, ky));
        const double disc = d * d - 16 * gamma * gamma;
        if (std::abs(disc) < 1e-6) continue;  // defective: numerical eigenvalues split by √ε
        const auto dec = linalg::eig(Eigen::MatrixXcd(bloch_h(kx, ky, 1.0, gamma).entries), false);
        const std::vector<cd> want{b.E_plus, b.E_plus, b.E_minus, b.E_minus};
        ASSERT_LT(multiset_distance(test::to_vector(dec.values), want), 1e-10) << kx << " " << ky << " " << gamma;
        if (disc > 0) {
            EXPECT_GT(b.E_plus.real(), 0.0);
        } else {
            EXPECT_NEAR(b.E_plus.real(), 0.0, 1e-15);
            EXPECT_GT(b.E_plus.imag(), 0.0);
        }
    }
}

TEST(Bloch, RealSpaceEqualsBandUnion) {
    for (int L : {4, 8}) {
        const LatticeSpec spec{L, L, Boundary::periodic};
        Lattice lat(spec);
        SpectrumResult s = eigendecompose(build_matrix(lat, GaugeConfig::uniform(lat), 1.0, 0.4));
        std::vector<cd> union_bands;
        for (const Momentum& k : momentum_grid(spec).points) {
            const BandPair b = bands(k.kx, k.ky, 1.0, 0.4);
            union_bands.insert(union_bands.end(), {b.E_plus, b.E_plus, b.E_minus, b.E_minus});
        }
        EXPECT_LT(multiset_distance(s.eigenvalues, union_bands), 1e-8);
        const BrokenCount mom = broken_count(spec, 1.0, 0.4);
        EXPECT_EQ(classify_pt(s).counts.broken, mom.broken);
    }
}

TEST(Bloch, RingPreconditions) {
    EXPECT_THROW(ep_locus(1.0, 0.0), NumericalError);
    EXPECT_THROW(ep_locus(1.0, 0.75), NumericalError);
    EXPECT_THROW(ep_locus(1.0, 0.9), NumericalError);
    EXPECT_THROW(ep_locus(1.0, 0.2), NumericalError);
    EXPECT_THROW(ep_locus(1.0, 0.4, 2), ConfigError);
    EXPECT_NO_THROW(ep_locus(-1.0, 0.4, 36));
}

TEST(Bloch, RingSolvesLevelSetAndCoalesces) {
    EPRing ring = ep_locus(1.0, 0.4, 360);
    ASSERT_EQ(ring.points.size(), 360u);
    for (std::size_t i = 0; i < ring.points.size(); ++i) {
        const RingPoint& p = ring.points[i];
        EXPECT_NEAR(std::abs(structure_factor(p.kx, p.ky)), 1.6, 1e-12);
        EXPECT_LT(p.residual, 1e-12);
        EXPECT_LT(p.sigma_min, 1e-6);
        const BandPair b = bands(p.kx, p.ky, 1.0, 0.4);
        EXPECT_LT(std::abs(b.E_plus - b.E_minus), 1e-6);
        EXPECT_TRUE(in_first_zone(p.kx, p.ky));
        if (i > 0) {
            EXPECT_GT(p.theta, ring.points[i - 1].theta);
        }
    }
    EXPECT_EQ(winding_number(ring, 0, 0), 1);
    EXPECT_EQ(winding_number(ring, 2 * kPi / 3, 2 * kPi / (3 * kS3)), 0);
}

TEST(Bloch, InteriorRealExteriorImaginary) {
    const double J = 1.0, gamma = 0.4;
    EPRing ring = ep_locus(J, gamma);
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> angle(0, 2 * kPi), frac(0.02, 0.98);
    for (int i = 0; i < 200; ++i) {
        const double th = angle(rng);
        const double r_ring = ring_radius(ring, th);
        const double r_zone = zone_radius(th);
        ASSERT_LT(r_ring, r_zone);
        const double r_in = frac(rng) * r_ring;
        const double r_out = r_ring + frac(rng) * (r_zone - r_ring);
        const BandPair in = bands(r_in * std::cos(th), r_in * std::sin(th), J, gamma);
        const BandPair out = bands(r_out * std::cos(th), r_out * std::sin(th), J, gamma);
        EXPECT_EQ((in.E_plus - in.E_minus).imag(), 0.0);
        EXPECT_GT((in.E_plus - in.E_minus).real(), 0.0);
        EXPECT_EQ((out.E_plus - out.E_minus).real(), 0.0);
        EXPECT_GT((out.E_plus - out.E_minus).imag(), 0.0);
    }
}

TEST(Bloch, RingShrinksTowardGammaNearCollapse) {
    const double r1 = ring_radius(ep_locus(1.0, 0.5), 0.3);
    const double r2 = ring_radius(ep_locus(1.0, 0.7), 0.3);
    const double r3 = ring_radius(ep_locus(1.0, 0.749), 0.3);
    EXPECT_GT(r1, r2);
    EXPECT_GT(r2, r3);
    EXPECT_LT(r3, 0.1);
}

TEST(Bloch, ZoneGeometry) {
    EXPECT_NEAR(zone_radius(0.0), 2 * kPi / 3, 1e-14);
    EXPECT_NEAR(zone_radius(kPi / 6), 4 * kPi / (3 * kS3), 1e-12);
    EXPECT_TRUE(in_first_zone(0, 0));
    EXPECT_FALSE(in_first_zone(2.2, 0));
    EXPECT_TRUE(in_first_zone(2.0, 0));
}

TEST(Bloch, BrokenFractionIsMonotone) {
    const LatticeSpec spec{12, 12, Boundary::periodic};
    double last = 0.0;
    for (double g = 0.0; g <= 1.0; g += 0.01) {
        const double f = broken_fraction(spec, 1.0, g);
        EXPECT_GE(f, last);
        last = f;
    }
    EXPECT_EQ(broken_fraction(spec, 1.0, 0.8), 1.0);
    // 12 is divisible by 3: the Dirac modes are counted as broken for γ > 0
    EXPECT_EQ(zero_mode_count(spec), 8u);
    EXPECT_EQ(broken_count(spec, 1.0, 1e-6).broken, 8u);
}

TEST(Bloch, MeshThresholdsAgreeWithScan) {
    for (int L : {5, 8, 9}) {
        const LatticeSpec spec{L, L, Boundary::periodic};
        const MeshThresholds exact = mesh_thresholds(spec, 1.0);
        ThresholdScan s = scan_thresholds(spec, 1.0, make_grid(0.0, 1.0, 0.01), ThresholdOptions{1e-7, 1});
        ASSERT_TRUE(exact.gamma_pt && s.gamma_pt && s.gamma_star);
        EXPECT_NEAR(*s.gamma_pt, *exact.gamma_pt, 2e-7);
        EXPECT_NEAR(*s.gamma_star, exact.gamma_star, 2e-7);
        EXPECT_NEAR(exact.gamma_star, 0.75, 1e-12);
    }
    // L=8 closed form: the smallest nonzero |Δ| on the mesh
    EXPECT_NEAR(*mesh_thresholds({8, 8, Boundary::periodic}, 1.0).gamma_pt, 0.10355339059327377, 1e-12);
}

TEST(Bloch, GammaModeDynamics) {
    const std::vector<double> t{0.0, 0.5, 1.0, 2.0};
    GammaModeDynamics below = gamma_mode_dynamics(1.0, 0.5, t);
    EXPECT_TRUE(below.oscillating);
    EXPECT_NEAR(below.frequency, std::sqrt(5.0), 1e-14);
    EXPECT_NEAR(below.c_L_per_site, 1.0, 1e-15);
    EXPECT_NEAR(below.samples[2].M, std::exp(-1.0) * std::cos(std::sqrt(5.0)), 1e-14);

    GammaModeDynamics above = gamma_mode_dynamics(1.0, 1.0, t, 8, Envelope::total);
    EXPECT_FALSE(above.oscillating);
    EXPECT_NEAR(above.decay_rate, std::sqrt(7.0), 1e-14);
    EXPECT_NEAR(above.c_L_total, 16.0, 1e-14);
    EXPECT_NEAR(above.samples[1].M, std::exp(-8.0) * std::exp(-0.5 * std::sqrt(7.0)), 1e-16);

    GammaModeDynamics clean = gamma_mode_dynamics(1.0, 0.0, t);
    EXPECT_NEAR(clean.frequency, 3.0, 1e-15);

    GammaModeDynamics ep = gamma_mode_dynamics(1.0, 0.75, t);
    EXPECT_TRUE(ep.at_ep);
    EXPECT_EQ(ep.frequency, 0.0);
    EXPECT_EQ(ep.decay_rate, 0.0);

    const std::vector<double> bad{-1.0};
    EXPECT_THROW(gamma_mode_dynamics(1.0, 0.5, bad), ConfigError);
}

TEST(Bloch, GammaPointCrossover) {
    // eigenvalues of h(Γ) real below 3J/4 and imaginary above
    for (auto [gamma, real] : {std::pair{0.5, true}, std::pair{1.0, false}}) {
        const auto dec = linalg::eig(Eigen::MatrixXcd(bloch_h(0, 0, 1.0, gamma).entries), false);
        for (Eigen::Index i = 0; i < 4; ++i) {
            if (real)
                EXPECT_NEAR(dec.values(i).imag(), 0.0, 1e-12);
            else
                EXPECT_NEAR(dec.values(i).real(), 0.0, 1e-12);
        }
    }
}

TEST(Bloch, ScanAndRingCsv) {
    auto rows = bz_scan(41, 1.0, 0.4);
    ASSERT_FALSE(rows.empty());
    for (const ScanRow& r : rows) {
        EXPECT_TRUE(in_first_zone(r.kx, r.ky));
        EXPECT_EQ(r.broken, r.gap.imag() > 0);
    }
    std::ostringstream os;
    write_scan_csv(os, rows);
    const std::string text = os.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "kx,ky,re_gap,im_gap,is_broken");
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), rows.size() + 1);
    std::ostringstream ring;
    write_ring_csv(ring, ep_locus(1.0, 0.4, 12));
    EXPECT_EQ(ring.str().substr(0, ring.str().find('\n')), "theta,kx,ky,residual");
    EXPECT_THROW(bz_scan(1, 1.0, 0.4), ConfigError);
}

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dhc/bloch.hpp"
#include "dhc/gauge.hpp"
#include "dhc/linalg.hpp"
#include "dhc/oracle.hpp"
#include "dhc/quadratic.hpp"
#include "support.hpp"

using namespace dhc;
using test::cd;
using test::multiset_distance;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

Outcome single_site() {
    std::ostringstream d;
    bool ok = true;
    for (double gamma : {0.1, 1.0, 10.0}) {
        std::vector<cd> want;
        for (int copy = 0; copy < 4; ++copy)
            want.insert(want.end(), {cd(0), cd(-2 * gamma), cd(-2 * gamma), cd(-4 * gamma)});
        const double res = multiset_distance(oracle::single_site_spectrum(gamma), want);
        const auto site = oracle::OracleSystem::single_site();
        const auto ss = oracle::steady_states(
            oracle::vectorize(oracle::build_hamiltonian(site, 1.0), oracle::jump_operators(site, gamma)));
        ok = ok && res <= 1e-12 && ss.kernel_dim == 4 && !ss.ambiguous;
        d << "gamma=" << gamma << " residual=" << fmt("%.1e", res) << " kernel=" << ss.kernel_dim << "; ";
    }
    return {ok, d.str()};
}

Outcome vectorization() {
    std::ostringstream d;
    bool ok = true;
    const auto bond = oracle::OracleSystem::single_bond();
    for (double gamma : {0.0, 0.4, 1.0}) {
        const auto L = oracle::vectorize(oracle::build_hamiltonian(bond, 1.0), oracle::jump_operators(bond, gamma));
        std::vector<cd> from_L = oracle::eigenvalues(L.entries);
        std::vector<cd> from_H = oracle::eigenvalues(oracle::bilayer_hamiltonian(bond, 1.0, gamma));
        for (cd& e : from_H) e *= cd(0, -1);  // H = iL
        const double dist = multiset_distance(from_L, from_H);
        ok = ok && dist <= 1e-10 && from_L.size() == 256;
        d << "gamma=" << gamma << " max_dev=" << fmt("%.1e", dist) << "; ";
    }
    return {ok, d.str()};
}

Outcome fermionization() {
    std::ostringstream d;
    bool ok = true;
    for (double gamma : {0.4, 0.0}) {
        const auto r = oracle::sector_crosscheck(1.0, gamma, 1e-8);
        ok = ok && r.pass && r.many_body.size() == 256;
        d << "(1," << gamma << ") mismatch=" << fmt("%.1e", r.max_mismatch) << "; ";
    }
    return {ok, d.str()};
}

Outcome bloch_equivalence() {
    std::ostringstream d;
    bool ok = true;
    for (int L : {4, 8, 12}) {
        const LatticeSpec spec{L, L, Boundary::periodic};
        const Lattice lat(spec);
        const auto s = eigendecompose(build_matrix(lat, GaugeConfig::uniform(lat), 1.0, 0.4));
        std::vector<cd> bands;
        for (const Momentum& k : momentum_grid(spec).points) {
            const auto b = bloch::bands(k.kx, k.ky, 1.0, 0.4);
            bands.insert(bands.end(), {b.E_plus, b.E_plus, b.E_minus, b.E_minus});
        }
        const double dist = multiset_distance(s.eigenvalues, bands);
        ok = ok && dist < 1e-8;
        d << "L=" << L << " max_dev=" << fmt("%.1e", dist) << "; ";
    }
    return {ok, d.str()};
}

Outcome gamma_star() {
    std::ostringstream d;
    bool ok = true;
    const auto grid = make_grid(0.0, 1.0, 0.05);
    for (int L : {4, 8, 16}) {
        const Lattice lat({L, L, Boundary::periodic});
        const auto scan = scan_thresholds(lat, GaugeConfig::uniform(lat), 1.0, grid);
        const double g = scan.gamma_star.value_or(std::numeric_limits<double>::quiet_NaN());
        ok = ok && std::abs(g - 0.75) <= 0.01;
        d << "L=" << L << " gamma*=" << fmt("%.5f", g) << "; ";
    }
    return {ok, d.str()};
}

Outcome gamma_pt_scaling() {
    std::ostringstream d;
    const auto grid = make_grid(0.0, 1.0, 0.005);
    std::vector<double> products;
    for (int L : {8, 16, 32, 64}) {
        const auto scan = bloch::scan_thresholds({L, L, Boundary::periodic}, 1.0, grid, ThresholdOptions{1e-7, 1});
        const double g = scan.gamma_pt.value_or(std::numeric_limits<double>::quiet_NaN());
        products.push_back(g * L);
        d << "L=" << L << " gamma_pt*L=" << fmt("%.4f", g * L) << "; ";
    }
    double lo = products[0], hi = products[0];
    for (double p : products) {
        lo = std::min(lo, p);
        hi = std::max(hi, p);
    }
    const double spread = hi / lo - 1.0;
    d << "spread=" << fmt("%.3f", spread);
    return {std::isfinite(spread) && spread <= 0.20, d.str()};
}

Outcome broken_fraction_curve() {
    std::ostringstream d;
    const LatticeSpec spec{20, 20, Boundary::periodic};
    const auto grid = make_grid(0.0, 1.0, 0.01);
    const auto scan = bloch::scan_thresholds(spec, 1.0, grid);
    bool ok = scan.gamma_pt.has_value() && scan.monotone;
    double last = 0.0;
    for (std::size_t i = 0; i < scan.gammas.size(); ++i) {
        const double g = scan.gammas[i], f = scan.fractions[i];
        if (scan.gamma_pt && g < *scan.gamma_pt) ok = ok && f == 0.0;
        if (g > 0.75) ok = ok && f == 1.0;
        ok = ok && f >= last;
        last = f;
    }
    // spot check of the momentum count against the dense real-space solve
    const Lattice lat(spec);
    const auto pt = classify_pt(eigendecompose(build_matrix(lat, GaugeConfig::uniform(lat), 1.0, 0.5)));
    const double mom = bloch::broken_fraction(spec, 1.0, 0.5);
    ok = ok && std::abs(pt.fraction_broken - mom) < 1e-12;
    d << "gamma_pt=" << fmt("%.5f", scan.gamma_pt.value_or(NAN)) << " monotone=" << scan.monotone
      << " fraction(0.5) real=" << fmt("%.4f", pt.fraction_broken) << " momentum=" << fmt("%.4f", mom);
    return {ok, d.str()};
}

Outcome exceptional_ring() {
    const double J = 1.0, gamma = 0.4;
    const auto ring = bloch::ep_locus(J, gamma);
    double gap = 0.0, sigma = 0.0;
    for (const auto& p : ring.points) {
        const auto b = bloch::bands(p.kx, p.ky, J, gamma);
        gap = std::max(gap, std::abs(b.E_plus - b.E_minus));
        sigma = std::max(sigma, p.sigma_min);
    }
    std::mt19937 rng(20240);
    std::uniform_real_distribution<double> angle(0, 2 * M_PI), frac(0.01, 0.99);
    int interior = 0, exterior = 0;
    for (int i = 0; i < 100; ++i) {
        const double th = angle(rng);
        const double rr = bloch::ring_radius(ring, th), rz = bloch::zone_radius(th);
        const double ri = frac(rng) * rr, ro = rr + frac(rng) * (rz - rr);
        const cd gi = [&] { auto b = bloch::bands(ri * std::cos(th), ri * std::sin(th), J, gamma); return b.E_plus - b.E_minus; }();
        const cd go = [&] { auto b = bloch::bands(ro * std::cos(th), ro * std::sin(th), J, gamma); return b.E_plus - b.E_minus; }();
        if (gi.imag() == 0.0 && gi.real() > 0.0) ++interior;
        if (go.real() == 0.0 && go.imag() > 0.0) ++exterior;
    }
    const int winding = bloch::winding_number(ring, 0.0, 0.0);
    std::ostringstream d;
    d << ring.points.size() << " points, winding=" << winding << " max_gap=" << fmt("%.1e", gap)
      << " max_sigma_min=" << fmt("%.1e", sigma) << " interior_real=" << interior << "/100 exterior_imag=" << exterior
      << "/100";
    return {winding == 1 && gap < 1e-6 && sigma < 1e-6 && interior == 100 && exterior == 100, d.str()};
}

Outcome symmetry_suite() {
    std::vector<oracle::CheckResult> all;
    auto add = [&](const std::vector<oracle::CheckResult>& v) { all.insert(all.end(), v.begin(), v.end()); };
    add(oracle::symmetry_check(oracle::OracleSystem::hexagon(), 1.0, 0.4, oracle::Symmetry::strong_W));
    const auto bond = oracle::OracleSystem::single_bond();
    add(oracle::symmetry_check(bond, 1.0, 0.4, oracle::Symmetry::weak_Z2));
    add(oracle::symmetry_check(bond, 1.0, 0.4, oracle::Symmetry::weak_U1));
    add(oracle::symmetry_check(bond, 1.0, 0.4, oracle::Symmetry::PT));
    add(oracle::symmetry_check(oracle::OracleSystem::hexagon(), 1.0, 0.4, oracle::Symmetry::PT));
    bool ok = !all.empty();
    double worst = 0.0;
    std::string failed;
    for (const auto& c : all) {
        ok = ok && c.pass && c.residual < 1e-12;
        worst = std::max(worst, c.residual);
        if (!c.pass) failed += " " + c.check_name;
    }
    std::ostringstream d;
    d << all.size() << " checks, worst residual=" << fmt("%.1e", worst) << failed;
    return {ok, d.str()};
}

Outcome ness_counting() {
    std::ostringstream d;
    bool ok = true;
    for (int L : {2, 3}) {
        const LatticeSpec spec{L, L, Boundary::periodic};
        const Lattice lat(spec);
        const auto count = count_ness(spec);
        boost::multiprecision::cpp_int want = 1;
        want <<= static_cast<unsigned>(spec.num_sites() / 2 + 1);
        const SectorEnumeration e(lat, SectorFilter::ness_only);
        std::uint64_t admitted = 0;
        for (const FluxAssignment& f : e) admitted += admits_ness(f) ? 1 : 0;
        ok = ok && count == want && boost::multiprecision::cpp_int(e.size()) == count && admitted == e.size();
        d << L << "x" << L << " count=" << count << " enumerated=" << e.size() << "; ";
    }
    // independent: scan every sector of the small torus
    const Lattice small({2, 2, Boundary::periodic});
    std::uint64_t brute = 0;
    for (const FluxAssignment& f : SectorEnumeration(small, SectorFilter::all)) brute += admits_ness(f) ? 1 : 0;
    ok = ok && brute == 32;
    d << "2x2 brute force over all sectors=" << brute;
    return {ok, d.str()};
}

Outcome gamma_mode() {
    auto gamma_eigs = [](double gamma) {
        return linalg::eig(Eigen::MatrixXcd(bloch::bloch_h(0, 0, 1.0, gamma).entries), false).values;
    };
    const auto below = gamma_eigs(0.5), above = gamma_eigs(1.0);
    double im_below = 0.0, re_above = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        im_below = std::max(im_below, std::abs(below(i).imag()));
        re_above = std::max(re_above, std::abs(above(i).real()));
    }
    const std::vector<double> t{0.0, 1.0};
    bool ok = im_below < 1e-12 && re_above < 1e-12;
    double worst = 0.0;
    for (double J : {1.0, 2.0}) {
        for (double gamma : {0.1, 0.5, 0.7}) {
            const auto d = bloch::gamma_mode_dynamics(J * 1.0, gamma * J, t);
            const double err = std::abs(d.frequency - std::sqrt(9 * J * J - 16 * gamma * gamma * J * J));
            ok = ok && d.oscillating && err <= 1e-10;
            worst = std::max(worst, err);
        }
        for (double gamma : {0.8, 1.0, 3.0}) {
            const auto d = bloch::gamma_mode_dynamics(J, gamma * J, t);
            const double err = std::abs(d.decay_rate - std::sqrt(16 * gamma * gamma * J * J - 9 * J * J));
            ok = ok && !d.oscillating && err <= 1e-10;
            worst = std::max(worst, err);
        }
    }
    std::ostringstream d;
    d << "max|Im E|(0.5)=" << fmt("%.1e", im_below) << " max|Re E|(1.0)=" << fmt("%.1e", re_above)
      << " rate error=" << fmt("%.1e", worst);
    return {ok, d.str()};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"single-site spectrum and kernel", single_site},
        {"superoperator vs bilayer spectrum", vectorization},
        {"fermion sector cross-check", fermionization},
        {"Bloch vs real-space spectrum", bloch_equivalence},
        {"gamma* = 3J/4 (real space)", gamma_star},
        {"gamma_PT * L constant (momentum)", gamma_pt_scaling},
        {"PT-broken fraction curve L=20", broken_fraction_curve},
        {"exceptional ring at (1, 0.4)", exceptional_ring},
        {"symmetry suite", symmetry_suite},
        {"NESS sector count", ness_counting},
        {"Gamma-mode crossover", gamma_mode},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2zu %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, secs,
                    o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}

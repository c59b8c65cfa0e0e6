#include "dhc/lattice.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dhc/error.hpp"

namespace dhc {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
const double sqrt3 = std::sqrt(3.0);

}  // namespace

char to_char(BondKind kind) {
    switch (kind) {
        case BondKind::x: return 'x';
        case BondKind::y: return 'y';
        case BondKind::z: return 'z';
    }
    return '?';
}

Vec2 lattice_vector_a1() { return {1.5, 0.5 * sqrt3}; }
Vec2 lattice_vector_a2() { return {1.5, -0.5 * sqrt3}; }
Vec2 reciprocal_vector_b1() { return {2.0 * std::numbers::pi / 3.0, 2.0 * std::numbers::pi / sqrt3}; }
Vec2 reciprocal_vector_b2() { return {2.0 * std::numbers::pi / 3.0, -2.0 * std::numbers::pi / sqrt3}; }

Lattice::Lattice(LatticeSpec spec) : spec_(spec) {
    if (spec_.L1 < 1 || spec_.L2 < 1) {
        throw ConfigError("lattice dimensions must be positive, got " + describe(spec_));
    }
    const int L1 = spec_.L1;
    const int L2 = spec_.L2;
    incident_.assign(num_sites(), {});

    // a_bond[cell][kind]: bond leaving the A site of `cell`.
    std::vector<std::array<std::size_t, 3>> a_bond(num_cells(), {npos, npos, npos});
    auto add_bond = [&](std::size_t cell, std::size_t b_site, BondKind kind) {
        const std::size_t a_site = 2 * cell;
        a_bond[cell][static_cast<int>(kind)] = bonds_.size();
        incident_[a_site].push_back(bonds_.size());
        incident_[b_site].push_back(bonds_.size());
        bonds_.push_back(Bond{a_site, b_site, kind});
    };

    // A(n) — z → B(n), A(n) — x → B(n + e1), A(n) — y → B(n + e2)
    for (int n2 = 0; n2 < L2; ++n2) {
        for (int n1 = 0; n1 < L1; ++n1) {
            bool ok = true;
            const std::size_t cell = wrap_cell(n1, n2, ok);
            add_bond(cell, 2 * cell + 1, BondKind::z);
            ok = true;
            const std::size_t cx = wrap_cell(n1 + 1, n2, ok);
            if (ok) add_bond(cell, 2 * cx + 1, BondKind::x);
            ok = true;
            const std::size_t cy = wrap_cell(n1, n2 + 1, ok);
            if (ok) add_bond(cell, 2 * cy + 1, BondKind::y);
        }
    }

    // Hexagon anchored at cell n:
    //   A(n) -z- B(n) -x- A(n-e1) -y- B(n-e1+e2) -z- A(n-e1+e2) -x- B(n+e2) -y- A(n)
    const bool periodic_hexagons = periodic() && L1 >= 2 && L2 >= 2;
    if (periodic_hexagons || !periodic()) {
        for (int n2 = 0; n2 < L2; ++n2) {
            for (int n1 = 0; n1 < L1; ++n1) {
                bool ok = true;
                const std::size_t c0 = wrap_cell(n1, n2, ok);
                const std::size_t c1 = wrap_cell(n1 - 1, n2, ok);
                const std::size_t c2 = wrap_cell(n1 - 1, n2 + 1, ok);
                const std::size_t c3 = wrap_cell(n1, n2 + 1, ok);
                if (!ok) continue;
                Plaquette p;
                p.sites = {2 * c0, 2 * c0 + 1, 2 * c1, 2 * c2 + 1, 2 * c2, 2 * c3 + 1};
                p.bonds = {a_bond[c0][2], a_bond[c1][0], a_bond[c1][1],
                           a_bond[c2][2], a_bond[c2][0], a_bond[c0][1]};
                plaquettes_.push_back(p);
            }
        }
    }

    if (periodic()) {
        std::vector<std::size_t> loop1;
        for (int m = 0; m < L1; ++m) {
            bool ok = true;
            loop1.push_back(a_bond[wrap_cell(m, 0, ok)][0]);
            loop1.push_back(a_bond[wrap_cell(m + 1, 0, ok)][2]);
        }
        std::vector<std::size_t> loop2;
        for (int m = 0; m < L2; ++m) {
            bool ok = true;
            loop2.push_back(a_bond[wrap_cell(0, m, ok)][1]);
            loop2.push_back(a_bond[wrap_cell(0, m + 1, ok)][2]);
        }
        wilson_loops_ = {std::move(loop1), std::move(loop2)};
    }
}

std::size_t Lattice::wrap_cell(int n1, int n2, bool& valid) const {
    const int L1 = spec_.L1;
    const int L2 = spec_.L2;
    if (!periodic() && (n1 < 0 || n1 >= L1 || n2 < 0 || n2 >= L2)) {
        valid = false;
        return 0;
    }
    n1 = ((n1 % L1) + L1) % L1;
    n2 = ((n2 % L2) + L2) % L2;
    return static_cast<std::size_t>(n2) * static_cast<std::size_t>(L1) + static_cast<std::size_t>(n1);
}

std::size_t Lattice::flat_index(const SiteIndex& s) const {
    if (s.n1 < 0 || s.n1 >= spec_.L1 || s.n2 < 0 || s.n2 >= spec_.L2) {
        throw ConfigError("site index outside the lattice");
    }
    const std::size_t cell = static_cast<std::size_t>(s.n2) * static_cast<std::size_t>(spec_.L1) +
                             static_cast<std::size_t>(s.n1);
    return 2 * cell + static_cast<std::size_t>(s.sublattice);
}

SiteIndex Lattice::site(std::size_t flat) const {
    if (flat >= num_sites()) throw ConfigError("flat site index out of range");
    const std::size_t cell = flat / 2;
    return SiteIndex{static_cast<int>(cell % static_cast<std::size_t>(spec_.L1)),
                     static_cast<int>(cell / static_cast<std::size_t>(spec_.L1)),
                     flat % 2 == 0 ? Sublattice::A : Sublattice::B};
}

Vec2 Lattice::position(std::size_t flat) const {
    const SiteIndex s = site(flat);
    const Vec2 a1 = lattice_vector_a1();
    const Vec2 a2 = lattice_vector_a2();
    Vec2 r{s.n1 * a1.x + s.n2 * a2.x, s.n1 * a1.y + s.n2 * a2.y};
    if (s.sublattice == Sublattice::B) r.x -= 1.0;  // B(n) = A(n) + (-1, 0)
    return r;
}

Lattice build_lattice(const LatticeSpec& spec) { return Lattice(spec); }

MomentumGrid momentum_grid(const LatticeSpec& spec) {
    if (spec.boundary != Boundary::periodic) {
        throw ConfigError("momentum grid requires periodic boundaries");
    }
    if (spec.L1 < 1 || spec.L2 < 1) {
        throw ConfigError("lattice dimensions must be positive, got " + describe(spec));
    }
    const Vec2 b1 = reciprocal_vector_b1();
    const Vec2 b2 = reciprocal_vector_b2();
    MomentumGrid grid;
    grid.points.reserve(spec.num_cells());
    for (int m2 = 0; m2 < spec.L2; ++m2) {
        for (int m1 = 0; m1 < spec.L1; ++m1) {
            const double f1 = static_cast<double>(m1) / spec.L1;
            const double f2 = static_cast<double>(m2) / spec.L2;
            const Vec2 k0{f1 * b1.x + f2 * b2.x, f1 * b1.y + f2 * b2.y};
            Vec2 best = k0;
            double best_norm = std::hypot(k0.x, k0.y);
            for (int i = -2; i <= 2; ++i) {
                for (int j = -2; j <= 2; ++j) {
                    const Vec2 k{k0.x + i * b1.x + j * b2.x, k0.y + i * b1.y + j * b2.y};
                    const double n = std::hypot(k.x, k.y);
                    if (n < best_norm - 1e-12) {
                        best = k;
                        best_norm = n;
                    }
                }
            }
            grid.points.push_back(Momentum{best.x, best.y, m1, m2});
        }
    }
    return grid;
}

std::string describe(const LatticeSpec& spec) {
    std::ostringstream os;
    os << spec.L1 << "x" << spec.L2 << (spec.boundary == Boundary::periodic ? " periodic" : " open");
    return os.str();
}

}  // namespace dhc

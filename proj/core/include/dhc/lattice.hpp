// lattice.hpp — honeycomb geometry: sites, A→B bonds, hexagons, Wilson loops, momenta

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dhc {

enum class Boundary { periodic, open };

struct LatticeSpec {
    int L1 = 1;  // unit cells along a1
    int L2 = 1;  // unit cells along a2
    Boundary boundary = Boundary::periodic;

    std::size_t num_cells() const { return static_cast<std::size_t>(L1) * static_cast<std::size_t>(L2); }
    std::size_t num_sites() const { return 2 * num_cells(); }
};

enum class Sublattice : std::uint8_t { A = 0, B = 1 };
enum class BondKind : std::uint8_t { x = 0, y = 1, z = 2 };

char to_char(BondKind kind);

struct SiteIndex {
    int n1 = 0;
    int n2 = 0;
    Sublattice sublattice = Sublattice::A;

    bool operator==(const SiteIndex&) const = default;
};

/// Oriented bond; `from` is always on sublattice A and `to` on sublattice B (flat indices).
struct Bond {
    std::size_t from = 0;
    std::size_t to = 0;
    BondKind kind = BondKind::z;
};

/// Hexagon traversed counterclockwise. bonds[k] joins sites[k] and sites[(k+1)%6].
struct Plaquette {
    std::array<std::size_t, 6> sites{};
    std::array<std::size_t, 6> bonds{};
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

// Lattice spacing 1: a1 = (3/2, √3/2), a2 = (3/2, −√3/2).
Vec2 lattice_vector_a1();
Vec2 lattice_vector_a2();
// b_i · a_j = 2π δ_ij
Vec2 reciprocal_vector_b1();
Vec2 reciprocal_vector_b2();

class Lattice {
public:
    explicit Lattice(LatticeSpec spec);

    const LatticeSpec& spec() const { return spec_; }
    bool periodic() const { return spec_.boundary == Boundary::periodic; }

    std::size_t num_sites() const { return spec_.num_sites(); }
    std::size_t num_cells() const { return spec_.num_cells(); }
    std::size_t num_bonds() const { return bonds_.size(); }
    std::size_t num_plaquettes() const { return plaquettes_.size(); }

    // Flat ordering: cell-major (n1 fastest), sublattice-minor.
    std::size_t flat_index(const SiteIndex& s) const;
    SiteIndex site(std::size_t flat) const;
    Vec2 position(std::size_t flat) const;

    const std::vector<Bond>& bonds() const { return bonds_; }
    const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }
    /// Bond indices incident to a site (at most one per kind).
    const std::vector<std::size_t>& incident_bonds(std::size_t flat) const { return incident_[flat]; }

    /// Two non-contractible loops (along a1, then a2), as bond lists; empty for open boundaries.
    const std::vector<std::vector<std::size_t>>& wilson_loops() const { return wilson_loops_; }

    /// True when hexagons are enumerated: periodic with L1, L2 >= 2, or open (interior hexagons).
    bool has_plaquettes() const { return !plaquettes_.empty(); }

private:
    std::size_t wrap_cell(int n1, int n2, bool& valid) const;

    LatticeSpec spec_;
    std::vector<Bond> bonds_;
    std::vector<Plaquette> plaquettes_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<std::vector<std::size_t>> wilson_loops_;
};

/// Validates the spec and builds the site/bond/plaquette tables.
Lattice build_lattice(const LatticeSpec& spec);

struct Momentum {
    double kx = 0.0;
    double ky = 0.0;
    int m1 = 0;  // k = (m1/L1) b1 + (m2/L2) b2 before folding into the first zone
    int m2 = 0;
};

struct MomentumGrid {
    std::vector<Momentum> points;
};

/// Allowed momenta of a periodic lattice, folded into the hexagonal first Brillouin zone.
MomentumGrid momentum_grid(const LatticeSpec& spec);

std::string describe(const LatticeSpec& spec);

}  // namespace dhc

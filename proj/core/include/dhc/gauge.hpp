// gauge.hpp — Z2 gauge fields on the bilayer, fluxes, and flux-sector bookkeeping

#pragma once

#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "dhc/lattice.hpp"

namespace dhc {

using Z2 = std::int8_t;  // always +1 or -1

/// Bond variables u (bra layer), ũ (ket layer) indexed by bond, and interlayer v by site.
struct GaugeConfig {
    std::vector<Z2> u;
    std::vector<Z2> u_tilde;
    std::vector<Z2> v;

    static GaugeConfig uniform(const Lattice& lattice);
    bool operator==(const GaugeConfig&) const = default;
};

/// Gauge-invariant labels of a sector. Wilson loops are empty on open lattices.
struct FluxAssignment {
    std::vector<Z2> W;        // per plaquette, bra layer
    std::vector<Z2> W_tilde;  // per plaquette, ket layer
    std::vector<Z2> V;        // per bond: u_ij v_i v_j ũ_ij
    std::vector<Z2> wilson;
    std::vector<Z2> wilson_tilde;

    bool operator==(const FluxAssignment&) const = default;
};

/// Throws ConfigError when the config does not cover every bond and site.
void validate(const Lattice& lattice, const GaugeConfig& g);

FluxAssignment compute_fluxes(const Lattice& lattice, const GaugeConfig& g);

/// u'_ij = Λ_i u_ij Λ_j, ũ'_ij = Λ̃_i ũ_ij Λ̃_j, v'_i = Λ_i v_i Λ̃_i
GaugeConfig gauge_transform(const Lattice& lattice, const GaugeConfig& g,
                            std::span<const Z2> lambda, std::span<const Z2> lambda_tilde);

/// Matched hexagon fluxes and Wilson loops, and V_p = -1 on every vertical plaquette.
bool admits_ness(const FluxAssignment& f);

/// 2^(N/2+1) for N sites: matched fluxes (N/2 - 1 free) times four Wilson-loop sectors.
boost::multiprecision::cpp_int count_ness(const LatticeSpec& spec);

/// Realizes flux labels as a canonical gauge configuration.
///
/// A BFS spanning tree rooted at site 0 carries u = +1; the co-tree bonds are the
/// unique solution over GF(2) of the hexagon and Wilson-loop constraints. The
/// interlayer field is fixed to v_0 = +1 and propagated along the tree. The
/// labels must be complete (hexagons plus Wilson loops span the cycle space),
/// otherwise construction throws ConfigError.
class FluxLifter {
public:
    explicit FluxLifter(const Lattice& lattice);

    const Lattice& lattice() const { return *lattice_; }

    /// Bond variables of one layer given its hexagon fluxes and Wilson loops.
    std::vector<Z2> lift_layer(std::span<const Z2> W, std::span<const Z2> wilson) const;
    /// Site variables v given both layers and the vertical-plaquette pattern.
    std::vector<Z2> lift_interlayer(std::span<const Z2> u, std::span<const Z2> u_tilde,
                                    std::span<const Z2> V) const;
    GaugeConfig lift(const FluxAssignment& f) const;

private:
    const Lattice* lattice_;
    std::size_t num_constraints_ = 0;
    std::size_t words_ = 0;  // uint64 words per constraint mask
    std::vector<std::size_t> cotree_bonds_;
    // For each co-tree bond: mask over constraints whose parity gives its GF(2) value.
    std::vector<std::vector<std::uint64_t>> solution_rows_;
    // Constraint combinations that must have even parity for a consistent target.
    std::vector<std::vector<std::uint64_t>> dependencies_;
    std::vector<std::size_t> tree_parent_bond_;  // per site, npos for the root
    std::vector<std::size_t> bfs_order_;
};

GaugeConfig lift_to_gauge(const Lattice& lattice, const FluxAssignment& f);

enum class SectorFilter { all, ness_only, matched_W };

SectorFilter parse_sector_filter(const std::string& name);

/// Indexable enumeration of flux sectors, one canonical label set per sector.
///
/// Bit layout of the sector index (least significant first): W (P - 1 free
/// plaquettes; the last is fixed by the global constraint), W̃ (filter `all`
/// only), u Wilson loops (2), ũ Wilson loops (2, not for `ness_only`), then the
/// N - 1 interlayer bits v_1..v_{N-1} that generate V (not for `ness_only`,
/// where V = -1 and all tilde labels equal the untilded ones).
class SectorEnumeration {
public:
    SectorEnumeration(const Lattice& lattice, SectorFilter filter, int max_log2 = 32);

    std::uint64_t size() const { return std::uint64_t{1} << num_bits_; }
    int num_bits() const { return num_bits_; }
    SectorFilter filter() const { return filter_; }

    FluxAssignment at(std::uint64_t index) const;
    GaugeConfig gauge_at(std::uint64_t index) const;

    class iterator {
    public:
        using iterator_category = std::input_iterator_tag;
        using value_type = FluxAssignment;
        using difference_type = std::ptrdiff_t;
        using pointer = void;
        using reference = FluxAssignment;

        iterator(const SectorEnumeration* owner, std::uint64_t index) : owner_(owner), index_(index) {}
        FluxAssignment operator*() const { return owner_->at(index_); }
        iterator& operator++() { ++index_; return *this; }
        iterator operator++(int) { iterator tmp = *this; ++index_; return tmp; }
        bool operator==(const iterator& o) const { return index_ == o.index_; }

    private:
        const SectorEnumeration* owner_;
        std::uint64_t index_;
    };

    iterator begin() const { return iterator(this, 0); }
    iterator end() const { return iterator(this, size()); }

private:
    struct Decoded {
        std::vector<Z2> W, W_tilde, wilson, wilson_tilde, v;
    };
    Decoded decode(std::uint64_t index) const;

    const Lattice* lattice_;
    SectorFilter filter_;
    FluxLifter lifter_;
    int free_plaquettes_ = 0;
    int num_bits_ = 0;
};

// JSON interchange: arrays of ±1 keyed by canonical plaquette / bond / site index.
std::string to_json(const FluxAssignment& f);
std::string to_json(const GaugeConfig& g);
FluxAssignment flux_from_json(const std::string& text);
GaugeConfig gauge_from_json(const std::string& text);
/// Accepts either a gauge document ({"u":...}) or a flux document ({"W":...}), lifting the latter.
GaugeConfig load_gauge(const Lattice& lattice, const std::string& text);

}  // namespace dhc

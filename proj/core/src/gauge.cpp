#include "dhc/gauge.hpp"

#include <bit>
#include <deque>
#include <limits>

#include "dhc/error.hpp"

namespace dhc {

namespace {

constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

bool parity(const std::vector<std::uint64_t>& mask, const std::vector<std::uint64_t>& bits) {
    unsigned acc = 0;
    for (std::size_t w = 0; w < mask.size(); ++w) acc ^= static_cast<unsigned>(std::popcount(mask[w] & bits[w]));
    return (acc & 1U) != 0;
}

void check_signs(std::span<const Z2> values, const char* what) {
    for (Z2 s : values) {
        if (s != 1 && s != -1) throw ConfigError(std::string(what) + " entries must be +1 or -1");
    }
}

std::size_t other_end(const Bond& b, std::size_t site) { return b.from == site ? b.to : b.from; }

}  // namespace

GaugeConfig GaugeConfig::uniform(const Lattice& lattice) {
    return GaugeConfig{std::vector<Z2>(lattice.num_bonds(), 1), std::vector<Z2>(lattice.num_bonds(), 1),
                       std::vector<Z2>(lattice.num_sites(), 1)};
}

void validate(const Lattice& lattice, const GaugeConfig& g) {
    if (g.u.size() != lattice.num_bonds() || g.u_tilde.size() != lattice.num_bonds()) {
        throw ConfigError("gauge config must define u and u_tilde on all " +
                          std::to_string(lattice.num_bonds()) + " bonds");
    }
    if (g.v.size() != lattice.num_sites()) {
        throw ConfigError("gauge config must define v on all " + std::to_string(lattice.num_sites()) + " sites");
    }
    check_signs(g.u, "u");
    check_signs(g.u_tilde, "u_tilde");
    check_signs(g.v, "v");
}

FluxAssignment compute_fluxes(const Lattice& lattice, const GaugeConfig& g) {
    validate(lattice, g);
    FluxAssignment f;
    f.W.reserve(lattice.num_plaquettes());
    f.W_tilde.reserve(lattice.num_plaquettes());
    // Around a hexagon the traversal alternates A→B and B→A, and the closing bond
    // runs A→B again, so the oriented product equals the product of stored A→B values.
    for (const Plaquette& p : lattice.plaquettes()) {
        Z2 w = 1;
        Z2 wt = 1;
        for (std::size_t b : p.bonds) {
            w = static_cast<Z2>(w * g.u[b]);
            wt = static_cast<Z2>(wt * g.u_tilde[b]);
        }
        f.W.push_back(w);
        f.W_tilde.push_back(wt);
    }
    f.V.reserve(lattice.num_bonds());
    for (std::size_t b = 0; b < lattice.num_bonds(); ++b) {
        const Bond& bond = lattice.bonds()[b];
        f.V.push_back(static_cast<Z2>(g.u[b] * g.v[bond.from] * g.v[bond.to] * g.u_tilde[b]));
    }
    for (const auto& loop : lattice.wilson_loops()) {
        Z2 w = 1;
        Z2 wt = 1;
        for (std::size_t b : loop) {
            w = static_cast<Z2>(w * g.u[b]);
            wt = static_cast<Z2>(wt * g.u_tilde[b]);
        }
        f.wilson.push_back(w);
        f.wilson_tilde.push_back(wt);
    }
    return f;
}

GaugeConfig gauge_transform(const Lattice& lattice, const GaugeConfig& g, std::span<const Z2> lambda,
                            std::span<const Z2> lambda_tilde) {
    validate(lattice, g);
    if (lambda.size() != lattice.num_sites() || lambda_tilde.size() != lattice.num_sites()) {
        throw ConfigError("gauge transformation must be defined on every site");
    }
    check_signs(lambda, "lambda");
    check_signs(lambda_tilde, "lambda_tilde");
    GaugeConfig out = g;
    for (std::size_t b = 0; b < lattice.num_bonds(); ++b) {
        const Bond& bond = lattice.bonds()[b];
        out.u[b] = static_cast<Z2>(lambda[bond.from] * g.u[b] * lambda[bond.to]);
        out.u_tilde[b] = static_cast<Z2>(lambda_tilde[bond.from] * g.u_tilde[b] * lambda_tilde[bond.to]);
    }
    for (std::size_t i = 0; i < lattice.num_sites(); ++i) {
        out.v[i] = static_cast<Z2>(lambda[i] * g.v[i] * lambda_tilde[i]);
    }
    return out;
}

bool admits_ness(const FluxAssignment& f) {
    if (f.W.size() != f.W_tilde.size()) return false;
    for (std::size_t p = 0; p < f.W.size(); ++p) {
        if (f.W[p] != f.W_tilde[p]) return false;
    }
    for (Z2 v : f.V) {
        if (v != -1) return false;
    }
    return f.wilson == f.wilson_tilde;
}

boost::multiprecision::cpp_int count_ness(const LatticeSpec& spec) {
    if (spec.boundary != Boundary::periodic) {
        throw ConfigError("NESS counting requires periodic boundaries");
    }
    if (spec.L1 < 1 || spec.L2 < 1) throw ConfigError("lattice dimensions must be positive");
    const std::size_t half = spec.num_sites() / 2;
    boost::multiprecision::cpp_int count = 1;
    count <<= static_cast<unsigned>(half + 1);
    return count;
}

// ---------------------------------------------------------------------------

FluxLifter::FluxLifter(const Lattice& lattice) : lattice_(&lattice) {
    const std::size_t n_sites = lattice.num_sites();
    const std::size_t n_bonds = lattice.num_bonds();

    // BFS spanning tree from site 0, bonds visited in index order.
    std::vector<bool> in_tree(n_bonds, false);
    tree_parent_bond_.assign(n_sites, npos);
    std::vector<bool> seen(n_sites, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    while (!queue.empty()) {
        const std::size_t s = queue.front();
        queue.pop_front();
        bfs_order_.push_back(s);
        for (std::size_t b : lattice.incident_bonds(s)) {
            const std::size_t t = other_end(lattice.bonds()[b], s);
            if (seen[t]) continue;
            seen[t] = true;
            in_tree[b] = true;
            tree_parent_bond_[t] = b;
            queue.push_back(t);
        }
    }
    if (bfs_order_.size() != n_sites) throw ConfigError("lattice graph is not connected");

    std::vector<std::size_t> cotree_slot(n_bonds, npos);
    for (std::size_t b = 0; b < n_bonds; ++b) {
        if (!in_tree[b]) {
            cotree_slot[b] = cotree_bonds_.size();
            cotree_bonds_.push_back(b);
        }
    }

    std::vector<std::vector<std::size_t>> loops;
    for (const Plaquette& p : lattice.plaquettes()) loops.emplace_back(p.bonds.begin(), p.bonds.end());
    for (const auto& w : lattice.wilson_loops()) loops.push_back(w);

    num_constraints_ = loops.size();
    words_ = (num_constraints_ + 63) / 64;
    const std::size_t unknowns = cotree_bonds_.size();
    const std::size_t col_words = (unknowns + 63) / 64;

    std::vector<std::vector<std::uint64_t>> rows(num_constraints_, std::vector<std::uint64_t>(col_words, 0));
    std::vector<std::vector<std::uint64_t>> combo(num_constraints_, std::vector<std::uint64_t>(words_, 0));
    for (std::size_t c = 0; c < num_constraints_; ++c) {
        combo[c][c / 64] |= std::uint64_t{1} << (c % 64);
        for (std::size_t b : loops[c]) {
            const std::size_t k = cotree_slot[b];
            if (k != npos) rows[c][k / 64] ^= std::uint64_t{1} << (k % 64);
        }
    }

    // Gauss-Jordan elimination over GF(2), tracking row combinations.
    std::vector<std::size_t> pivot_col;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < unknowns && rank < num_constraints_; ++col) {
        const std::size_t w = col / 64;
        const std::uint64_t bit = std::uint64_t{1} << (col % 64);
        std::size_t pivot = npos;
        for (std::size_t r = rank; r < num_constraints_; ++r) {
            if (rows[r][w] & bit) { pivot = r; break; }
        }
        if (pivot == npos) continue;
        std::swap(rows[pivot], rows[rank]);
        std::swap(combo[pivot], combo[rank]);
        for (std::size_t r = 0; r < num_constraints_; ++r) {
            if (r != rank && (rows[r][w] & bit)) {
                for (std::size_t j = 0; j < col_words; ++j) rows[r][j] ^= rows[rank][j];
                for (std::size_t j = 0; j < words_; ++j) combo[r][j] ^= combo[rank][j];
            }
        }
        pivot_col.push_back(col);
        ++rank;
    }
    if (rank != unknowns) {
        throw ConfigError("flux labels do not determine the gauge field on " + describe(lattice.spec()) +
                          " (cycle space " + std::to_string(unknowns) + ", independent loops " +
                          std::to_string(rank) + ")");
    }
    solution_rows_.assign(unknowns, {});
    for (std::size_t r = 0; r < rank; ++r) solution_rows_[pivot_col[r]] = combo[r];
    for (std::size_t r = rank; r < num_constraints_; ++r) dependencies_.push_back(combo[r]);
}

std::vector<Z2> FluxLifter::lift_layer(std::span<const Z2> W, std::span<const Z2> wilson) const {
    const Lattice& lat = *lattice_;
    if (W.size() != lat.num_plaquettes() || wilson.size() != lat.wilson_loops().size()) {
        throw ConfigError("flux pattern size does not match the lattice");
    }
    check_signs(W, "W");
    check_signs(wilson, "wilson");
    std::vector<std::uint64_t> target(words_, 0);
    std::size_t c = 0;
    for (Z2 w : W) {
        if (w < 0) target[c / 64] |= std::uint64_t{1} << (c % 64);
        ++c;
    }
    for (Z2 w : wilson) {
        if (w < 0) target[c / 64] |= std::uint64_t{1} << (c % 64);
        ++c;
    }
    for (const auto& dep : dependencies_) {
        if (parity(dep, target)) {
            throw ConfigError("hexagon fluxes violate the global constraint prod_p W_p = +1");
        }
    }
    std::vector<Z2> u(lat.num_bonds(), 1);
    for (std::size_t k = 0; k < cotree_bonds_.size(); ++k) {
        if (parity(solution_rows_[k], target)) u[cotree_bonds_[k]] = -1;
    }
    return u;
}

std::vector<Z2> FluxLifter::lift_interlayer(std::span<const Z2> u, std::span<const Z2> u_tilde,
                                            std::span<const Z2> V) const {
    const Lattice& lat = *lattice_;
    if (u.size() != lat.num_bonds() || u_tilde.size() != lat.num_bonds() || V.size() != lat.num_bonds()) {
        throw ConfigError("vertical plaquette pattern must cover every bond");
    }
    check_signs(V, "V");
    std::vector<Z2> v(lat.num_sites(), 1);
    for (std::size_t s : bfs_order_) {
        const std::size_t b = tree_parent_bond_[s];
        if (b == npos) continue;
        const std::size_t t = other_end(lat.bonds()[b], s);
        v[s] = static_cast<Z2>(v[t] * V[b] * u[b] * u_tilde[b]);
    }
    for (std::size_t b = 0; b < lat.num_bonds(); ++b) {
        const Bond& bond = lat.bonds()[b];
        if (V[b] != u[b] * u_tilde[b] * v[bond.from] * v[bond.to]) {
            throw ConfigError("vertical plaquettes are inconsistent with the hexagon fluxes and Wilson loops");
        }
    }
    return v;
}

GaugeConfig FluxLifter::lift(const FluxAssignment& f) const {
    GaugeConfig g;
    g.u = lift_layer(f.W, f.wilson);
    g.u_tilde = lift_layer(f.W_tilde, f.wilson_tilde);
    g.v = lift_interlayer(g.u, g.u_tilde, f.V);
    return g;
}

GaugeConfig lift_to_gauge(const Lattice& lattice, const FluxAssignment& f) { return FluxLifter(lattice).lift(f); }

// ---------------------------------------------------------------------------

SectorFilter parse_sector_filter(const std::string& name) {
    if (name == "all") return SectorFilter::all;
    if (name == "ness_only" || name == "ness-only") return SectorFilter::ness_only;
    if (name == "matched_W" || name == "matched-W" || name == "matched_w") return SectorFilter::matched_W;
    throw ConfigError("unknown sector filter '" + name + "'");
}

namespace {

const Lattice& require_periodic(const Lattice& lattice) {
    if (!lattice.periodic()) throw ConfigError("sector enumeration requires periodic boundaries");
    return lattice;
}

}  // namespace

SectorEnumeration::SectorEnumeration(const Lattice& lattice, SectorFilter filter, int max_log2)
    : lattice_(&require_periodic(lattice)), filter_(filter), lifter_(lattice) {
    const int P = static_cast<int>(lattice.num_plaquettes());
    free_plaquettes_ = P > 0 ? P - 1 : 0;
    const int site_bits = static_cast<int>(lattice.num_sites()) - 1;
    switch (filter) {
        case SectorFilter::all: num_bits_ = 2 * free_plaquettes_ + 4 + site_bits; break;
        case SectorFilter::matched_W: num_bits_ = free_plaquettes_ + 4 + site_bits; break;
        case SectorFilter::ness_only: num_bits_ = free_plaquettes_ + 2; break;
    }
    if (num_bits_ > max_log2 || num_bits_ > 62) {
        throw NumericalError("sector enumeration of " + describe(lattice.spec()) + " needs 2^" +
                             std::to_string(num_bits_) + " sectors, above the guard 2^" +
                             std::to_string(std::min(max_log2, 62)));
    }
}

SectorEnumeration::Decoded SectorEnumeration::decode(std::uint64_t index) const {
    int cursor = 0;
    auto next = [&]() -> Z2 { return ((index >> cursor++) & 1U) ? Z2{-1} : Z2{1}; };
    auto plaquettes = [&]() {
        std::vector<Z2> W;
        if (lattice_->num_plaquettes() == 0) return W;
        Z2 prod = 1;
        for (int p = 0; p < free_plaquettes_; ++p) {
            W.push_back(next());
            prod = static_cast<Z2>(prod * W.back());
        }
        W.push_back(prod);
        return W;
    };
    Decoded d;
    d.W = plaquettes();
    d.W_tilde = filter_ == SectorFilter::all ? plaquettes() : d.W;
    d.wilson = {next(), next()};
    if (filter_ == SectorFilter::ness_only) {
        d.wilson_tilde = d.wilson;
        return d;
    }
    d.wilson_tilde = {next(), next()};
    d.v.assign(lattice_->num_sites(), 1);
    for (std::size_t i = 1; i < lattice_->num_sites(); ++i) d.v[i] = next();
    return d;
}

FluxAssignment SectorEnumeration::at(std::uint64_t index) const {
    if (index >= size()) throw ConfigError("sector index out of range");
    Decoded d = decode(index);
    FluxAssignment f;
    f.W = std::move(d.W);
    f.W_tilde = std::move(d.W_tilde);
    f.wilson = std::move(d.wilson);
    f.wilson_tilde = std::move(d.wilson_tilde);
    if (filter_ == SectorFilter::ness_only) {
        f.V.assign(lattice_->num_bonds(), -1);
        return f;
    }
    const std::vector<Z2> u = lifter_.lift_layer(f.W, f.wilson);
    const std::vector<Z2> ut = lifter_.lift_layer(f.W_tilde, f.wilson_tilde);
    f.V.resize(lattice_->num_bonds());
    for (std::size_t b = 0; b < lattice_->num_bonds(); ++b) {
        const Bond& bond = lattice_->bonds()[b];
        f.V[b] = static_cast<Z2>(u[b] * ut[b] * d.v[bond.from] * d.v[bond.to]);
    }
    return f;
}

GaugeConfig SectorEnumeration::gauge_at(std::uint64_t index) const { return lifter_.lift(at(index)); }

}  // namespace dhc

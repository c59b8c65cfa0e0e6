#include <algorithm>
#include <bit>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "dhc/error.hpp"
#include "dhc/linalg.hpp"
#include "dhc/oracle.hpp"

namespace dhc::oracle {

namespace {

constexpr cd kI{0.0, 1.0};

char pauli_char(BondKind k) {
    switch (k) {
        case BondKind::x: return 'X';
        case BondKind::y: return 'Y';
        case BondKind::z: return 'Z';
    }
    return 'I';
}

std::size_t bond_lookup(const OracleSystem& s, std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < s.bonds.size(); ++k)
        if ((s.bonds[k].i == a && s.bonds[k].j == b) || (s.bonds[k].i == b && s.bonds[k].j == a)) return k;
    return s.bonds.size();
}

}  // namespace

SparseOp pauli(int num_qubits, const PauliWord& word) {
    if (num_qubits < 0 || num_qubits > 30) throw ConfigError("pauli: unsupported qubit count");
    const std::size_t dim = std::size_t{1} << num_qubits;
    std::size_t flip = 0, zmask = 0, ymask = 0, seen = 0;
    for (const auto& [q, p] : word.factors) {
        if (q < 0 || q >= num_qubits) throw ConfigError("pauli: qubit out of range");
        const std::size_t bit = std::size_t{1} << (num_qubits - 1 - q);
        if (seen & bit) throw ConfigError("pauli: qubit appears twice in one word");
        seen |= bit;
        switch (p) {
            case 'I': break;
            case 'X': flip ^= bit; break;
            case 'Z': zmask ^= bit; break;
            case 'Y':
                ymask |= bit;
                flip ^= bit;
                break;
            default: throw ConfigError(std::string("pauli: unknown factor ") + p);
        }
    }
    std::vector<Eigen::Triplet<cd>> t;
    t.reserve(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        cd phase = word.coeff;
        if (std::popcount(b & zmask) & 1) phase = -phase;
        // Y|0> = i|1>, Y|1> = -i|0>
        const int ones = std::popcount(b & ymask);
        const int zeros = std::popcount(ymask) - ones;
        static constexpr cd powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        phase *= powers[((zeros - ones) % 4 + 4) % 4];
        t.emplace_back(static_cast<int>(b ^ flip), static_cast<int>(b), phase);
    }
    SparseOp m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseOp identity(int num_qubits) { return pauli(num_qubits, {}); }

OracleSystem OracleSystem::single_site() { return OracleSystem{1, {}, {}}; }

OracleSystem OracleSystem::single_bond(BondKind kind) { return OracleSystem{2, {{0, 1, kind}}, {}}; }

OracleSystem OracleSystem::hexagon() {
    OracleSystem s;
    s.num_sites = 6;
    const BondKind kinds[6] = {BondKind::x, BondKind::y, BondKind::z, BondKind::x, BondKind::y, BondKind::z};
    for (std::size_t k = 0; k < 6; ++k) s.bonds.push_back({k, (k + 1) % 6, kinds[k]});
    s.hexagons.push_back({0, 1, 2, 3, 4, 5});
    return s;
}

OracleSystem OracleSystem::from_lattice(const Lattice& lattice) {
    OracleSystem s;
    s.num_sites = lattice.num_sites();
    for (const auto& b : lattice.bonds()) s.bonds.push_back({b.from, b.to, b.kind});
    for (const auto& p : lattice.plaquettes()) s.hexagons.push_back(p.sites);
    validate(s);
    return s;
}

void validate(const OracleSystem& system, std::size_t max_sites) {
    if (system.num_sites == 0) throw ConfigError("oracle system has no sites");
    if (system.num_sites > max_sites)
        throw ConfigError("oracle system has " + std::to_string(system.num_sites) + " sites; limit is " +
                          std::to_string(max_sites));
    for (const auto& b : system.bonds) {
        if (b.i >= system.num_sites || b.j >= system.num_sites)
            throw ConfigError("bond references absent site");
        if (b.i == b.j) throw ConfigError("bond joins a site to itself");
    }
    for (const auto& h : system.hexagons)
        for (std::size_t k = 0; k < 6; ++k)
            if (bond_lookup(system, h[k], h[(k + 1) % 6]) == system.bonds.size())
                throw ConfigError("hexagon edge is not a bond of the system");
}

SparseOp build_hamiltonian(const OracleSystem& system, double J) {
    validate(system);
    const int nq = system.num_qubits();
    SparseOp h(static_cast<Eigen::Index>(system.dim()), static_cast<Eigen::Index>(system.dim()));
    for (const auto& b : system.bonds) {
        const char t = pauli_char(b.kind);
        for (char s : {'X', 'Z'}) {
            PauliWord w{{{tau_qubit(b.i), t}, {tau_qubit(b.j), t}, {sigma_qubit(b.i), s}, {sigma_qubit(b.j), s}},
                        cd{J / 4.0, 0.0}};
            h += pauli(nq, w);
        }
    }
    h.prune(cd{0.0, 0.0});
    return h;
}

JumpSet jump_operators(const OracleSystem& system, double gamma) {
    validate(system);
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be non-negative");
    JumpSet j;
    j.gamma = gamma;
    const double a = std::sqrt(gamma);
    for (std::size_t i = 0; i < system.num_sites; ++i)
        for (char s : {'X', 'Z'}) j.ops.push_back(pauli(system.num_qubits(), {{{sigma_qubit(i), s}}, cd{a, 0.0}}));
    return j;
}

Superoperator vectorize(const SparseOp& H, const JumpSet& jumps) {
    if (H.rows() != H.cols()) throw ConfigError("vectorize: Hamiltonian is not square");
    const Eigen::Index d = H.rows();
    SparseOp id(d, d);
    id.setIdentity();
    SparseOp Ht = H.transpose();
    SparseOp L = cd{0.0, -1.0} * (SparseOp(Eigen::kroneckerProduct(H, id)) - SparseOp(Eigen::kroneckerProduct(id, Ht)));
    for (const auto& op : jumps.ops) {
        if (op.rows() != d || op.cols() != d) throw ConfigError("vectorize: jump dimension mismatch");
        SparseOp conj = op.conjugate();
        SparseOp ldl = SparseOp(op.adjoint()) * op;
        SparseOp ltc = SparseOp(op.transpose()) * conj;
        L += SparseOp(Eigen::kroneckerProduct(op, conj));
        L -= 0.5 * (SparseOp(Eigen::kroneckerProduct(ldl, id)) + SparseOp(Eigen::kroneckerProduct(id, ltc)));
    }
    L.prune(cd{0.0, 0.0});
    return {static_cast<std::size_t>(d * d), L};
}

namespace {

// Ket-copy word of A: I ⊗ Aᵀ, with Yᵀ = −Y.
PauliWord ket_word(const PauliWord& a, int offset) {
    PauliWord w;
    w.coeff = a.coeff;
    for (const auto& [q, p] : a.factors) {
        w.factors.emplace_back(q + offset, p);
        if (p == 'Y') w.coeff = -w.coeff;
    }
    return w;
}

PauliWord concat(const PauliWord& a, const PauliWord& b) {
    PauliWord w;
    w.coeff = a.coeff * b.coeff;
    w.factors = a.factors;
    w.factors.insert(w.factors.end(), b.factors.begin(), b.factors.end());
    return w;
}

}  // namespace

SparseOp bilayer_hamiltonian(const OracleSystem& system, double J, double gamma) {
    validate(system, kMaxSuperoperatorSites);
    const int n2 = system.num_qubits();
    const int nq = 2 * n2;
    const Eigen::Index dim = Eigen::Index{1} << nq;
    SparseOp h(dim, dim);
    for (const auto& b : system.bonds) {
        const char t = pauli_char(b.kind);
        for (char s : {'X', 'Z'}) {
            PauliWord w{{{tau_qubit(b.i), t}, {tau_qubit(b.j), t}, {sigma_qubit(b.i), s}, {sigma_qubit(b.j), s}},
                        cd{J / 4.0, 0.0}};
            h += pauli(nq, w);
            PauliWord wt = ket_word(w, n2);
            wt.coeff = -wt.coeff;
            h += pauli(nq, wt);
        }
    }
    for (std::size_t i = 0; i < system.num_sites; ++i) {
        for (char s : {'X', 'Z'}) {
            PauliWord bra{{{sigma_qubit(i), s}}, cd{0.0, gamma}};
            PauliWord ket = ket_word(PauliWord{{{sigma_qubit(i), s}}, 1.0}, n2);
            h += pauli(nq, concat(bra, ket));
        }
    }
    h += pauli(nq, PauliWord{{}, cd{0.0, -2.0 * gamma * static_cast<double>(system.num_sites)}});
    h.prune(cd{0.0, 0.0});
    return h;
}

std::vector<cd> eigenvalues(const SparseOp& m) {
    if (m.rows() != m.cols()) throw ConfigError("eigenvalues: matrix is not square");
    if (m.rows() > 4096) throw ConfigError("eigenvalues: dimension above 4096");
    if (m.rows() == 0) return {};
    const auto dec = linalg::eig(Eigen::MatrixXcd(m), false);
    std::vector<cd> v(dec.values.data(), dec.values.data() + dec.values.size());
    std::sort(v.begin(), v.end(), [](cd a, cd b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); });
    return v;
}

std::vector<cd> single_site_spectrum(double gamma) {
    const auto s = OracleSystem::single_site();
    return eigenvalues(vectorize(build_hamiltonian(s, 0.0), jump_operators(s, gamma)).entries);
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho) {
    const Eigen::Index d = rho.rows();
    Eigen::VectorXcd v(d * rho.cols());
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < rho.cols(); ++j) v[i * rho.cols() + j] = rho(i, j);
    return v;
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) throw ConfigError("unvec: length is not a square");
    Eigen::MatrixXcd rho(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) rho(i, j) = v[i * d + j];
    return rho;
}

std::vector<Eigen::VectorXcd> evolve(const Superoperator& L, const Eigen::VectorXcd& rho0, double dt,
                                     std::size_t steps) {
    if (static_cast<std::size_t>(rho0.size()) != L.dim) throw ConfigError("evolve: state dimension mismatch");
    if (L.dim > 4096) throw ConfigError("evolve: dimension above 4096");
    if (!(dt >= 0.0)) throw ConfigError("evolve: dt must be non-negative");
    const Eigen::MatrixXcd step = (Eigen::MatrixXcd(L.entries) * cd{dt, 0.0}).exp();
    std::vector<Eigen::VectorXcd> out;
    out.reserve(steps + 1);
    out.push_back(rho0);
    for (std::size_t s = 0; s < steps; ++s) out.push_back(step * out.back());
    return out;
}

}  // namespace dhc::oracle

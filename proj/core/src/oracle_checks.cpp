#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "dhc/error.hpp"
#include "dhc/linalg.hpp"
#include "dhc/oracle.hpp"
#include "dhc/quadratic.hpp"

namespace dhc::oracle {

namespace {

char pauli_char(BondKind k) { return k == BondKind::x ? 'X' : k == BondKind::y ? 'Y' : 'Z'; }

BondKind edge_kind(const OracleSystem& s, std::size_t a, std::size_t b) {
    for (const auto& bond : s.bonds)
        if ((bond.i == a && bond.j == b) || (bond.i == b && bond.j == a)) return bond.kind;
    throw ConfigError("hexagon edge is not a bond of the system");
}

double norm(const SparseOp& m) { return m.norm(); }

SparseOp commutator(const SparseOp& a, const SparseOp& b) { return SparseOp(a * b) - SparseOp(b * a); }

// Lifts a single-layer word (qubits [0, 2n)) to the doubled space, bra or ket copy.
PauliWord on_copy(const PauliWord& w, int offset, bool ket) {
    PauliWord out;
    out.coeff = w.coeff;
    for (const auto& [q, p] : w.factors) {
        out.factors.emplace_back(q + offset, p);
        if (ket && p == 'Y') out.coeff = -out.coeff;
    }
    return out;
}

PauliWord plaquette_word(const OracleSystem& s, std::size_t h) {
    const auto& sites = s.hexagons.at(h);
    PauliWord w;
    for (std::size_t k = 0; k < 6; ++k) {
        const BondKind in = edge_kind(s, sites[(k + 5) % 6], sites[k]);
        const BondKind out = edge_kind(s, sites[k], sites[(k + 1) % 6]);
        if (in == out) throw ConfigError("hexagon uses one bond type twice at a site");
        const auto nu = static_cast<BondKind>(3 - static_cast<int>(in) - static_cast<int>(out));
        w.factors.emplace_back(tau_qubit(sites[k]), pauli_char(nu));
    }
    return w;
}

PauliWord vertical_word(const OracleSystem& s, std::size_t b) {
    const auto& bond = s.bonds.at(b);
    const char t = pauli_char(bond.kind);
    return PauliWord{{{sigma_qubit(bond.i), 'Y'}, {sigma_qubit(bond.j), 'Y'}, {tau_qubit(bond.i), t}, {tau_qubit(bond.j), t}},
                     1.0};
}

PauliWord concat(const PauliWord& a, const PauliWord& b) {
    PauliWord w{a.factors, a.coeff * b.coeff};
    w.factors.insert(w.factors.end(), b.factors.begin(), b.factors.end());
    return w;
}

cd trace(const SparseOp& m) {
    cd t{0.0, 0.0};
    for (Eigen::Index k = 0; k < m.outerSize(); ++k)
        for (SparseOp::InnerIterator it(m, k); it; ++it)
            if (it.row() == it.col()) t += it.value();
    return t;
}

// Greedy nearest matching of two multisets; largest matched distance.
double multiset_distance(const std::vector<cd>& a, const std::vector<cd>& b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (cd x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(x - b[j]);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

OracleSystem chain(std::size_t sites) {
    if (sites == 1) return OracleSystem::single_site();
    if (sites == 2) return OracleSystem::single_bond(BondKind::z);
    if (sites == 3) return OracleSystem{3, {{0, 1, BondKind::z}, {2, 1, BondKind::x}}, {}};
    throw ConfigError("verify supports 1 to 3 sites");
}

}  // namespace

CheckResult make_check(std::string name, double residual, double tolerance) {
    return {std::move(name), residual, tolerance, std::isfinite(residual) && residual <= tolerance};
}

SparseOp plaquette_operator(const OracleSystem& system, std::size_t hexagon) {
    validate(system);
    return pauli(system.num_qubits(), plaquette_word(system, hexagon));
}

SparseOp vertical_generator(const OracleSystem& system, std::size_t bond) {
    validate(system);
    return pauli(system.num_qubits(), vertical_word(system, bond));
}

SparseOp vertical_plaquette(const OracleSystem& system, std::size_t bond) {
    validate(system, kMaxSuperoperatorSites);
    const int n2 = system.num_qubits();
    const PauliWord o = vertical_word(system, bond);
    PauliWord w = concat(on_copy(o, 0, false), on_copy(o, n2, true));
    w.coeff = -w.coeff;
    return pauli(2 * n2, w);
}

std::vector<CheckResult> symmetry_check(const OracleSystem& system, double J, double gamma, Symmetry which,
                                        double tolerance) {
    validate(system);
    std::vector<CheckResult> out;
    const int nq = system.num_qubits();
    switch (which) {
        case Symmetry::strong_W: {
            if (system.hexagons.empty()) throw ConfigError("strong_W check needs a full hexagon");
            const SparseOp H = build_hamiltonian(system, J);
            const JumpSet jumps = jump_operators(system, gamma);
            for (std::size_t p = 0; p < system.hexagons.size(); ++p) {
                const SparseOp W = plaquette_operator(system, p);
                out.push_back(make_check("strong_W[" + std::to_string(p) + "].H", norm(commutator(W, H)), tolerance));
                double worst = 0.0;
                for (const auto& L : jumps.ops) worst = std::max(worst, norm(commutator(W, L)));
                out.push_back(make_check("strong_W[" + std::to_string(p) + "].jumps", worst, tolerance));
            }
            break;
        }
        case Symmetry::weak_Z2: {
            validate(system, kMaxSuperoperatorSites);
            if (system.bonds.empty()) throw ConfigError("weak_Z2 check needs at least one bond");
            const SparseOp Hb = bilayer_hamiltonian(system, J, gamma);
            const Superoperator L = vectorize(build_hamiltonian(system, J), jump_operators(system, gamma));
            for (std::size_t b = 0; b < system.bonds.size(); ++b) {
                const SparseOp V = vertical_plaquette(system, b);
                out.push_back(make_check("weak_Z2[" + std::to_string(b) + "].H_bilayer", norm(commutator(V, Hb)), tolerance));
                out.push_back(make_check("weak_Z2[" + std::to_string(b) + "].L", norm(commutator(V, L.entries)), tolerance));
            }
            break;
        }
        case Symmetry::weak_U1: {
            validate(system, kMaxSuperoperatorSites);
            const SparseOp Hb = bilayer_hamiltonian(system, J, gamma);
            const Superoperator L = vectorize(build_hamiltonian(system, J), jump_operators(system, gamma));
            SparseOp Q(Hb.rows(), Hb.cols());
            for (std::size_t i = 0; i < system.num_sites; ++i) {
                const PauliWord sy{{{sigma_qubit(i), 'Y'}}, 1.0};
                Q += pauli(2 * nq, on_copy(sy, 0, false));
                Q -= pauli(2 * nq, on_copy(sy, nq, true));
            }
            out.push_back(make_check("weak_U1.L", norm(commutator(Q, L.entries)), tolerance));
            out.push_back(make_check("weak_U1.H_bilayer", norm(commutator(Q, Hb)), tolerance));
            break;
        }
        case Symmetry::PT: {
            const SparseOp H = build_hamiltonian(system, J);
            const JumpSet jumps = jump_operators(system, gamma);
            PauliWord uw;
            for (std::size_t i = 0; i < system.num_sites; ++i) uw.factors.emplace_back(sigma_qubit(i), 'Y');
            const SparseOp U = pauli(nq, uw);
            const SparseOp Ud = U.adjoint();
            const SparseOp I = identity(nq);
            const double c_m = 2.0 * gamma;
            double anti = 0.0, closure = 0.0;
            for (const auto& L : jumps.ops) {
                const SparseOp Ld = L.adjoint();
                anti = std::max(anti, norm(SparseOp(L * Ld) + SparseOp(Ld * L) - c_m * I));
                closure = std::max(closure, norm(SparseOp(U * L * Ud) + Ld));
            }
            const SparseOp Hc = H.conjugate();
            out.push_back(make_check("PT.anticommutator", anti, tolerance));
            out.push_back(make_check("PT.hamiltonian", norm(SparseOp(U * Hc * Ud) - H), tolerance));
            out.push_back(make_check("PT.jump_closure", closure, tolerance));
            break;
        }
    }
    return out;
}

SteadyStates steady_states(const Superoperator& L, double rel_tol) {
    if (L.dim > 4096) throw ConfigError("steady_states: dimension above 4096");
    const Eigen::MatrixXcd dense(L.entries);
    const auto svd = linalg::svd(dense, true);
    SteadyStates s;
    s.singular_values = svd.values;
    const double smax = s.singular_values.size() ? s.singular_values[0] : 0.0;
    s.threshold = rel_tol * smax;
    const auto n = s.singular_values.size();
    for (Eigen::Index k = 0; k < n; ++k) {
        const double sv = s.singular_values[k];
        if (sv < s.threshold) ++s.kernel_dim;
        if (sv > s.threshold / 100.0 && sv < s.threshold * 100.0) s.ambiguous = true;
    }
    if (smax == 0.0) s.kernel_dim = static_cast<std::size_t>(n);
    const auto kdim = static_cast<Eigen::Index>(s.kernel_dim);
    const Eigen::MatrixXcd K = svd.V.rightCols(kdim);
    for (Eigen::Index c = 0; c < kdim; ++c) {
        Eigen::MatrixXcd x = unvec(K.col(c));
        const Eigen::VectorXcd xd = vec(x.adjoint());
        const double r = (xd - K * (K.adjoint() * xd)).norm();
        s.hermitian_residual = std::max(s.hermitian_residual, r);
        if (std::abs(x.trace()) > 1e-8) s.trace_normalizable = true;
        s.basis.push_back(std::move(x));
    }
    return s;
}

FluxPattern FluxPattern::uniform(const OracleSystem& system, Z2 w, Z2 v) {
    return {std::vector<Z2>(system.hexagons.size(), w), std::vector<Z2>(system.hexagons.size(), w),
            std::vector<Z2>(system.bonds.size(), v)};
}

namespace {

void check_pattern(const OracleSystem& system, const FluxPattern& pattern) {
    if (pattern.W.size() != system.hexagons.size() || pattern.W_tilde.size() != system.hexagons.size() ||
        pattern.V.size() != system.bonds.size())
        throw ConfigError("flux pattern does not match the system");
}

}  // namespace

FluxProjectors flux_projectors(const OracleSystem& system, const FluxPattern& pattern) {
    validate(system, kMaxSuperoperatorSites);
    check_pattern(system, pattern);
    const int nq = system.num_qubits();
    const SparseOp I = identity(2 * nq);
    FluxProjectors p{I, I};
    for (std::size_t h = 0; h < system.hexagons.size(); ++h) {
        const PauliWord w = plaquette_word(system, h);
        const SparseOp Wb = pauli(2 * nq, on_copy(w, 0, false));
        const SparseOp Wk = pauli(2 * nq, on_copy(w, nq, true));
        p.P_W = SparseOp(p.P_W * (0.5 * (I + double(pattern.W[h]) * Wb)));
        p.P_W = SparseOp(p.P_W * (0.5 * (I + double(pattern.W_tilde[h]) * Wk)));
    }
    for (std::size_t b = 0; b < system.bonds.size(); ++b)
        p.P_V = SparseOp(p.P_V * (0.5 * (I + double(pattern.V[b]) * vertical_plaquette(system, b))));
    p.P_W.prune(cd{0.0, 0.0});
    p.P_V.prune(cd{0.0, 0.0});
    return p;
}

SparseOp project_state(const OracleSystem& system, const FluxPattern& pattern, const SparseOp& rho) {
    validate(system);
    check_pattern(system, pattern);
    if (rho.rows() != static_cast<Eigen::Index>(system.dim()) || rho.cols() != rho.rows())
        throw ConfigError("project_state: density matrix has the wrong dimension");
    SparseOp r = rho;
    // V_p acts on vec(ρ) as ρ ↦ −OρO; W̃_p as ρ ↦ ρW.
    for (std::size_t b = 0; b < system.bonds.size(); ++b) {
        const SparseOp O = vertical_generator(system, b);
        r = 0.5 * (r - double(pattern.V[b]) * SparseOp(O * r * O));
    }
    for (std::size_t h = 0; h < system.hexagons.size(); ++h) {
        const SparseOp W = plaquette_operator(system, h);
        r = 0.5 * (r + double(pattern.W[h]) * SparseOp(W * r));
        r = 0.5 * (r + double(pattern.W_tilde[h]) * SparseOp(r * W));
    }
    r.prune(cd{0.0, 0.0}, 1e-14);
    const cd t = trace(r);
    if (std::abs(t) <= 1e-12 * std::max(1.0, rho.norm()))
        throw OracleError("flux projection of the initial state has zero trace; pattern is incompatible with it");
    return r / t;
}

double flux_residual(const OracleSystem& system, const FluxPattern& pattern, const SparseOp& rho0) {
    check_pattern(system, pattern);
    double worst = 0.0;
    for (std::size_t b = 0; b < system.bonds.size(); ++b) {
        const SparseOp O = vertical_generator(system, b);
        worst = std::max(worst, norm(SparseOp(-1.0 * SparseOp(O * rho0 * O)) - double(pattern.V[b]) * rho0));
    }
    for (std::size_t h = 0; h < system.hexagons.size(); ++h) {
        const SparseOp W = plaquette_operator(system, h);
        worst = std::max(worst, norm(SparseOp(W * rho0) - double(pattern.W[h]) * rho0));
        worst = std::max(worst, norm(SparseOp(rho0 * W) - double(pattern.W_tilde[h]) * rho0));
    }
    return worst;
}

CrosscheckReport sector_crosscheck(double J, double gamma, double tolerance) {
    CrosscheckReport rep;
    rep.tolerance = tolerance;
    rep.many_body = eigenvalues(bilayer_hamiltonian(OracleSystem::single_bond(BondKind::z), J, gamma));

    const Lattice bond(LatticeSpec{1, 1, Boundary::open});
    for (unsigned mask = 0; mask < 16; ++mask) {
        auto bit = [&](unsigned k) -> Z2 { return (mask >> k) & 1u ? Z2{-1} : Z2{1}; };
        GaugeConfig g{{bit(0)}, {bit(1)}, {bit(2), bit(3)}};
        const auto m = build_matrix(bond, g, J, gamma);
        const auto modes = eigendecompose(m).eigenvalues;
        for (unsigned occ = 0; occ < (1u << modes.size()); ++occ) {
            cd e = m.constant_shift;
            for (std::size_t k = 0; k < modes.size(); ++k)
                if ((occ >> k) & 1u) e += modes[k];
            rep.candidates.push_back(e);
        }
    }
    for (cd x : rep.many_body) {
        double best = std::numeric_limits<double>::infinity();
        for (cd c : rep.candidates) best = std::min(best, std::abs(x - c));
        rep.max_mismatch = std::max(rep.max_mismatch, best);
    }
    rep.pass = rep.max_mismatch <= tolerance;
    return rep;
}

std::vector<CheckResult> run_verification(std::size_t sites, double J, double gamma) {
    const OracleSystem sys = chain(sites);
    std::vector<CheckResult> out;
    const SparseOp H = build_hamiltonian(sys, J);
    const JumpSet jumps = jump_operators(sys, gamma);
    const Superoperator L = vectorize(H, jumps);
    const SparseOp Hb = bilayer_hamiltonian(sys, J, gamma);
    const auto n = static_cast<double>(sites);

    out.push_back(make_check("hamiltonian_hermitian", norm(SparseOp(H - SparseOp(H.adjoint()))), 1e-12));
    out.push_back(make_check("bilayer_equals_iL", norm(SparseOp(cd{0.0, 1.0} * L.entries) - Hb), 1e-12));
    out.push_back(make_check("trace_shift", std::abs(trace(L.entries) / double(L.dim) + 2.0 * gamma * n), 1e-12));
    Eigen::VectorXcd id_vec = vec(Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(sys.dim()),
                                                             static_cast<Eigen::Index>(sys.dim())));
    out.push_back(make_check("trace_preservation", (L.entries.adjoint() * id_vec).norm(), 1e-12));

    const auto lam = eigenvalues(L.entries);
    double max_re = -std::numeric_limits<double>::infinity();
    for (cd l : lam) max_re = std::max(max_re, l.real());
    out.push_back(make_check("spectral_stability", std::max(0.0, max_re), 1e-10));

    std::vector<cd> e_from_L;
    for (cd l : lam) e_from_L.push_back(cd{0.0, 1.0} * l);
    out.push_back(make_check("bilayer_spectrum_matches_iL", multiset_distance(e_from_L, eigenvalues(Hb)), 1e-10));

    // E = iλ with the shift removed pairs as (E, E*)
    const cd shift{0.0, -2.0 * gamma * n};
    std::vector<cd> traceless, mirrored;
    for (cd e : e_from_L) {
        traceless.push_back(e - shift);
        mirrored.push_back(std::conj(e - shift));
    }
    out.push_back(make_check("pt_pairing", multiset_distance(traceless, mirrored), 1e-8));

    for (auto which : {Symmetry::weak_U1, Symmetry::PT}) {
        auto c = symmetry_check(sys, J, gamma, which);
        out.insert(out.end(), c.begin(), c.end());
    }
    if (!sys.bonds.empty()) {
        auto c = symmetry_check(sys, J, gamma, Symmetry::weak_Z2);
        out.insert(out.end(), c.begin(), c.end());
    }
    {
        auto c = symmetry_check(OracleSystem::hexagon(), J, gamma, Symmetry::strong_W);
        out.insert(out.end(), c.begin(), c.end());
    }

    const auto ss = steady_states(L);
    auto ssc = make_check("steady_state_hermitian_closure", ss.hermitian_residual, 1e-8);
    ssc.pass = ssc.pass && !ss.ambiguous && ss.trace_normalizable;
    out.push_back(ssc);

    if (sites == 1) {
        std::vector<cd> expected;
        for (int k = 0; k < 4; ++k) expected.push_back(0.0);
        for (int k = 0; k < 8; ++k) expected.push_back(-2.0 * gamma);
        for (int k = 0; k < 4; ++k) expected.push_back(-4.0 * gamma);
        out.push_back(make_check("single_site_spectrum", multiset_distance(lam, expected), 1e-10));
    }
    if (sites == 2) {
        const auto rep = sector_crosscheck(J, gamma);
        out.push_back(make_check("sector_crosscheck", rep.max_mismatch, rep.tolerance));
    }
    return out;
}

std::string report_json(const std::vector<CheckResult>& checks) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks)
        arr.push_back({{"check_name", c.check_name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"pass", c.pass}});
    return arr.dump(2);
}

}  // namespace dhc::oracle

// oracle.hpp — brute-force many-body reference for tiny systems (1–3 sites, 6 for operator checks)

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "dhc/gauge.hpp"
#include "dhc/lattice.hpp"

namespace dhc::oracle {

using cd = std::complex<double>;
using SparseOp = Eigen::SparseMatrix<cd>;

inline constexpr std::size_t kMaxSuperoperatorSites = 3;
inline constexpr std::size_t kMaxOperatorSites = 6;

/// Per site two qubits, σ at 2i and τ at 2i+1; qubit 0 is the most significant bit.
inline int sigma_qubit(std::size_t site) { return static_cast<int>(2 * site); }
inline int tau_qubit(std::size_t site) { return static_cast<int>(2 * site + 1); }

/// Pauli word as (qubit, 'I'|'X'|'Y'|'Z') factors times a coefficient.
struct PauliWord {
    std::vector<std::pair<int, char>> factors;
    cd coeff{1.0, 0.0};
};

SparseOp pauli(int num_qubits, const PauliWord& word);
SparseOp identity(int num_qubits);

struct OracleBond {
    std::size_t i = 0;
    std::size_t j = 0;
    BondKind kind = BondKind::z;
};

struct OracleSystem {
    std::size_t num_sites = 0;
    std::vector<OracleBond> bonds;
    std::vector<std::array<std::size_t, 6>> hexagons;  // cyclic site order

    int num_qubits() const { return static_cast<int>(2 * num_sites); }
    std::size_t dim() const { return std::size_t{1} << (2 * num_sites); }

    static OracleSystem single_site();
    static OracleSystem single_bond(BondKind kind = BondKind::z);
    /// Sites 0..5 around one hexagon; bonds 0-1 x, 1-2 y, 2-3 z, 3-4 x, 4-5 y, 5-0 z.
    static OracleSystem hexagon();
    static OracleSystem from_lattice(const Lattice& lattice);
};

/// Throws ConfigError for absent sites, self bonds, hexagons whose edges are not
/// bonds, or more than `max_sites` sites.
void validate(const OracleSystem& system, std::size_t max_sites = kMaxOperatorSites);

/// (J/4) Σ_⟨ij⟩λ τ^λ_i τ^λ_j (σ^x_i σ^x_j + σ^z_i σ^z_j)
SparseOp build_hamiltonian(const OracleSystem& system, double J);

struct JumpSet {
    std::vector<SparseOp> ops;  // √γ σ^x_i, √γ σ^z_i per site
    double gamma = 0.0;
};

JumpSet jump_operators(const OracleSystem& system, double gamma);

/// Superoperator on row-major vectorized operators, vec(ρ)[i·d + j] = ρ_ij.
struct Superoperator {
    std::size_t dim = 0;  // d²
    SparseOp entries;
};

/// L = −i(H⊗I − I⊗Hᵀ) + Σ_m [L_m⊗L_m* − ½(L_m†L_m⊗I + I⊗L_mᵀL_m*)], by Kronecker products.
Superoperator vectorize(const SparseOp& H, const JumpSet& jumps);

/// The doubled-space non-Hermitian Hamiltonian (equal to iL), assembled directly
/// from Pauli words on 4n qubits: bra copy first, ket copy with Ã = I ⊗ Aᵀ.
SparseOp bilayer_hamiltonian(const OracleSystem& system, double J, double gamma);

/// Dense eigenvalues sorted by (Re, Im). Throws ConfigError above 4096.
std::vector<cd> eigenvalues(const SparseOp& m);

/// All 16 Liouvillian eigenvalues of one isolated site under dephasing.
std::vector<cd> single_site_spectrum(double gamma);

struct CheckResult {
    std::string check_name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

CheckResult make_check(std::string name, double residual, double tolerance);

enum class Symmetry { strong_W, weak_Z2, weak_U1, PT };

/// Residual norms (Frobenius):
///   strong_W  ‖[W_p, H]‖, ‖[W_p, L_m]‖ per hexagon
///   weak_Z2   ‖[V_p, H_bilayer]‖ per bond (n ≤ 3)
///   weak_U1   ‖[Q, L]‖ and ‖[Q, H_bilayer]‖ with Q = Σ σ^y_i − σ̃^y_i (n ≤ 3)
///   PT        ‖{L_m, L_m†} − 2γ‖, ‖U H* U† − H‖, ‖U L_m U† + L_m†‖ with U = Π σ^y
/// Throws ConfigError when the check does not fit the system.
std::vector<CheckResult> symmetry_check(const OracleSystem& system, double J, double gamma, Symmetry which,
                                        double tolerance = 1e-12);

/// Hexagon flux in spin language, Π_i τ_i^{ν_i} with ν_i the bond type not on the hexagon at site i.
SparseOp plaquette_operator(const OracleSystem& system, std::size_t hexagon);
/// σ^y_i σ^y_j τ^λ_i τ^λ_j for a bond; its doubled-space vertical plaquette is −O ⊗ Oᵀ.
SparseOp vertical_generator(const OracleSystem& system, std::size_t bond);
SparseOp vertical_plaquette(const OracleSystem& system, std::size_t bond);

struct SteadyStates {
    std::size_t kernel_dim = 0;
    std::vector<Eigen::MatrixXcd> basis;  // reshaped to d × d
    Eigen::VectorXd singular_values;      // descending
    double threshold = 0.0;
    bool ambiguous = false;          // singular values within a factor 100 of the threshold
    double hermitian_residual = 0.0;  // distance of basis adjoints from the kernel span
    bool trace_normalizable = false;
};

/// Kernel by SVD; values below rel_tol·σ_max count as zero.
SteadyStates steady_states(const Superoperator& L, double rel_tol = 1e-8);

/// Labels for the projections: per hexagon W, W̃ and per bond V (all ±1).
struct FluxPattern {
    std::vector<Z2> W;
    std::vector<Z2> W_tilde;
    std::vector<Z2> V;

    static FluxPattern uniform(const OracleSystem& system, Z2 w, Z2 v);
};

/// Doubled-space P_W = Π (1 + w W_p)/2 (1 + w̃ W̃_p)/2 and P_V = Π (1 + s V_p)/2. n ≤ 3.
struct FluxProjectors {
    SparseOp P_W;
    SparseOp P_V;
};
FluxProjectors flux_projectors(const OracleSystem& system, const FluxPattern& pattern);

/// ρ0 = P_W P_V(ρ) / Tr(…) evaluated on operators (n ≤ 6). Throws OracleError when
/// the projection has zero trace.
SparseOp project_state(const OracleSystem& system, const FluxPattern& pattern, const SparseOp& rho);

/// Largest deviation of ρ0 from the declared labels: W ρ0 − w ρ0, ρ0 W − w̃ ρ0, −Oρ0O − s ρ0.
double flux_residual(const OracleSystem& system, const FluxPattern& pattern, const SparseOp& rho0);

struct CrosscheckReport {
    std::vector<cd> many_body;   // spectrum of the 256-dim bilayer generator
    std::vector<cd> candidates;  // union over gauge sectors of subset sums plus the shift
    double max_mismatch = 0.0;   // worst distance from a many-body value to its nearest candidate
    double tolerance = 1e-8;
    bool pass = false;
};

/// Single z bond: every many-body eigenvalue must appear among the free-fermion
/// sector energies of the 16 gauge choices (u, ũ, v_0, v_1).
CrosscheckReport sector_crosscheck(double J, double gamma, double tolerance = 1e-8);

Eigen::VectorXcd vec(const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v);

/// States at t = 0, dt, ..., steps·dt by repeated application of exp(L dt).
std::vector<Eigen::VectorXcd> evolve(const Superoperator& L, const Eigen::VectorXcd& rho0, double dt,
                                     std::size_t steps);

/// Standard check bundle for the CLI verify command on an n-site chain of bonds (n ≤ 3),
/// plus the hexagon strong-symmetry checks.
std::vector<CheckResult> run_verification(std::size_t sites, double J, double gamma);

/// [{check_name, residual, tolerance, pass}, ...]
std::string report_json(const std::vector<CheckResult>& checks);

}  // namespace dhc::oracle

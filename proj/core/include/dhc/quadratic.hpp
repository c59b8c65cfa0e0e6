// quadratic.hpp — single-particle non-Hermitian generator of a fixed gauge sector

#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dhc/gauge.hpp"
#include "dhc/lattice.hpp"
#include "dhc/thresholds.hpp"

namespace dhc {

using cd = std::complex<double>;

/// Bilinear form of the bilayer fermion problem: H = f† M f + constant_shift.
///
/// Basis: f_0..f_{N-1} then f̃_0..f̃_{N-1}, site-ordered. Blocks:
///   f–f    (iJ/2) u_ij on (i∈A, j∈B), −(iJ/2) u_ij on (j, i)
///   f̃–f̃   the same with −ũ
///   f–f̃    +2γ v_i on (i, ĩ), −2γ v_i on (ĩ, i)
struct SingleParticleMatrix {
    std::size_t num_sites = 0;
    std::size_t dim = 0;  // 2 * num_sites
    Eigen::MatrixXcd entries;
    double J = 0.0;
    double gamma = 0.0;
    GaugeConfig gauge;
    cd constant_shift;  // −2iγN

    /// D⁻¹ M D / i with D = diag(1, i): a real matrix [[J/2 S_u, 2γV], [2γV, −J/2 S_ũ]].
    Eigen::MatrixXd real_form() const;
};

SingleParticleMatrix build_matrix(const Lattice& lattice, const GaugeConfig& g, double J, double gamma);

enum class ModeClass { zero, real, imaginary, complex };
const char* to_string(ModeClass c);

struct EigenOptions {
    bool vectors = false;
    std::size_t max_dim = 8192;
    double tol_class = 1e-9;  // relative to the spectral radius
};

struct SpectrumResult {
    std::vector<cd> eigenvalues;              // sorted by (Re, Im)
    std::vector<cd> liouvillian_eigenvalues;  // λ = −iE per mode
    std::vector<ModeClass> classification;
    double tol = 0.0;    // absolute cutoff used by the classification
    double scale = 0.0;  // spectral radius
    std::optional<Eigen::MatrixXcd> right_vectors;
    std::optional<double> defect_indicator;  // min singular value of the normalized eigenvector matrix
};

/// Sorts, converts and classifies a raw eigenvalue list.
SpectrumResult make_spectrum(std::vector<cd> eigenvalues, double tol_class = 1e-9);

/// Full eigendecomposition. The real similarity form is diagonalized, so
/// conjugate symmetry of the real factor is exact.
SpectrumResult eigendecompose(const SingleParticleMatrix& m, const EigenOptions& options = {});

/// Generic dense path for an arbitrary complex matrix.
SpectrumResult eigendecompose(const Eigen::MatrixXcd& m, const EigenOptions& options = {});

enum class PTPhase { preserving, mixed, broken };
const char* to_string(PTPhase p);

struct PTClassification {
    double fraction_broken = 0.0;
    PTPhase phase = PTPhase::preserving;
    BrokenCount counts;
    std::size_t zero_modes = 0;
};

/// Broken modes are those with a nonzero imaginary part (classes imaginary and complex).
PTClassification classify_pt(const SpectrumResult& s);

/// Liouvillian shift −2γN, i.e. −i times the constant term.
cd liouvillian_shift(const SingleParticleMatrix& m);

/// Smallest nonzero |Re λ| with λ = −iE + shift; 0 when no mode decays.
double liouvillian_gap(const SpectrumResult& s, cd shift, double zero_tol = 1e-10);

/// Real-space γ scan: the baseline is the zero-mode count of the γ = 0 generator.
ThresholdScan scan_thresholds(const Lattice& lattice, const GaugeConfig& g, double J, std::span<const double> grid,
                              const ThresholdOptions& options = {}, double tol_class = 1e-9);

/// re_E,im_E,re_lambda,im_lambda,class
void write_spectrum_csv(std::ostream& os, const SpectrumResult& s);

}  // namespace dhc

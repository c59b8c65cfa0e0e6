#include "dhc/quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "dhc/csv.hpp"
#include "dhc/error.hpp"
#include "dhc/linalg.hpp"
#include "dhc/parallel.hpp"

namespace dhc {

namespace {

constexpr cd kI{0.0, 1.0};

bool by_re_im(cd a, cd b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

ModeClass classify_one(cd e, double tol) {
    if (std::abs(e) <= tol) return ModeClass::zero;
    if (std::abs(e.imag()) <= tol) return ModeClass::real;
    if (std::abs(e.real()) <= tol) return ModeClass::imaginary;
    return ModeClass::complex;
}

// Sorts values (and vectors, if present) then fills the derived fields.
SpectrumResult finish(Eigen::VectorXcd values, Eigen::MatrixXcd vectors, const EigenOptions& options) {
    const auto n = static_cast<std::size_t>(values.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return by_re_im(values[a], values[b]); });
    std::vector<cd> sorted(n);
    for (std::size_t i = 0; i < n; ++i) sorted[i] = values[static_cast<Eigen::Index>(order[i])];
    SpectrumResult s = make_spectrum(std::move(sorted), options.tol_class);
    if (options.vectors) {
        Eigen::MatrixXcd v(vectors.rows(), vectors.cols());
        for (std::size_t i = 0; i < n; ++i) v.col(static_cast<Eigen::Index>(i)) = vectors.col(static_cast<Eigen::Index>(order[i]));
        s.defect_indicator = linalg::min_singular_value_normalized(v);
        s.right_vectors = std::move(v);
    }
    return s;
}

void check_dim(std::size_t dim, const EigenOptions& options) {
    if (dim > options.max_dim)
        throw ConfigError("matrix dimension " + std::to_string(dim) + " exceeds max_dim " +
                          std::to_string(options.max_dim));
}

}  // namespace

Eigen::MatrixXd SingleParticleMatrix::real_form() const {
    // Conjugating by D = diag(1, i) turns the f–f̃ block 2γv into 2iγv on both sides,
    // so every block of D⁻¹ M D carries a common factor i.
    const auto n = static_cast<Eigen::Index>(num_sites);
    Eigen::MatrixXd r(2 * n, 2 * n);
    r.topLeftCorner(n, n) = entries.topLeftCorner(n, n).imag();
    r.bottomRightCorner(n, n) = entries.bottomRightCorner(n, n).imag();
    r.topRightCorner(n, n) = entries.topRightCorner(n, n).real();
    r.bottomLeftCorner(n, n) = -entries.bottomLeftCorner(n, n).real();
    return r;
}

SingleParticleMatrix build_matrix(const Lattice& lattice, const GaugeConfig& g, double J, double gamma) {
    validate(lattice, g);
    if (!std::isfinite(J) || !std::isfinite(gamma)) throw ConfigError("J and gamma must be finite");
    if (gamma < 0.0) throw ConfigError("gamma must be non-negative");

    const std::size_t n = lattice.num_sites();
    const auto N = static_cast<Eigen::Index>(n);
    SingleParticleMatrix m;
    m.num_sites = n;
    m.dim = 2 * n;
    m.J = J;
    m.gamma = gamma;
    m.gauge = g;
    m.constant_shift = cd{0.0, -2.0 * gamma * static_cast<double>(n)};
    m.entries = Eigen::MatrixXcd::Zero(2 * N, 2 * N);

    const auto& bonds = lattice.bonds();
    for (std::size_t b = 0; b < bonds.size(); ++b) {
        const auto i = static_cast<Eigen::Index>(bonds[b].from);
        const auto j = static_cast<Eigen::Index>(bonds[b].to);
        const cd hop = kI * (J / 2.0) * static_cast<double>(g.u[b]);
        const cd hop_t = -kI * (J / 2.0) * static_cast<double>(g.u_tilde[b]);
        // += so that doubly connected pairs (L = 1 wraps) accumulate.
        m.entries(i, j) += hop;
        m.entries(j, i) -= hop;
        m.entries(N + i, N + j) += hop_t;
        m.entries(N + j, N + i) -= hop_t;
    }
    for (Eigen::Index i = 0; i < N; ++i) {
        const double c = 2.0 * gamma * static_cast<double>(g.v[static_cast<std::size_t>(i)]);
        m.entries(i, N + i) = c;
        m.entries(N + i, i) = -c;
    }
    return m;
}

const char* to_string(ModeClass c) {
    switch (c) {
        case ModeClass::zero: return "zero";
        case ModeClass::real: return "real";
        case ModeClass::imaginary: return "imaginary";
        case ModeClass::complex: return "complex";
    }
    return "?";
}

const char* to_string(PTPhase p) {
    switch (p) {
        case PTPhase::preserving: return "preserving";
        case PTPhase::mixed: return "mixed";
        case PTPhase::broken: return "broken";
    }
    return "?";
}

SpectrumResult make_spectrum(std::vector<cd> eigenvalues, double tol_class) {
    std::stable_sort(eigenvalues.begin(), eigenvalues.end(), by_re_im);
    SpectrumResult s;
    for (cd e : eigenvalues) s.scale = std::max(s.scale, std::abs(e));
    s.tol = tol_class * s.scale;
    s.liouvillian_eigenvalues.reserve(eigenvalues.size());
    s.classification.reserve(eigenvalues.size());
    for (cd e : eigenvalues) {
        s.liouvillian_eigenvalues.push_back(-kI * e);
        s.classification.push_back(classify_one(e, s.tol));
    }
    s.eigenvalues = std::move(eigenvalues);
    return s;
}

SpectrumResult eigendecompose(const SingleParticleMatrix& m, const EigenOptions& options) {
    check_dim(m.dim, options);
    if (m.dim == 0) return make_spectrum({}, options.tol_class);
    auto dec = linalg::eig(m.real_form(), options.vectors);
    Eigen::VectorXcd values = kI * dec.values;
    Eigen::MatrixXcd vectors;
    if (options.vectors) {
        // x = D y with D = diag(1, i), renormalized (D is unitary, so norms are kept).
        vectors = dec.vectors;
        const auto n = static_cast<Eigen::Index>(m.num_sites);
        vectors.bottomRows(n) *= kI;
    }
    return finish(std::move(values), std::move(vectors), options);
}

SpectrumResult eigendecompose(const Eigen::MatrixXcd& m, const EigenOptions& options) {
    if (m.rows() != m.cols()) throw ConfigError("eigendecompose needs a square matrix");
    check_dim(static_cast<std::size_t>(m.rows()), options);
    if (m.rows() == 0) return make_spectrum({}, options.tol_class);
    auto dec = linalg::eig(m, options.vectors);
    return finish(std::move(dec.values), std::move(dec.vectors), options);
}

PTClassification classify_pt(const SpectrumResult& s) {
    PTClassification c;
    c.counts.total = s.classification.size();
    for (ModeClass m : s.classification) {
        if (m == ModeClass::imaginary || m == ModeClass::complex) ++c.counts.broken;
        if (m == ModeClass::zero) ++c.zero_modes;
    }
    c.fraction_broken = c.counts.fraction();
    if (c.counts.broken == 0)
        c.phase = PTPhase::preserving;
    else if (c.counts.broken == c.counts.total)
        c.phase = PTPhase::broken;
    else
        c.phase = PTPhase::mixed;
    return c;
}

cd liouvillian_shift(const SingleParticleMatrix& m) { return -kI * m.constant_shift; }

double liouvillian_gap(const SpectrumResult& s, cd shift, double zero_tol) {
    if (s.liouvillian_eigenvalues.empty()) throw ConfigError("liouvillian_gap: empty spectrum");
    double gap = 0.0;
    bool found = false;
    for (cd l : s.liouvillian_eigenvalues) {
        const double r = std::abs((l + shift).real());
        if (r <= zero_tol) continue;
        if (!found || r < gap) gap = r;
        found = true;
    }
    return gap;
}

ThresholdScan scan_thresholds(const Lattice& lattice, const GaugeConfig& g, double J, std::span<const double> grid,
                              const ThresholdOptions& options, double tol_class) {
    EigenOptions eo;
    eo.tol_class = tol_class;
    eo.max_dim = std::max<std::size_t>(eo.max_dim, 2 * lattice.num_sites());
    const auto zero = classify_pt(eigendecompose(build_matrix(lattice, g, J, 0.0), eo));
    auto count = [&](double gamma) {
        return classify_pt(eigendecompose(build_matrix(lattice, g, J, gamma), eo)).counts;
    };
    return scan_thresholds(grid, count, zero.zero_modes, options);
}

void write_spectrum_csv(std::ostream& os, const SpectrumResult& s) {
    os << "re_E,im_E,re_lambda,im_lambda,class\n";
    for (std::size_t i = 0; i < s.eigenvalues.size(); ++i) {
        const cd e = s.eigenvalues[i];
        const cd l = s.liouvillian_eigenvalues[i];
        os << format_double(e.real()) << ',' << format_double(e.imag()) << ',' << format_double(l.real()) << ','
           << format_double(l.imag()) << ',' << to_string(s.classification[i]) << '\n';
    }
}

}  // namespace dhc

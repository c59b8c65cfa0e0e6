// Independent reference computations used only by the tests.

#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dhc/lattice.hpp"

namespace dhc::test {

using cd = std::complex<double>;

// Greedy nearest matching; largest distance between paired elements.
inline double multiset_distance(std::vector<cd> a, std::vector<cd> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    std::vector<bool> used(b.size(), false);
    double worst = 0.0;
    for (cd x : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (!used[j] && std::abs(x - b[j]) < best) {
                best = std::abs(x - b[j]);
                arg = j;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

// Σ over the three A→B bond vectors, read off lattice positions (minimum image).
inline cd delta_from_positions(const Lattice& lat, double kx, double ky) {
    const Vec2 a1 = lattice_vector_a1(), a2 = lattice_vector_a2();
    const std::size_t a = 0;  // site A(0,0)
    cd sum{0.0, 0.0};
    for (std::size_t b : lat.incident_bonds(a)) {
        const auto& bond = lat.bonds()[b];
        const Vec2 pa = lat.position(bond.from), pb = lat.position(bond.to);
        double dx = pb.x - pa.x, dy = pb.y - pa.y;
        double best = 1e9, bx = 0, by = 0;
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j) {
                const double x = dx + i * lat.spec().L1 * a1.x + j * lat.spec().L2 * a2.x;
                const double y = dy + i * lat.spec().L1 * a1.y + j * lat.spec().L2 * a2.y;
                if (std::hypot(x, y) < best) {
                    best = std::hypot(x, y);
                    bx = x;
                    by = y;
                }
            }
        sum += std::exp(cd{0.0, kx * bx + ky * by});
    }
    return sum;
}

// Dense Pauli string from explicit 2×2 Kronecker products, qubit 0 leftmost.
inline Eigen::MatrixXcd dense_pauli(const std::string& letters) {
    Eigen::Matrix2cd I, X, Y, Z;
    I << 1, 0, 0, 1;
    X << 0, 1, 1, 0;
    Y << 0, cd(0, -1), cd(0, 1), 0;
    Z << 1, 0, 0, -1;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (char c : letters) {
        const Eigen::Matrix2cd& p = c == 'X' ? X : c == 'Y' ? Y : c == 'Z' ? Z : I;
        Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = m(i, j) * p;
        m = next;
    }
    return m;
}

inline std::vector<cd> to_vector(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace dhc::test

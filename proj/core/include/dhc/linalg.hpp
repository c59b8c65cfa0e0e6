#pragma once

#include <Eigen/Dense>

namespace dhc::linalg {

struct EigenDecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;  // right eigenvectors, unit columns; empty unless requested
};

// Dense nonsymmetric eigensolvers (Hessenberg reduction + shifted QR, LAPACK
// xGEEV). Throw NumericalError when QR fails to converge.
EigenDecomposition eig(const Eigen::MatrixXd& a, bool vectors);
EigenDecomposition eig(const Eigen::MatrixXcd& a, bool vectors);

struct SingularValueDecomposition {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXcd V;      // right singular vectors as columns; empty unless requested
};

// LAPACK xGESDD. Null vectors stay accurate when the zero singular value is
// highly degenerate (Eigen's divide-and-conquer SVD loses them to ~1e-7).
SingularValueDecomposition svd(const Eigen::MatrixXcd& a, bool right_vectors);

// Smallest singular value of a matrix after normalizing its columns; near zero
// when eigenvectors have coalesced.
double min_singular_value_normalized(const Eigen::MatrixXcd& vectors);

}  // namespace dhc::linalg

#include "dhc/linalg.hpp"

#include <algorithm>
#include <complex>
#include <string>
#include <vector>

#define lapack_complex_double std::complex<double>
#define lapack_complex_float std::complex<float>
#include <lapacke.h>

#include "dhc/error.hpp"

namespace dhc::linalg {

namespace {

void check_info(lapack_int info, const char* routine, Eigen::Index n) {
    if (info < 0) {
        throw NumericalError(std::string(routine) + ": invalid argument " + std::to_string(-info));
    }
    if (info > 0) {
        // xHSEQR allows 30 * max(10, n) QR sweeps before giving up.
        throw NumericalError(std::string(routine) + ": QR iteration did not converge within the budget of " +
                             std::to_string(30 * std::max<Eigen::Index>(10, n)) + " sweeps (" +
                             std::to_string(info) + " eigenvalues unconverged, n = " + std::to_string(n) + ")");
    }
}

}  // namespace

EigenDecomposition eig(const Eigen::MatrixXd& a, bool vectors) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw NumericalError("eig: matrix must be square");
    EigenDecomposition out;
    out.values.resize(n);
    if (n == 0) return out;

    Eigen::MatrixXd work = a;  // column-major, overwritten
    std::vector<double> wr(n), wi(n);
    Eigen::MatrixXd vr;
    if (vectors) vr.resize(n, n);
    const lapack_int info = LAPACKE_dgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', static_cast<lapack_int>(n),
                                          work.data(), static_cast<lapack_int>(n), wr.data(), wi.data(), nullptr, 1,
                                          vectors ? vr.data() : nullptr, static_cast<lapack_int>(vectors ? n : 1));
    check_info(info, "dgeev", n);
    for (Eigen::Index i = 0; i < n; ++i) out.values[i] = {wr[i], wi[i]};
    if (vectors) {
        out.vectors.resize(n, n);
        for (Eigen::Index j = 0; j < n; ++j) {
            if (wi[j] == 0.0) {
                out.vectors.col(j) = vr.col(j).cast<std::complex<double>>();
            } else {
                // Conjugate pair stored as (re, im) in columns j, j+1.
                const Eigen::VectorXcd v = vr.col(j).cast<std::complex<double>>() +
                                           std::complex<double>(0, 1) * vr.col(j + 1).cast<std::complex<double>>();
                out.vectors.col(j) = v;
                out.vectors.col(j + 1) = v.conjugate();
                ++j;
            }
        }
        out.vectors.colwise().normalize();
    }
    return out;
}

EigenDecomposition eig(const Eigen::MatrixXcd& a, bool vectors) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw NumericalError("eig: matrix must be square");
    EigenDecomposition out;
    out.values.resize(n);
    if (n == 0) return out;

    Eigen::MatrixXcd work = a;
    if (vectors) out.vectors.resize(n, n);
    const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', static_cast<lapack_int>(n),
                                          work.data(), static_cast<lapack_int>(n), out.values.data(), nullptr, 1,
                                          vectors ? out.vectors.data() : nullptr,
                                          static_cast<lapack_int>(vectors ? n : 1));
    check_info(info, "zgeev", n);
    if (vectors) out.vectors.colwise().normalize();
    return out;
}

SingularValueDecomposition svd(const Eigen::MatrixXcd& a, bool right_vectors) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    SingularValueDecomposition out;
    const Eigen::Index k = std::min(m, n);
    out.values.resize(k);
    if (k == 0) return out;

    // Divide and conquer; with jobz = 'O' and m >= n the left vectors overwrite `work`.
    Eigen::MatrixXcd work = a;
    Eigen::MatrixXcd vt;
    Eigen::MatrixXcd u;
    char jobz = 'N';
    if (right_vectors) {
        vt.resize(n, n);
        if (m >= n) {
            jobz = 'O';
        } else {
            jobz = 'A';
            u.resize(m, m);
        }
    }
    const lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, jobz, static_cast<lapack_int>(m), static_cast<lapack_int>(n),
                                           work.data(), static_cast<lapack_int>(m), out.values.data(),
                                           jobz == 'A' ? u.data() : nullptr, static_cast<lapack_int>(m),
                                           right_vectors ? vt.data() : nullptr,
                                           static_cast<lapack_int>(right_vectors ? n : 1));
    if (info < 0) throw NumericalError("zgesdd: invalid argument " + std::to_string(-info));
    if (info > 0) throw NumericalError("zgesdd: singular value iteration did not converge");
    if (right_vectors) out.V = vt.adjoint();
    return out;
}

double min_singular_value_normalized(const Eigen::MatrixXcd& vectors) {
    if (vectors.size() == 0) return 0.0;
    Eigen::MatrixXcd v = vectors;
    v.colwise().normalize();
    return svd(v, false).values.minCoeff();
}

}  // namespace dhc::linalg

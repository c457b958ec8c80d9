#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "aadeim/errors.hpp"

namespace aadeim {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws naming the first offending entry. Factorizations call this on entry;
// model code is expected to hand over finite data in the first place.
inline void require_finite(const Matrix& a, const std::string& op) {
    if (a.allFinite()) return;
    for (Eigen::Index j = 0; j < a.cols(); ++j)
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            if (!std::isfinite(a(i, j)))
                throw numeric_error(op + ": non-finite entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") = " + std::to_string(a(i, j)));
}

struct SvdResult {
    Matrix u;               // orthonormal columns
    Vector singular_values; // descending, nonnegative
    Matrix v;               // orthonormal columns; a = u * diag(s) * v^T
};

inline SvdResult thin_svd(const Matrix& a) {
    require_finite(a, "thin_svd");
    Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

// Column pivot order of a Householder QR with column pivoting, MATLAB
// qr(A,'vector') convention: (A * P).col(k) = A.col(order[k]). Pivots are
// chosen greedily by largest remaining column norm; exact ties resolve to the
// lowest column index.
inline std::vector<int> pivoted_qr(const Matrix& a) {
    require_finite(a, "pivoted_qr");
    Eigen::ColPivHouseholderQR<Matrix> qr(a);
    const auto& idx = qr.colsPermutation().indices();
    return {idx.data(), idx.data() + idx.size()};
}

// Solves A X = B for square A. Refuses matrices with estimated condition
// number above 1e12: downstream this guards P^T U, which can degrade during
// basis adaptation, and a loud failure with context beats a silent blow-up.
inline Matrix solve_linear(const Matrix& a, const Matrix& b,
                           const std::string& context = "solve_linear") {
    require_finite(a, context);
    if (a.rows() != a.cols())
        throw numeric_error(context + ": matrix is " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()) + ", expected square");
    Eigen::PartialPivLU<Matrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12))
        throw numeric_error(context + ": matrix numerically singular (rcond = " +
                            std::to_string(rcond) + ")");
    return lu.solve(b);
}

// Moore-Penrose pseudo-inverse; singular values below 1e-12 * s_max count as zero.
inline Matrix pseudo_inverse(const Matrix& a) {
    const SvdResult svd = thin_svd(a);
    const double smax = svd.singular_values.size() > 0 ? svd.singular_values(0) : 0.0;
    const double cutoff = 1e-12 * smax;
    Vector inv = Vector::Zero(svd.singular_values.size());
    for (Eigen::Index i = 0; i < inv.size(); ++i)
        if (svd.singular_values(i) > cutoff) inv(i) = 1.0 / svd.singular_values(i);
    return svd.v * inv.asDiagonal() * svd.u.transpose();
}

// Thin orthonormal factor of a (QR-based).
inline Matrix orthonormalize(const Matrix& a) {
    require_finite(a, "orthonormalize");
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix q = Matrix::Identity(a.rows(), a.cols());
    q.applyOnTheLeft(qr.householderQ());
    return q;
}

inline Matrix gather_rows(const Matrix& a, std::span<const int> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.row(static_cast<Eigen::Index>(r)) = a.row(rows[r]);
    return out;
}

// Count of singular values above 1e-12 * s_max.
inline int numerical_rank(const Vector& singular_values) {
    if (singular_values.size() == 0) return 0;
    const double cutoff = 1e-12 * singular_values(0);
    int r = 0;
    for (Eigen::Index i = 0; i < singular_values.size(); ++i)
        if (singular_values(i) > cutoff && singular_values(i) > 0.0) ++r;
    return r;
}

} // namespace aadeim

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "aadeim/linalg.hpp"
#include "aadeim/model.hpp"

namespace aadeim {

// DEIM pair (U, P): basis with its interpolation points.
struct ReducedBasis {
    Matrix u;                // N x n, orthonormal columns
    std::vector<int> points; // n distinct row indices

    int full_dim() const { return static_cast<int>(u.rows()); }
    int reduced_dim() const { return static_cast<int>(u.cols()); }
    Matrix u_at_points() const { return gather_rows(u, points); }
};

inline void validate_basis(const ReducedBasis& basis, bool check_orthonormal = true) {
    const int n = basis.reduced_dim();
    const int big_n = basis.full_dim();
    if (static_cast<int>(basis.points.size()) != n)
        throw std::invalid_argument("reduced basis: " + std::to_string(basis.points.size()) +
                                    " interpolation points for dimension " + std::to_string(n));
    std::vector<int> seen(static_cast<std::size_t>(big_n), 0);
    for (int p : basis.points) {
        if (p < 0 || p >= big_n)
            throw std::invalid_argument("reduced basis: point " + std::to_string(p) +
                                        " out of range");
        if (seen[static_cast<std::size_t>(p)]++)
            throw std::invalid_argument("reduced basis: duplicate point " + std::to_string(p));
    }
    Eigen::PartialPivLU<Matrix> lu(basis.u_at_points());
    if (!(lu.rcond() > 1e-12))
        throw numeric_error("reduced basis: P^T U numerically singular");
    if (check_orthonormal) {
        const double dev = (basis.u.transpose() * basis.u -
                            Matrix::Identity(n, n))
                               .norm();
        if (!(dev < 1e-10 * std::sqrt(static_cast<double>(n)) + 1e-10))
            throw numeric_error("reduced basis: columns not orthonormal (deviation " +
                                std::to_string(dev) + ")");
    }
}

struct PodResult {
    Matrix u;               // leading n left singular vectors
    Vector singular_values; // all singular values of the snapshot matrix
    bool rank_deficient;    // n exceeded the numerical rank
};

// POD basis of dimension n; the squared projection error of the snapshots
// equals the tail sum of squared singular values.
inline PodResult pod_basis(const Matrix& snapshots, int n) {
    if (n < 1 || n > std::min(snapshots.rows(), snapshots.cols()))
        throw std::invalid_argument("pod_basis: n = " + std::to_string(n) +
                                    " not in [1, min(N, M)] for " +
                                    std::to_string(snapshots.rows()) + "x" +
                                    std::to_string(snapshots.cols()) + " snapshots");
    SvdResult svd = thin_svd(snapshots);
    return {svd.u.leftCols(n), svd.singular_values, numerical_rank(svd.singular_values) < n};
}

// QDEIM interpolation points: the first n column pivots of a pivoted QR of U^T.
inline std::vector<int> qdeim_points(const Matrix& u) {
    std::vector<int> pivots = pivoted_qr(u.transpose());
    pivots.resize(static_cast<std::size_t>(u.cols()));
    Eigen::PartialPivLU<Matrix> lu(gather_rows(u, pivots));
    if (!(lu.rcond() > 1e-12))
        throw numeric_error("qdeim_points: selected points give singular P^T U");
    return pivots;
}

// DEIM approximation U (P^T U)^{-1} P^T y; interpolates y exactly at the points.
inline Vector deim_project(const ReducedBasis& basis, const Vector& y) {
    Vector yp(basis.reduced_dim());
    for (std::size_t i = 0; i < basis.points.size(); ++i)
        yp(static_cast<Eigen::Index>(i)) = y(basis.points[i]);
    return basis.u * solve_linear(basis.u_at_points(), yp, "deim_project: P^T U");
}

struct DeimResidual {
    Matrix coefficients; // C = (P^T U)^{-1} P^T F,  n x w
    Matrix residual;     // R = U C - F,             N x w
};

inline DeimResidual deim_residual(const ReducedBasis& basis, const Matrix& f) {
    Matrix c = solve_linear(basis.u_at_points(), gather_rows(f, basis.points),
                            "deim_residual: P^T U");
    return {c, basis.u * c - f};
}

// Per-run instrumentation of the reduced path; see the driver's cost contract.
struct ReducedSolveStats {
    long linear_solves = 0;
    int max_solve_dim = 0;
};

// Newton on the n-dimensional system (P^T U)^{-1} P^T f(U q) = q_prev. The
// reduced Jacobian (P^T U)^{-1} P^T J(U q) U is assembled from the Jacobian
// rows at the interpolation points; the state is reconstructed only at the
// stencil columns of those points, so no O(N x N) objects appear.
class ReducedStepper {
public:
    ReducedStepper(const FullModel& model, ReducedBasis basis) : model_(&model) {
        set_basis(std::move(basis));
    }

    void set_basis(ReducedBasis basis) {
        basis_ = std::move(basis);
        up_lu_.compute(basis_.u_at_points());
        if (!(up_lu_.rcond() > 1e-12))
            throw numeric_error("reduced step: P^T U numerically singular");
        std::vector<int> cols;
        gather_cols_.clear();
        for (int p : basis_.points) {
            model_->stencil_cols(p, cols);
            gather_cols_.insert(gather_cols_.end(), cols.begin(), cols.end());
        }
        std::sort(gather_cols_.begin(), gather_cols_.end());
        gather_cols_.erase(std::unique(gather_cols_.begin(), gather_cols_.end()),
                           gather_cols_.end());
        u_gather_ = gather_rows(basis_.u, gather_cols_);
        scratch_state_ = Vector::Zero(model_->dim());
    }

    const ReducedBasis& basis() const { return basis_; }

    Vector step(const Vector& q_reduced_prev, double t, const NewtonConfig& nc,
                long step_index, PhaseClock* clock = nullptr,
                ReducedSolveStats* stats = nullptr) {
        const int n = basis_.reduced_dim();
        Vector qt = q_reduced_prev;
        Vector fp(n), g(n);
        Matrix jp_u(n, n);
        for (int it = 0; it < nc.iterations; ++it) {
            {
                PhaseScope ps(clock, PhaseClock::Rhs);
                const Vector local = u_gather_ * qt;
                for (std::size_t i = 0; i < gather_cols_.size(); ++i)
                    scratch_state_(gather_cols_[i]) = local(static_cast<Eigen::Index>(i));
                model_->evaluate_rows(scratch_state_, t, basis_.points, fp);
            }
            {
                PhaseScope ps(clock, PhaseClock::Jacobian);
                model_->jacobian_rows(scratch_state_, t, basis_.points, rows_);
                jp_u.setZero();
                for (int r = 0; r < n; ++r)
                    for (int e = rows_.offsets[static_cast<std::size_t>(r)];
                         e < rows_.offsets[static_cast<std::size_t>(r) + 1]; ++e)
                        jp_u.row(r) += rows_.vals[static_cast<std::size_t>(e)] *
                                       basis_.u.row(rows_.cols[static_cast<std::size_t>(e)]);
            }
            {
                PhaseScope ps(clock, PhaseClock::Solve);
                g = up_lu_.solve(fp) - q_reduced_prev;
                qt -= nc.step_size *
                      Eigen::PartialPivLU<Matrix>(up_lu_.solve(jp_u)).solve(g);
            }
            if (stats) {
                stats->linear_solves += 2;
                stats->max_solve_dim = std::max(stats->max_solve_dim, n);
            }
            if (!qt.allFinite())
                throw divergence_error("reduced Newton iterate non-finite", step_index,
                                       "solve");
        }
        return qt;
    }

private:
    const FullModel* model_;
    ReducedBasis basis_;
    Eigen::PartialPivLU<Matrix> up_lu_;
    std::vector<int> gather_cols_;
    Matrix u_gather_;
    Vector scratch_state_;
    StencilRows rows_;
};

inline Vector solve_reduced_step(const FullModel& model, const ReducedBasis& basis,
                                 const Vector& q_reduced_prev, double t,
                                 const NewtonConfig& nc = {}) {
    ReducedStepper stepper(model, basis);
    return stepper.step(q_reduced_prev, t, nc, -1);
}

} // namespace aadeim

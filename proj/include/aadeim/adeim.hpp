#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "aadeim/linalg.hpp"
#include "aadeim/rng.hpp"
#include "aadeim/rom.hpp"

namespace aadeim {

// Sampling points s_1..s_m: the rows where the full model is actually
// queried. Stored sorted ascending.
struct SamplingSet {
    int n_total = 0;
    std::vector<int> indices;

    int count() const { return static_cast<int>(indices.size()); }

    std::vector<int> complement() const {
        std::vector<char> in(static_cast<std::size_t>(n_total), 0);
        for (int i : indices) in[static_cast<std::size_t>(i)] = 1;
        std::vector<int> out;
        out.reserve(static_cast<std::size_t>(n_total) - indices.size());
        for (int i = 0; i < n_total; ++i)
            if (!in[static_cast<std::size_t>(i)]) out.push_back(i);
        return out;
    }
};

// Residual-ranked sampling: the m rows of R with the largest squared norms,
// ties broken by lowest index. This minimizes the unsampled residual energy
// over all size-m index sets.
inline SamplingSet adaptive_sampling(const Matrix& residual, int m) {
    const int n = static_cast<int>(residual.rows());
    if (m < 0 || m > n)
        throw std::invalid_argument("adaptive_sampling: m = " + std::to_string(m) +
                                    " not in [0, " + std::to_string(n) + "]");
    const Vector row_sq = residual.rowwise().squaredNorm();
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return row_sq(a) > row_sq(b); });
    SamplingSet s{n, {order.begin(), order.begin() + m}};
    std::sort(s.indices.begin(), s.indices.end());
    return s;
}

// m distinct indices drawn uniformly without replacement (partial
// Fisher-Yates, modulo-bounded draws) from the given stream.
inline SamplingSet uniform_sampling(int n_total, int m, SplitMix64& rng) {
    if (m < 0 || m > n_total)
        throw std::invalid_argument("uniform_sampling: m = " + std::to_string(m) +
                                    " not in [0, " + std::to_string(n_total) + "]");
    std::vector<int> pool(static_cast<std::size_t>(n_total));
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m; ++i) {
        const auto j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n_total - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    SamplingSet s{n_total, {pool.begin(), pool.begin() + m}};
    std::sort(s.indices.begin(), s.indices.end());
    return s;
}

inline SamplingSet uniform_sampling(int n_total, int m, std::uint64_t seed) {
    SplitMix64 rng(seed);
    return uniform_sampling(n_total, m, rng);
}

struct AdeimKernelResult {
    Matrix u;                     // updated basis, NOT re-orthonormalized
    Vector residual_singvals;     // singular values of the sampled residual S^T R
    int applied_rank = 0;         // rank actually applied after clamping
};

// The additive low-rank basis update: given the window values at the
// interpolation points and at the sampling points, computes
//   C = U[p,:] \ F_p,   R = U[s,:] C - F_s,
// and applies the rank-r minimizer of || S^T ((U + a b^T) C - F) ||_F built
// from the top right singular vectors of R. The requested rank is clamped to
// the count of nonzero singular values (zero residual means zero update).
// Only the sampled rows of U change.
inline AdeimKernelResult adeim_kernel(const Matrix& u, std::span<const int> points,
                                      std::span<const int> samples, const Matrix& f_points,
                                      const Matrix& f_samples, int rank) {
    if (rank < 1) throw std::invalid_argument("adeim: update rank must be >= 1");
    const int n = static_cast<int>(u.cols());
    const int m = static_cast<int>(samples.size());
    if (m <= n)
        throw std::invalid_argument("adeim: needs more sampling points than basis vectors (m = " +
                                    std::to_string(m) + ", n = " + std::to_string(n) + ")");
    if (f_points.rows() != static_cast<Eigen::Index>(points.size()) ||
        f_samples.rows() != m || f_points.cols() != f_samples.cols())
        throw std::invalid_argument("adeim: window slices have inconsistent shapes");

    const Matrix c = solve_linear(gather_rows(u, points), f_points, "adeim: U[points,:]");
    const Matrix r_sampled = gather_rows(u, samples) * c - f_samples;

    Eigen::BDCSVD<Matrix> svd(r_sampled, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& sv = svd.singularValues();
    const int r_eff = std::min(rank, numerical_rank(sv));

    AdeimKernelResult out{u, sv, r_eff};
    if (r_eff == 0) return out;
    const Matrix ct_pinv = pseudo_inverse(c.transpose());
    for (int i = 0; i < r_eff; ++i) {
        const Vector v = svd.matrixV().col(i);
        const Vector alpha = -(r_sampled * v);
        const Vector beta = ct_pinv * v;
        for (int j = 0; j < m; ++j) out.u.row(samples[j]) += alpha(j) * beta.transpose();
    }
    return out;
}

// Full ADEIM step: low-rank update, QR re-orthonormalization, QDEIM point
// recomputation. The point recomputation lives here (not in the driver)
// because the update and the new points form one unit.
inline ReducedBasis adeim_update(const ReducedBasis& basis, const SamplingSet& sampling,
                                 const Matrix& f_points, const Matrix& f_samples, int rank) {
    AdeimKernelResult k = adeim_kernel(basis.u, basis.points, sampling.indices, f_points,
                                       f_samples, rank);
    Matrix u = orthonormalize(k.u);
    std::vector<int> points = qdeim_points(u);
    return {std::move(u), std::move(points)};
}

// The surrogate state: exact f values at the sampling rows, DEIM
// reconstruction from the point values everywhere else.
inline Vector assemble_surrogate_state(const ReducedBasis& basis, const SamplingSet& sampling,
                                       const Vector& f_samples, const Vector& f_points) {
    if (f_samples.size() != sampling.count())
        throw std::invalid_argument("surrogate state: f missing at sampling rows (" +
                                    std::to_string(f_samples.size()) + " of " +
                                    std::to_string(sampling.count()) + " given)");
    if (f_points.size() != basis.reduced_dim())
        throw std::invalid_argument("surrogate state: f missing at interpolation points");
    const Vector coef =
        solve_linear(basis.u_at_points(), f_points, "surrogate state: P^T U");
    Vector q_hat = basis.u * coef;
    for (int j = 0; j < sampling.count(); ++j)
        q_hat(sampling.indices[static_cast<std::size_t>(j)]) = f_samples(j);
    return q_hat;
}

} // namespace aadeim

#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "aadeim/adeim.hpp"
#include "aadeim/linalg.hpp"
#include "aadeim/rng.hpp"

namespace aadeim {

// d(Ubar, U) = || Ubar - U U^T Ubar ||_F^2 for orthonormal bases; equals
// n - || U^T Ubar ||_F^2, so it is symmetric and basis-invariant.
inline double subspace_distance(const Matrix& u, const Matrix& u_bar) {
    if (u.rows() != u_bar.rows() || u.cols() != u_bar.cols())
        throw std::invalid_argument("subspace_distance: shape mismatch");
    const auto check = [](const Matrix& b, const char* name) {
        const double dev =
            (b.transpose() * b - Matrix::Identity(b.cols(), b.cols())).norm();
        if (!(dev < 1e-8))
            throw numeric_error(std::string("subspace_distance: ") + name +
                                " not orthonormal (deviation " + std::to_string(dev) + ")");
    };
    check(u, "first basis");
    check(u_bar, "second basis");
    return (u_bar - u * (u.transpose() * u_bar)).squaredNorm();
}

// rho^2 = ||Sbreve^T R||_F^2 + sum_{i>r} sigma_i^2(S^T R): the residual energy
// a rank-r update at the sampled rows cannot remove.
inline double decay_factor_sq(const Matrix& residual, const SamplingSet& sampling, int rank) {
    if (rank < 0) throw std::invalid_argument("decay_factor_sq: rank must be >= 0");
    if (sampling.n_total != residual.rows())
        throw std::invalid_argument("decay_factor_sq: sampling set size mismatch");
    const Matrix r_sampled = gather_rows(residual, sampling.indices);
    const Vector sv =
        Eigen::BDCSVD<Matrix>(r_sampled).singularValues();
    const int rank_sr = numerical_rank(sv);
    double tail = 0.0;
    for (int i = rank; i < rank_sr; ++i) tail += sv(i) * sv(i);
    double unsampled = 0.0;
    for (int i : sampling.complement()) unsampled += residual.row(i).squaredNorm();
    return unsampled + tail;
}

// Local coherence gamma_i = (N/n) ||U^T e_i||^2 with the descending ordering.
struct CoherenceProfile {
    Vector gamma;
    std::vector<int> order; // gamma(order[0]) >= gamma(order[1]) >= ...

    double max() const { return gamma.size() > 0 ? gamma(order.front()) : 0.0; }
};

inline CoherenceProfile local_coherence(const Matrix& u) {
    const double dev =
        (u.transpose() * u - Matrix::Identity(u.cols(), u.cols())).norm();
    if (!(dev < 1e-8)) throw numeric_error("local_coherence: basis not orthonormal");
    const double scale = static_cast<double>(u.rows()) / static_cast<double>(u.cols());
    CoherenceProfile p;
    p.gamma = scale * u.rowwise().squaredNorm();
    p.order.resize(static_cast<std::size_t>(u.rows()));
    std::iota(p.order.begin(), p.order.end(), 0);
    std::stable_sort(p.order.begin(), p.order.end(),
                     [&](int a, int b) { return p.gamma(a) > p.gamma(b); });
    return p;
}

// Empirical check that the DEIM residual of a random draw F = Ubar * G
// (G standard Gaussian) obeys the coherence envelope
//   ||R^T e_i||^2 <= (n/N) ||F||_2^2 (sqrt(gammabar_i) + Lambda sqrt(gamma_i))^2
// with Lambda = ||(P^T U)^{-1}||_2 measured from the data. This is a report,
// not an assertion: max_violation_ratio stays <= 1 up to roundoff when the
// inputs are orthonormal.
struct ResidualCoherenceReport {
    Vector residual_row_sq;       // per original row index
    Vector envelope;              // per original row index
    double max_violation_ratio = 0.0;
    double lambda = 0.0;          // ||(P^T U)^{-1}||_2
    bool locality = false;        // sorted residual decays by >= 4 orders at mid profile
    Vector sorted_residual_sq;
    Vector sorted_envelope;
};

inline ResidualCoherenceReport verify_residual_coherence_bound(const Matrix& u,
                                                               const Matrix& u_bar,
                                                               std::span<const int> points,
                                                               SplitMix64& rng) {
    const int big_n = static_cast<int>(u.rows());
    const int n = static_cast<int>(u.cols());
    Matrix g(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) g(i, j) = rng.gaussian();
    const Matrix f = u_bar * g;

    const Matrix up = gather_rows(u, points);
    const Matrix c = solve_linear(up, gather_rows(f, points), "coherence bound: P^T U");
    const Matrix r = u * c - f;

    ResidualCoherenceReport rep;
    rep.residual_row_sq = r.rowwise().squaredNorm();
    const Vector sv_up = Eigen::BDCSVD<Matrix>(up).singularValues();
    rep.lambda = 1.0 / sv_up(sv_up.size() - 1);
    const double f2 = Eigen::BDCSVD<Matrix>(f).singularValues()(0);
    const CoherenceProfile cu = local_coherence(u);
    const CoherenceProfile cubar = local_coherence(u_bar);
    const double scale = static_cast<double>(n) / static_cast<double>(big_n);
    rep.envelope.resize(big_n);
    for (int i = 0; i < big_n; ++i) {
        const double s = std::sqrt(cubar.gamma(i)) + rep.lambda * std::sqrt(cu.gamma(i));
        rep.envelope(i) = scale * f2 * f2 * s * s;
    }
    for (int i = 0; i < big_n; ++i) {
        if (rep.envelope(i) <= 0.0) continue;
        rep.max_violation_ratio =
            std::max(rep.max_violation_ratio, rep.residual_row_sq(i) / rep.envelope(i));
    }
    rep.sorted_residual_sq = rep.residual_row_sq;
    std::sort(rep.sorted_residual_sq.data(),
              rep.sorted_residual_sq.data() + rep.sorted_residual_sq.size(),
              std::greater<double>());
    rep.sorted_envelope = rep.envelope;
    std::sort(rep.sorted_envelope.data(), rep.sorted_envelope.data() + rep.sorted_envelope.size(),
              std::greater<double>());
    const double top = rep.sorted_residual_sq(0);
    const double mid = rep.sorted_residual_sq(big_n / 2);
    rep.locality = top <= 1e-300 || mid <= 1e-4 * top;
    return rep;
}

// Normalized singular-value spectra of a trajectory and of sliding windows
// ending at the requested columns.
struct LocalitySpectra {
    int window = 0;
    int dim = 0;
    Vector global_spectrum; // sigma_i / sigma_1 of the whole trajectory
    std::vector<std::pair<int, Vector>> local_spectra; // (end column, spectrum)
};

inline LocalitySpectra locality_study(const Matrix& trajectory, int window, int dim,
                                      std::span<const int> at_columns) {
    LocalitySpectra out;
    out.window = window;
    out.dim = dim;
    Vector sv = Eigen::BDCSVD<Matrix>(trajectory).singularValues();
    out.global_spectrum = sv / sv(0);
    for (int k : at_columns) {
        if (k + 1 < window || k >= trajectory.cols())
            throw std::invalid_argument("locality_study: window [" +
                                        std::to_string(k - window + 1) + ", " +
                                        std::to_string(k) + "] does not fit the trajectory");
        Vector s =
            Eigen::BDCSVD<Matrix>(trajectory.middleCols(k - window + 1, window)).singularValues();
        out.local_spectra.emplace_back(k, s / s(0));
    }
    return out;
}

// Discretized step-function snapshots q(x, t_i) with q = 0 for x <= t, 1 for
// x > t, on a cell-centered grid over [-5, 5], t_i equispaced in [0, t_max].
inline Matrix appendix_a_snapshots(int grid_n, int n_times, double t_max) {
    if (t_max < 0.0 || t_max > 1.0)
        throw std::invalid_argument("appendix_a_snapshots: t_max must be in [0, 1]");
    if (grid_n < 1 || n_times < 1)
        throw std::invalid_argument("appendix_a_snapshots: empty grid or time set");
    const double dx = 10.0 / grid_n;
    Matrix snaps(grid_n, n_times);
    for (int j = 0; j < n_times; ++j) {
        const double t = n_times == 1 ? 0.0 : t_max * j / (n_times - 1);
        for (int i = 0; i < grid_n; ++i) {
            const double x = -5.0 + dx * (i + 0.5);
            snaps(i, j) = x > t ? 1.0 : 0.0;
        }
    }
    return snaps;
}

} // namespace aadeim

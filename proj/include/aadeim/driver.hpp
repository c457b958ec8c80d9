#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "aadeim/adeim.hpp"
#include "aadeim/model.hpp"
#include "aadeim/rng.hpp"
#include "aadeim/rom.hpp"
#include "aadeim/timing.hpp"
#include "aadeim/trajectory.hpp"

namespace aadeim {

enum class SamplingMode { adaptive, uniform };

// All knobs of the online-adaptive run. Defaults follow the Burgers setup:
// n = 8, w = n + 1, warm start 100 steps, rank-1 updates, sampling points
// refreshed every 5th step.
struct AadeimConfig {
    int n = 8;
    long w_init = 100;
    int w = 9;
    int m = 32;
    long z = 5;
    int rank = 1;
    long adapt_every = 1; // basis adaptation period; 0 disables adaptation
    SamplingMode sampling = SamplingMode::adaptive;
    NewtonConfig newton;
    std::uint64_t seed = 0;
    long warm_start_stride = 1; // POD uses every stride-th warm-start state
    StorageSchedule storage;

    void validate(long total_steps) const {
        if (n < 1) throw std::invalid_argument("config: n must be >= 1");
        if (w < n) throw std::invalid_argument("config: window w must be >= n");
        if (w_init < w) throw std::invalid_argument("config: w_init must be >= w");
        if (w_init >= total_steps)
            throw std::invalid_argument("config: w_init must be < total step count");
        if (z < 1) throw std::invalid_argument("config: z must be >= 1");
        if (m == 0) {
            if (adapt_every != 0)
                throw std::invalid_argument("config: m = 0 requires adapt_every = 0");
        } else if (m <= n) {
            throw std::invalid_argument("config: m must exceed n");
        }
        if (adapt_every > 0 && rank < 1)
            throw std::invalid_argument("config: update rank must be >= 1");
        if (adapt_every < 0) throw std::invalid_argument("config: adapt_every must be >= 0");
        if (warm_start_stride < 1)
            throw std::invalid_argument("config: warm_start_stride must be >= 1");
        if (newton.iterations < 1)
            throw std::invalid_argument("config: Newton iterations must be >= 1");
    }
};

struct RunCounters {
    long full_f_evals_reduced = 0;  // f at all N components during the reduced phase
    long restricted_f_evals = 0;    // sampled f evaluations
    long restricted_f_rows = 0;     // total rows touched by those
    long full_jacobian_assemblies_reduced = 0; // stays 0 on the reduced path
    int max_solve_dim_reduced = 0;
    long basis_adaptations = 0;
    long sampling_refreshes = 0;
};

struct RunRecord {
    Trajectory trajectory;
    std::vector<char> produced_by_full; // per stored column
    std::vector<char> sampling_adapted; // per stored column
    PhaseTimes phases;
    Matrix per_step_phases; // (K + 1) x PhaseClock::kNumPhases
    RunCounters counters;
    std::vector<double> err_running; // cumulative error per stored column
    bool diverged = false;
};

namespace detail {

class RunBuilder {
public:
    RunBuilder(int dim, double dt, const StorageSchedule& schedule, const Trajectory* reference)
        : dim_(dim), schedule_(schedule), reference_(reference) {
        record_.trajectory.dt = dt;
    }

    void store(long k, const Vector& q, bool full_model, bool sampling_adapted) {
        if (!schedule_.stores(k)) return;
        cols_.push_back(q);
        record_.trajectory.steps.push_back(k);
        record_.produced_by_full.push_back(full_model ? 1 : 0);
        record_.sampling_adapted.push_back(sampling_adapted ? 1 : 0);
        if (reference_) {
            const long jr = reference_->column_of(k);
            if (jr >= 0) {
                diff_sq_ += (q - reference_->states.col(jr)).squaredNorm();
                ref_sq_ += reference_->states.col(jr).squaredNorm();
            }
            record_.err_running.push_back(ref_sq_ > 0.0 ? std::sqrt(diff_sq_ / ref_sq_) : 0.0);
        }
    }

    RunRecord finish(PhaseClock* clock, double total_seconds) {
        record_.trajectory.states.resize(dim_, static_cast<Eigen::Index>(cols_.size()));
        for (std::size_t j = 0; j < cols_.size(); ++j)
            record_.trajectory.states.col(static_cast<Eigen::Index>(j)) = cols_[j];
        if (clock) {
            record_.phases = clock->snapshot(total_seconds);
            record_.per_step_phases = clock->per_step();
        }
        return std::move(record_);
    }

private:
    int dim_;
    StorageSchedule schedule_;
    const Trajectory* reference_;
    std::vector<Vector> cols_;
    RunRecord record_;
    double diff_sq_ = 0.0;
    double ref_sq_ = 0.0;
};

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace detail

// Full-model run (also the reference producer for error studies).
inline RunRecord run_full(const FullModel& model, const Vector& q0, long steps,
                          const NewtonConfig& nc = {}, const StorageSchedule& schedule = {},
                          const Trajectory* reference = nullptr) {
    const auto t0 = std::chrono::steady_clock::now();
    PhaseClock clock(steps);
    detail::RunBuilder builder(model.dim(), model.dt(), schedule, reference);
    time_step_full_model(
        model, q0, steps, nc, [&](long k, const Vector& q) { builder.store(k, q, true, false); },
        &clock);
    return builder.finish(&clock, detail::seconds_since(t0));
}

// Static reduced model: fixed basis and points, reduced time stepping from
// the projected initial condition, reconstructed trajectory returned.
inline RunRecord run_static_rom(const FullModel& model, const Vector& q0,
                                const ReducedBasis& basis, long steps,
                                const NewtonConfig& nc = {}, const StorageSchedule& schedule = {},
                                const Trajectory* reference = nullptr) {
    validate_basis(basis);
    const auto t0 = std::chrono::steady_clock::now();
    PhaseClock clock(steps);
    detail::RunBuilder builder(model.dim(), model.dt(), schedule, reference);
    ReducedStepper stepper(model, basis);
    ReducedSolveStats stats;
    Vector qt = basis.u.transpose() * q0;
    for (long k = 1; k <= steps; ++k) {
        clock.begin_step(k);
        qt = stepper.step(qt, static_cast<double>(k) * model.dt(), nc, k, &clock, &stats);
        builder.store(k, basis.u * qt, false, false);
    }
    RunRecord rec = builder.finish(&clock, detail::seconds_since(t0));
    rec.counters.max_solve_dim_reduced = stats.max_solve_dim;
    return rec;
}

// The online-adaptive run: full-model warm start, POD/QDEIM initialization,
// then reduced time stepping with residual-driven sampling-point refreshes
// every z steps and additive low-rank basis updates every adapt_every steps.
// Between refreshes the window buffer receives surrogate columns: exact f at
// the sampling rows, DEIM reconstruction elsewhere. With m = 0 and
// adapt_every = 0 the loop degenerates to a static reduced model seeded by
// the warm-start POD basis.
inline RunRecord run_aadeim(const FullModel& model, const Vector& q0, const AadeimConfig& cfg,
                            const Trajectory* reference = nullptr) {
    const long total_steps = model.num_steps();
    const int big_n = model.dim();
    cfg.validate(total_steps);
    if (cfg.m > big_n)
        throw std::invalid_argument("config: m exceeds the full-model dimension");

    const auto t0 = std::chrono::steady_clock::now();
    PhaseClock clock(total_steps);
    detail::RunBuilder builder(big_n, model.dt(), cfg.storage, reference);
    RunCounters counters;

    // Warm start (identical code path to run_full, so the prefix matches a
    // standalone full solve bit for bit).
    Matrix warm(big_n, cfg.w_init);
    time_step_full_model(
        model, q0, cfg.w_init, cfg.newton,
        [&](long k, const Vector& q) {
            warm.col(k - 1) = q;
            builder.store(k, q, true, false);
        },
        &clock);

    // POD basis of the warm-start states (optionally strided) + QDEIM points.
    std::vector<int> pod_cols;
    for (long j = 0; j < cfg.w_init; j += cfg.warm_start_stride) pod_cols.push_back(j);
    Matrix snapshots(big_n, static_cast<Eigen::Index>(pod_cols.size()));
    for (std::size_t j = 0; j < pod_cols.size(); ++j)
        snapshots.col(static_cast<Eigen::Index>(j)) = warm.col(pod_cols[j]);
    if (cfg.n > std::min<Eigen::Index>(snapshots.rows(), snapshots.cols()))
        throw std::invalid_argument("config: n exceeds the warm-start snapshot count");
    PodResult pod = pod_basis(snapshots, cfg.n);
    ReducedBasis basis{pod.u, qdeim_points(pod.u)};

    const long k0 = cfg.w_init + 1;
    const bool maintain_window = cfg.m > 0;

    // Window ring buffer F[:, k-w+1 .. k]; slot of column j is j mod w.
    Matrix ring(big_n, cfg.w);
    if (maintain_window)
        for (long j = k0 - cfg.w + 1; j <= k0 - 1; ++j)
            ring.col(j % cfg.w) = warm.col(j - 1);

    ReducedStepper stepper(model, basis);
    ReducedSolveStats stats;
    SplitMix64 rng(cfg.seed);
    SamplingSet sampling;
    std::vector<int> query_rows;      // sampling rows plus interpolation points
    std::vector<int> point_pos;       // positions of the points inside query_rows
    std::vector<int> sample_pos;      // positions of the sampling rows
    const auto rebuild_query_rows = [&] {
        query_rows = sampling.indices;
        query_rows.insert(query_rows.end(), basis.points.begin(), basis.points.end());
        std::sort(query_rows.begin(), query_rows.end());
        query_rows.erase(std::unique(query_rows.begin(), query_rows.end()), query_rows.end());
        const auto pos_of = [&](int row) {
            return static_cast<int>(std::lower_bound(query_rows.begin(), query_rows.end(), row) -
                                    query_rows.begin());
        };
        point_pos.clear();
        for (int p : basis.points) point_pos.push_back(pos_of(p));
        sample_pos.clear();
        for (int s : sampling.indices) sample_pos.push_back(pos_of(s));
    };

    Vector qt = basis.u.transpose() * warm.col(cfg.w_init - 1);
    Vector q_full(big_n), f_col(big_n), f_rows, f_points(cfg.n), f_samples(cfg.m);
    Matrix window_points(cfg.n, cfg.w), window_samples(cfg.m, cfg.w), window(big_n, cfg.w);

    const auto window_slot = [&](long k, int j) { return (k - cfg.w + 1 + j) % cfg.w; };

    for (long k = k0; k <= total_steps; ++k) {
        clock.begin_step(k);
        const double t = static_cast<double>(k) * model.dt();
        qt = stepper.step(qt, t, cfg.newton, k, &clock, &stats);
        q_full.noalias() = basis.u * qt;
        if (!q_full.allFinite())
            throw divergence_error("reconstructed state non-finite", k, "solve");

        bool refreshed = false;
        if (maintain_window) {
            if (k % cfg.z == 0 || k == k0) {
                // Sampling-point refresh: full f, residual over the window,
                // row-ranked selection (or a fresh uniform draw).
                {
                    PhaseScope ps(&clock, PhaseClock::Rhs);
                    model.evaluate(q_full, t, f_col);
                }
                ++counters.full_f_evals_reduced;
                ring.col(k % cfg.w) = f_col;
                {
                    PhaseScope ps(&clock, PhaseClock::Sample);
                    for (int j = 0; j < cfg.w; ++j)
                        window.col(j) = ring.col(window_slot(k, j));
                    const Matrix coeff =
                        solve_linear(basis.u_at_points(), gather_rows(window, basis.points),
                                     "sampling refresh: P^T U");
                    const Matrix residual = window - basis.u * coeff;
                    sampling = cfg.sampling == SamplingMode::adaptive
                                   ? adaptive_sampling(residual, cfg.m)
                                   : uniform_sampling(big_n, cfg.m, rng);
                    rebuild_query_rows();
                }
                ++counters.sampling_refreshes;
                refreshed = true;
            } else {
                {
                    PhaseScope ps(&clock, PhaseClock::Rhs);
                    model.evaluate_rows(q_full, t, query_rows, f_rows);
                }
                ++counters.restricted_f_evals;
                counters.restricted_f_rows += static_cast<long>(query_rows.size());
                {
                    PhaseScope ps(&clock, PhaseClock::Sample);
                    for (int j = 0; j < cfg.n; ++j) f_points(j) = f_rows(point_pos[j]);
                    for (int j = 0; j < cfg.m; ++j) f_samples(j) = f_rows(sample_pos[j]);
                    ring.col(k % cfg.w) =
                        assemble_surrogate_state(basis, sampling, f_samples, f_points);
                }
            }
        }
        builder.store(k, q_full, false, refreshed);

        if (cfg.adapt_every > 0 && (k - k0) % cfg.adapt_every == 0) {
            AdeimKernelResult kernel = [&] {
                PhaseScope ps(&clock, PhaseClock::AdaptBasis);
                for (int j = 0; j < cfg.w; ++j) {
                    const auto slot = window_slot(k, j);
                    for (int i = 0; i < cfg.n; ++i)
                        window_points(i, j) = ring(basis.points[static_cast<std::size_t>(i)], slot);
                    for (int i = 0; i < cfg.m; ++i)
                        window_samples(i, j) =
                            ring(sampling.indices[static_cast<std::size_t>(i)], slot);
                }
                return adeim_kernel(basis.u, basis.points, sampling.indices, window_points,
                                    window_samples, cfg.rank);
            }();
            {
                PhaseScope ps(&clock, PhaseClock::AdaptBasis);
                basis.u = orthonormalize(kernel.u);
            }
            {
                PhaseScope ps(&clock, PhaseClock::AdaptPoints);
                basis.points = qdeim_points(basis.u);
            }
            stepper.set_basis(basis);
            rebuild_query_rows();
            // The next step's equation is posed in the adapted basis.
            qt.noalias() = basis.u.transpose() * q_full;
            ++counters.basis_adaptations;
        }
    }

    RunRecord rec = builder.finish(&clock, detail::seconds_since(t0));
    counters.max_solve_dim_reduced = stats.max_solve_dim;
    rec.counters = counters;
    return rec;
}

// Comparison variant: instead of sampled low-rank updates, the basis is
// recomputed by a thin SVD of the window of full f evaluations. f is
// evaluated at all components every svd_adapt_every steps (0 = never, which
// degenerates to a static reduced model seeded by the warm start); the window
// holds the last w fresh columns.
inline RunRecord run_full_svd_variant(const FullModel& model, const Vector& q0,
                                      const AadeimConfig& cfg, long svd_adapt_every,
                                      const Trajectory* reference = nullptr) {
    const long total_steps = model.num_steps();
    const int big_n = model.dim();
    if (cfg.n < 1 || cfg.w < cfg.n || cfg.w_init < cfg.w || cfg.w_init >= total_steps)
        throw std::invalid_argument("config: invalid n / w / w_init");
    if (svd_adapt_every < 0)
        throw std::invalid_argument("config: svd_adapt_every must be >= 0");

    const auto t0 = std::chrono::steady_clock::now();
    PhaseClock clock(total_steps);
    detail::RunBuilder builder(big_n, model.dt(), cfg.storage, reference);
    RunCounters counters;

    Matrix warm(big_n, cfg.w_init);
    time_step_full_model(
        model, q0, cfg.w_init, cfg.newton,
        [&](long k, const Vector& q) {
            warm.col(k - 1) = q;
            builder.store(k, q, true, false);
        },
        &clock);
    PodResult pod = pod_basis(warm, cfg.n);
    ReducedBasis basis{pod.u, qdeim_points(pod.u)};

    const long k0 = cfg.w_init + 1;
    Matrix fresh(big_n, cfg.w); // last w fresh f columns, oldest first
    int fresh_count = 0;
    for (long j = k0 - cfg.w + 1; j <= k0 - 1; ++j)
        fresh.col(fresh_count++) = warm.col(j - 1);

    ReducedStepper stepper(model, basis);
    ReducedSolveStats stats;
    Vector qt = basis.u.transpose() * warm.col(cfg.w_init - 1);
    Vector q_full(big_n), f_col(big_n);

    for (long k = k0; k <= total_steps; ++k) {
        clock.begin_step(k);
        const double t = static_cast<double>(k) * model.dt();
        qt = stepper.step(qt, t, cfg.newton, k, &clock, &stats);
        q_full.noalias() = basis.u * qt;
        const bool adapt =
            svd_adapt_every > 0 && (k % svd_adapt_every == 0 || k == k0);
        if (adapt) {
            {
                PhaseScope ps(&clock, PhaseClock::Rhs);
                model.evaluate(q_full, t, f_col);
            }
            ++counters.full_f_evals_reduced;
            if (fresh_count == cfg.w) {
                for (int j = 0; j + 1 < cfg.w; ++j) fresh.col(j) = fresh.col(j + 1);
                fresh.col(cfg.w - 1) = f_col;
            } else {
                fresh.col(fresh_count++) = f_col;
            }
            {
                PhaseScope ps(&clock, PhaseClock::AdaptBasis);
                basis.u = pod_basis(fresh.leftCols(fresh_count), cfg.n).u;
            }
            {
                PhaseScope ps(&clock, PhaseClock::AdaptPoints);
                basis.points = qdeim_points(basis.u);
            }
            stepper.set_basis(basis);
            qt.noalias() = basis.u.transpose() * q_full;
            ++counters.basis_adaptations;
        }
        builder.store(k, q_full, false, adapt);
    }
    RunRecord rec = builder.finish(&clock, detail::seconds_since(t0));
    counters.max_solve_dim_reduced = stats.max_solve_dim;
    rec.counters = counters;
    return rec;
}

} // namespace aadeim

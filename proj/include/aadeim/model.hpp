#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "aadeim/banded.hpp"
#include "aadeim/errors.hpp"
#include "aadeim/linalg.hpp"
#include "aadeim/timing.hpp"

namespace aadeim {

struct NewtonConfig {
    int iterations = 15; // fixed count, no early exit
    double step_size = 1.0;
};

// Sparse Jacobian rows in CSR-ish form; buffers are reused across calls.
struct StencilRows {
    std::vector<int> offsets; // offsets.size() == rows + 1
    std::vector<int> cols;
    std::vector<double> vals;

    void reset(std::size_t expected_rows, std::size_t expected_nnz) {
        offsets.clear();
        offsets.reserve(expected_rows + 1);
        offsets.push_back(0);
        cols.clear();
        cols.reserve(expected_nnz);
        vals.clear();
        vals.reserve(expected_nnz);
    }
    void close_row() { offsets.push_back(static_cast<int>(cols.size())); }
    void push(int col, double val) {
        cols.push_back(col);
        vals.push_back(val);
    }
};

// Time-discrete full-order operator: advancing a step means solving
// f(q_new) = q_old for q_new (implicit Euler gives f(q) = q - dt * rhs(q, t)).
// `t` is the time level of the state the operator is applied to.
class FullModel {
public:
    virtual ~FullModel() = default;

    virtual int dim() const = 0;
    virtual double dt() const = 0;
    virtual long num_steps() const = 0;
    virtual double parameter() const = 0;
    virtual Vector initial_condition() const = 0;

    virtual int bandwidth_lower() const = 0;
    virtual int bandwidth_upper() const = 0;

    virtual void evaluate(const Vector& q, double t, Vector& out) const = 0;
    // Same arithmetic path per component as evaluate(); reads only stencil
    // entries of q, so results match the full evaluation bitwise.
    virtual void evaluate_rows(const Vector& q, double t, std::span<const int> rows,
                               Vector& out) const = 0;
    virtual void jacobian_rows(const Vector& q, double t, std::span<const int> rows,
                               StencilRows& out) const = 0;
    // Column support of row i (a superset is allowed).
    virtual void stencil_cols(int row, std::vector<int>& cols) const = 0;

    Vector evaluate(const Vector& q, double t) const {
        Vector out(dim());
        evaluate(q, t, out);
        return out;
    }

    // Validating restricted evaluation: indices must be distinct and in range.
    Vector evaluate_at(const Vector& q, double t, std::span<const int> rows) const {
        std::vector<int> seen(static_cast<std::size_t>(dim()), 0);
        for (int r : rows) {
            if (r < 0 || r >= dim())
                throw numeric_error("evaluate_at: row index " + std::to_string(r) +
                                    " out of range [0," + std::to_string(dim()) + ")");
            if (seen[static_cast<std::size_t>(r)]++)
                throw numeric_error("evaluate_at: duplicate row index " + std::to_string(r));
        }
        Vector out(static_cast<Eigen::Index>(rows.size()));
        evaluate_rows(q, t, rows, out);
        return out;
    }

    Matrix jacobian_dense(const Vector& q, double t) const {
        const int n = dim();
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        StencilRows rows;
        rows.reset(static_cast<std::size_t>(n), static_cast<std::size_t>(n) * 8);
        jacobian_rows(q, t, all, rows);
        Matrix jac = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int e = rows.offsets[static_cast<std::size_t>(i)];
                 e < rows.offsets[static_cast<std::size_t>(i) + 1]; ++e)
                jac(i, rows.cols[static_cast<std::size_t>(e)]) +=
                    rows.vals[static_cast<std::size_t>(e)];
        return jac;
    }

    // Banded assembly; entries outside the declared band (periodic wraps) land
    // in `corrections`.
    void jacobian_banded(const Vector& q, double t, BandedMatrix& jac,
                         std::vector<BandCorrection>& corrections, StencilRows& scratch) const {
        const int n = dim();
        std::vector<int> all(static_cast<std::size_t>(n));
        std::iota(all.begin(), all.end(), 0);
        scratch.reset(static_cast<std::size_t>(n), static_cast<std::size_t>(n) * 8);
        jacobian_rows(q, t, all, scratch);
        jac.set_zero();
        corrections.clear();
        for (int i = 0; i < n; ++i)
            for (int e = scratch.offsets[static_cast<std::size_t>(i)];
                 e < scratch.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
                const int j = scratch.cols[static_cast<std::size_t>(e)];
                const double v = scratch.vals[static_cast<std::size_t>(e)];
                if (jac.in_band(i, j))
                    jac.add(i, j, v);
                else
                    corrections.push_back({i, j, v});
            }
    }
};

// Newton for the full system f(q_new) = q_prev; fixed iteration count, fixed
// step size, no early exit. The banded Jacobian is refactorized per iteration.
class FullNewtonStepper {
public:
    explicit FullNewtonStepper(const FullModel& model)
        : model_(&model),
          jac_(model.dim(), model.bandwidth_lower(), model.bandwidth_upper()),
          all_rows_(static_cast<std::size_t>(model.dim())) {
        std::iota(all_rows_.begin(), all_rows_.end(), 0);
    }

    Vector step(const Vector& q_prev, double t, const NewtonConfig& nc, long step_index,
                PhaseClock* clock = nullptr) {
        Vector q = q_prev;
        Vector g(model_->dim());
        for (int it = 0; it < nc.iterations; ++it) {
            {
                PhaseScope ps(clock, PhaseClock::Rhs);
                model_->evaluate(q, t, g);
            }
            g -= q_prev;
            {
                PhaseScope ps(clock, PhaseClock::Jacobian);
                model_->jacobian_banded(q, t, jac_, corrections_, scratch_);
            }
            {
                PhaseScope ps(clock, PhaseClock::Solve);
                if (corrections_.empty()) {
                    jac_.factorize(pivots_);
                    jac_.solve_in_place(pivots_, g);
                } else {
                    CorrectedBandedSolver solver;
                    solver.factorize(jac_, corrections_);
                    solver.solve_in_place(g);
                }
            }
            q -= nc.step_size * g;
            if (!q.allFinite())
                throw divergence_error("full-model Newton iterate non-finite", step_index,
                                       "solve");
        }
        return q;
    }

private:
    const FullModel* model_;
    BandedMatrix jac_;
    std::vector<BandCorrection> corrections_;
    std::vector<int> pivots_;
    StencilRows scratch_;
    std::vector<int> all_rows_;
};

// Runs `steps` full-model time steps from q0, handing each state to `sink(k, q)`.
template <class Sink>
void time_step_full_model(const FullModel& model, const Vector& q0, long steps,
                          const NewtonConfig& nc, Sink&& sink, PhaseClock* clock = nullptr,
                          long first_step = 1) {
    if (q0.size() != model.dim())
        throw numeric_error("full model solve: initial state has length " +
                            std::to_string(q0.size()) + ", model dimension is " +
                            std::to_string(model.dim()));
    FullNewtonStepper stepper(model);
    Vector q = q0;
    for (long k = first_step; k < first_step + steps; ++k) {
        if (clock) clock->begin_step(k);
        q = stepper.step(q, static_cast<double>(k) * model.dt(), nc, k, clock);
        sink(k, q);
    }
}

// Dense trajectory [q_1, ..., q_steps] of the full model.
inline Matrix solve_full_model(const FullModel& model, const Vector& q0, long steps,
                               const NewtonConfig& nc = {}) {
    Matrix out(model.dim(), steps);
    time_step_full_model(model, q0, steps, nc,
                         [&](long k, const Vector& q) { out.col(k - 1) = q; });
    return out;
}

} // namespace aadeim

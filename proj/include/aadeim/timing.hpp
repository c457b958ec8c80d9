#pragma once

#include <Eigen/Dense>
#include <chrono>

namespace aadeim {

// Aggregate wall time per work category. `overhead` is total minus the sum of
// the instrumented categories.
struct PhaseTimes {
    double rhs = 0.0;
    double jacobian = 0.0;
    double solve = 0.0;
    double sample = 0.0;
    double adapt_basis = 0.0;
    double adapt_points = 0.0;
    double overhead = 0.0;
    double total = 0.0;

    double instrumented_sum() const {
        return rhs + jacobian + solve + sample + adapt_basis + adapt_points;
    }
};

// Accumulates phase times per time step and in aggregate. Instrumentation is
// at call granularity, so categories never overlap.
class PhaseClock {
public:
    enum Phase { Rhs = 0, Jacobian, Solve, Sample, AdaptBasis, AdaptPoints, kNumPhases };

    explicit PhaseClock(long num_steps)
        : per_step_(Eigen::MatrixXd::Zero(num_steps + 1, kNumPhases)) {}

    void begin_step(long k) { step_ = k; }

    void add(Phase p, double seconds) {
        if (step_ >= 0 && step_ < per_step_.rows()) per_step_(step_, p) += seconds;
        aggregate_[p] += seconds;
    }

    double aggregate(Phase p) const { return aggregate_[p]; }
    const Eigen::MatrixXd& per_step() const { return per_step_; }

    PhaseTimes snapshot(double total_seconds) const {
        PhaseTimes t;
        t.rhs = aggregate_[Rhs];
        t.jacobian = aggregate_[Jacobian];
        t.solve = aggregate_[Solve];
        t.sample = aggregate_[Sample];
        t.adapt_basis = aggregate_[AdaptBasis];
        t.adapt_points = aggregate_[AdaptPoints];
        t.total = total_seconds;
        t.overhead = total_seconds - t.instrumented_sum();
        return t;
    }

private:
    Eigen::MatrixXd per_step_;
    double aggregate_[kNumPhases] = {};
    long step_ = -1;
};

// RAII section timer; a null clock disables instrumentation.
class PhaseScope {
public:
    PhaseScope(PhaseClock* clock, PhaseClock::Phase phase) : clock_(clock), phase_(phase) {
        if (clock_) t0_ = std::chrono::steady_clock::now();
    }
    ~PhaseScope() {
        if (clock_)
            clock_->add(phase_, std::chrono::duration<double>(
                                    std::chrono::steady_clock::now() - t0_)
                                    .count());
    }
    PhaseScope(const PhaseScope&) = delete;
    PhaseScope& operator=(const PhaseScope&) = delete;

private:
    PhaseClock* clock_;
    PhaseClock::Phase phase_;
    std::chrono::steady_clock::time_point t0_;
};

} // namespace aadeim

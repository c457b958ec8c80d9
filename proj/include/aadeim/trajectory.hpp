#pragma once

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aadeim/linalg.hpp"

namespace aadeim {

// Which time-step columns a run keeps. The default keeps everything; long
// runs use the paper's error schedule (all steps up to 1000, then every 50th).
struct StorageSchedule {
    long dense_until = -1; // -1: store every step
    long every = 1;

    bool stores(long k) const {
        if (dense_until < 0) return true;
        if (k <= dense_until) return true;
        return every > 0 && k % every == 0;
    }
};

inline StorageSchedule paper_error_schedule() { return {1000, 50}; }

// Stored states of one run: states.col(j) is the state at time steps[j] * dt.
struct Trajectory {
    Matrix states;
    std::vector<long> steps;
    double dt = 0.0;

    long column_of(long step) const {
        auto it = std::lower_bound(steps.begin(), steps.end(), step);
        if (it == steps.end() || *it != step) return -1;
        return it - steps.begin();
    }
};

// Relative Frobenius-norm error || Qtest - Qref ||_F / || Qref ||_F over the
// scheduled columns. Every scheduled reference column must exist in the test
// trajectory.
inline double compute_error(const Trajectory& reference, const Trajectory& test,
                            const StorageSchedule& schedule = {}) {
    if (reference.states.rows() != test.states.rows())
        throw std::invalid_argument("compute_error: state dimensions differ (" +
                                    std::to_string(reference.states.rows()) + " vs " +
                                    std::to_string(test.states.rows()) + ")");
    double diff_sq = 0.0;
    double ref_sq = 0.0;
    long used = 0;
    for (std::size_t j = 0; j < reference.steps.size(); ++j) {
        const long k = reference.steps[j];
        if (!schedule.stores(k)) continue;
        const long jt = test.column_of(k);
        if (jt < 0)
            throw std::invalid_argument("compute_error: test trajectory is missing step " +
                                        std::to_string(k));
        diff_sq += (test.states.col(jt) - reference.states.col(static_cast<Eigen::Index>(j)))
                       .squaredNorm();
        ref_sq += reference.states.col(static_cast<Eigen::Index>(j)).squaredNorm();
        ++used;
    }
    if (used == 0) throw std::invalid_argument("compute_error: no scheduled columns");
    if (ref_sq == 0.0) return diff_sq == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(diff_sq / ref_sq);
}

} // namespace aadeim

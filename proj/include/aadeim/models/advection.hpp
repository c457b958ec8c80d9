#pragma once

#include <cmath>

#include "aadeim/model.hpp"

namespace aadeim {

// Linear advection q_t + mu * q_x = 0 on (-1, 1), periodic, second-order
// upwind in space, implicit Euler in time:
//   f(q)_i = q_i + dt * mu * (3 q_i - 4 q_{i-1} + q_{i-2}) / (2 dx)
// for mu >= 0 (mirrored stencil for mu < 0), indices wrapping mod N.
// The initial condition is the N(0, 0.01^2) density.
class AdvectionModel final : public FullModel {
public:
    AdvectionModel(int n, double mu, double dt, long num_steps)
        : n_(n), mu_(mu), dt_(dt), steps_(num_steps), dx_(2.0 / n) {}

    int dim() const override { return n_; }
    double dt() const override { return dt_; }
    long num_steps() const override { return steps_; }
    double parameter() const override { return mu_; }

    Vector initial_condition() const override {
        Vector q0(n_);
        for (int i = 0; i < n_; ++i) {
            const double x = -1.0 + dx_ * i;
            q0(i) = 1.0 / std::sqrt(M_PI * 0.02) * std::exp(-x * x / 0.0002);
        }
        return q0;
    }

    int bandwidth_lower() const override { return mu_ >= 0.0 ? 2 : 0; }
    int bandwidth_upper() const override { return mu_ >= 0.0 ? 0 : 2; }

    void evaluate(const Vector& q, double /*t*/, Vector& out) const override {
        out.resize(n_);
        for (int i = 0; i < n_; ++i) out(i) = row_value(q, i);
    }

    void evaluate_rows(const Vector& q, double /*t*/, std::span<const int> rows,
                       Vector& out) const override {
        out.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t r = 0; r < rows.size(); ++r)
            out(static_cast<Eigen::Index>(r)) = row_value(q, rows[r]);
    }

    void jacobian_rows(const Vector& /*q*/, double /*t*/, std::span<const int> rows,
                       StencilRows& out) const override {
        out.reset(rows.size(), rows.size() * 3);
        const double c = dt_ * mu_ / (2.0 * dx_);
        for (int i : rows) {
            if (mu_ >= 0.0) {
                out.push(i, 1.0 + 3.0 * c);
                out.push(wrap(i - 1), -4.0 * c);
                out.push(wrap(i - 2), c);
            } else {
                out.push(i, 1.0 - 3.0 * c);
                out.push(wrap(i + 1), 4.0 * c);
                out.push(wrap(i + 2), -c);
            }
            out.close_row();
        }
    }

    void stencil_cols(int row, std::vector<int>& cols) const override {
        cols.clear();
        cols.push_back(row);
        if (mu_ >= 0.0) {
            cols.push_back(wrap(row - 1));
            cols.push_back(wrap(row - 2));
        } else {
            cols.push_back(wrap(row + 1));
            cols.push_back(wrap(row + 2));
        }
    }

private:
    int wrap(int i) const { return ((i % n_) + n_) % n_; }

    double row_value(const Vector& q, int i) const {
        double deriv;
        if (mu_ >= 0.0)
            deriv = (3.0 * q(i) - 4.0 * q(wrap(i - 1)) + q(wrap(i - 2))) / (2.0 * dx_);
        else
            deriv = (-3.0 * q(i) + 4.0 * q(wrap(i + 1)) - q(wrap(i + 2))) / (2.0 * dx_);
        return q(i) + dt_ * mu_ * deriv;
    }

    int n_;
    double mu_;
    double dt_;
    long steps_;
    double dx_;
};

} // namespace aadeim
